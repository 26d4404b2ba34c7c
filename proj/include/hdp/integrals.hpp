#pragma once

#include <functional>
#include <vector>

#include "hdp/paths.hpp"
#include "hdp/skew.hpp"
#include "hdp/solutions.hpp"

namespace hdp {

using RealFn = std::function<double(double)>;

struct PartitionSumResult {
  Path curve;  // running sum at every node, curve[0] = 0
  double mesh;
};

/// sum X_k (Y_{k+1} - Y_k): forward (Ito) sums.
PartitionSumResult ito_sum(const Path& integrand, const Path& driver);
/// sum X_{k+1} (Y_{k+1} - Y_k): backward sums.
PartitionSumResult backward_sum(const Path& integrand, const Path& driver);
/// sum (X_k + X_{k+1})/2 (Y_{k+1} - Y_k): symmetric (Stratonovich) sums.
PartitionSumResult stratonovich_sum(const Path& integrand, const Path& driver);
/// sum (X_{k+1} - X_k)(Y_{k+1} - Y_k). Pass f already applied to the path.
PartitionSumResult bracket_estimate(const Path& f_of_X, const Path& driver);

/// Applies f node-wise.
Path apply_fn(const RealFn& f, const Path& x);

/// f outside (-w, w), linear between f(-w) and f(w) inside.
RealFn mollify(const RealFn& f, double width);

struct BracketConvergence {
  std::vector<double> widths;
  std::vector<double> sup_differences;  // sup_t |[h_w(X), B]_t - [f(X), B]_t|
};

/// Brackets of mollified f against the rough-f bracket on one coupled path.
BracketConvergence bracket_convergence(const RealFn& f, const CoupledSkewPath& coupled,
                                       const std::vector<double>& widths);

struct PvReport {
  std::vector<double> eps;
  std::vector<double> values;  // truncated integral over the whole path
  double tolerance;
  bool cauchy;  // last two truncation levels differ by less than tolerance
};

/// int_0^t (X_s)^exponent 1{|X_s| > eps} ds as left-point sums, per eps.
PvReport pv_integral(const Path& X, double exponent, const std::vector<double>& eps_sequence,
                     double tolerance);

/// Truncation levels 2^-j, j = 1, 2, ..., stopping before they drop below
/// 10 sqrt(h).
std::vector<double> default_pv_eps(const TimeGrid& grid);

/// X_t - x0 - sum of |X|^alpha against the driver in the symmetric sense.
Path sde_residual(const ModelParams& p, const Path& X, const Path& driver);

struct ItoFormResidual {
  Path residual;
  bool non_integrable_flag;  // alpha < 0 with a plain Lebesgue drift
};

/// Residual of the Ito form: forward sums plus the drift
/// (alpha/2) int (X)^(2 alpha - 1) ds, truncated at |X| > pv_epsilon when
/// use_pv is set.
ItoFormResidual ito_form_residual(const ModelParams& p, const Path& X, const Path& driver,
                                  bool use_pv, double pv_epsilon = 0.0);

/// pv truncation in the units of X matching 10 sqrt(h) for the driver.
double default_pv_epsilon(double alpha, const TimeGrid& grid);

struct ChainRuleFunctions {
  RealFn g, dg, d2g;
  RealFn phi, dphi;
  double delta;  // g vanishes on [-delta, delta]
};

/// g(X_t) - g(X_0) - int g' phi dB - 1/2 int phi (g'' phi + g' phi') ds with
/// forward sums.
Path chain_rule_residual(const ChainRuleFunctions& fns, const Path& X, const Path& driver);

/// sup over nodes of |values|.
double sup_abs(const Path& p);

}  // namespace hdp
