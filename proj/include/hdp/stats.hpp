#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hdp/rng.hpp"

namespace hdp {

struct EstimatorResult {
  double value;
  double std_error;
  std::size_t n_samples;
};

/// Sample mean and its standard error (sample std / sqrt(n)). Needs n >= 2.
EstimatorResult mc_mean_ci(std::span<const double> samples);

/// Sample variance (divisor n) with the large-sample standard error
/// sqrt((m4 - m2^2) / n) from the central moments.
EstimatorResult mc_variance(std::span<const double> samples);

double median(std::vector<double> values);

struct LinearFit {
  double slope;
  double intercept;
  double r2;
};

/// Least-squares line y = intercept + slope x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct KsResult {
  double statistic;
  double p_value;
};

/// sup_x |F_n(x) - F(x)| for a continuous cdf F. Any n >= 1.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov tail probability P(K > (sqrt(n) + 0.12 + 0.11/sqrt(n)) d).
double kolmogorov_p_value(double d, std::size_t n);

/// One-sample Kolmogorov-Smirnov test. Needs n >= 10 and a cdf that is
/// nondecreasing and within [0, 1] on the sorted samples.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

struct ExitProbabilityResult {
  EstimatorResult estimate;
  bool coarse_mesh_warning;  // h > eps^2 / 100
};

/// Fraction of skew Brownian paths from 0 that leave (-eps, eps) through +eps,
/// monitored on a grid of step h. Path i uses stream i of master_seed.
ExitProbabilityResult exit_probability(double theta, double eps, std::size_t n_paths,
                                       double h, std::uint64_t master_seed,
                                       unsigned workers = 0);

struct VerificationReport {
  std::string check_name;
  double measured = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::map<std::string, std::string> metadata;
};

struct ConvergenceStudy {
  std::vector<double> meshes;
  std::vector<double> medians;
  std::size_t inversions = 0;
  bool pass = false;
};

/// Medians below this count as an identically vanishing residual.
inline constexpr double kResidualFloor = 1e-12;

/// Applies the refinement rule to per-mesh medians: pass when every median is
/// below kResidualFloor, or when the medians decrease with at most one
/// inversion and the finest median is at most `min_reduction` times the
/// coarsest.
ConvergenceStudy judge_convergence(std::vector<double> meshes, std::vector<double> medians,
                                   double min_reduction = 0.5);

/// Runs `experiment(path_index)`, which returns one sup-residual per mesh,
/// for n_paths paths and judges the per-mesh medians. Needs at least three
/// strictly decreasing meshes.
ConvergenceStudy convergence_study(
    const std::vector<double>& meshes, std::size_t n_paths,
    const std::function<std::vector<double>(std::size_t)>& experiment,
    unsigned workers = 0, double min_reduction = 0.5);

VerificationReport to_report(const std::string& name, const ConvergenceStudy& study);

std::string format_double(double v);

}  // namespace hdp
