#pragma once

#include "hdp/paths.hpp"
#include "hdp/skew.hpp"

namespace hdp {

struct ModelParams {
  double alpha = 0.5;
  double theta = 0.0;
  double x0 = 0.0;
};

/// Throws std::invalid_argument unless alpha is in (-1, 1), theta in [-1, 1]
/// and x0 is finite.
void validate(const ModelParams& p);

/// alpha <= 0 with theta != 0: the skew construction is not a solution there.
bool is_known_non_solution(const ModelParams& p);

struct NonMarkovParams {
  double A = 1.0;
  double B_level = 1.0;
};

/// |x|^gamma sign(x), and 0 at x = 0 for every gamma. Arguments below 1e-300
/// in magnitude count as 0.
double signed_power(double x, double gamma);

/// Start of B^theta that makes the skew transform begin at x0.
double skew_start(double alpha, double x0);

/// ((1 - alpha) B + (x0)^(1 - alpha))^(1 / (1 - alpha)) node-wise.
Path benchmark_solution(const ModelParams& p, const Path& B);

/// The benchmark up to the first node where its linear argument reaches or
/// crosses zero, and 0 from that node on.
Path stopped_solution(const ModelParams& p, const Path& B);

/// Index of that first node, or n_nodes() if it is never reached.
std::size_t first_zero_node(const ModelParams& p, const Path& B);

double nonmarkov_map(double x, double alpha, const NonMarkovParams& nm);
Path nonmarkov_solution(const ModelParams& p, const NonMarkovParams& nm, const Path& B);

struct SkewSolution {
  Path X;
  bool non_solution_flag;
};

/// ((1 - alpha) B^theta)^(1 / (1 - alpha)) node-wise. The coupled path must
/// start at skew_start(alpha, x0) and carry the same theta as p.
SkewSolution skew_solution(const ModelParams& p, const CoupledSkewPath& coupled);

/// Explicit reflected solution built from the running minimum of B. x0 >= 0.
Path reflected_solution_explicit(double alpha, double x0, const Path& B);

}  // namespace hdp
