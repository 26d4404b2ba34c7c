#include "hdp/solutions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hdp {

void validate(const ModelParams& p) {
  if (!(p.alpha > -1.0 && p.alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (-1, 1)");
  require_theta(p.theta);
  if (!std::isfinite(p.x0)) throw std::invalid_argument("x0 must be finite");
}

bool is_known_non_solution(const ModelParams& p) {
  return p.alpha <= 0.0 && p.theta != 0.0;
}

double signed_power(double x, double gamma) {
  const double a = std::abs(x);
  if (a < 1e-300) return 0.0;
  const double v = std::pow(a, gamma);
  return x < 0.0 ? -v : v;
}

double skew_start(double alpha, double x0) {
  return signed_power(x0, 1.0 - alpha) / (1.0 - alpha);
}

namespace {

double linear_argument(const ModelParams& p, double b) {
  return (1.0 - p.alpha) * b + signed_power(p.x0, 1.0 - p.alpha);
}

}  // namespace

Path benchmark_solution(const ModelParams& p, const Path& B) {
  validate(p);
  const double g = 1.0 / (1.0 - p.alpha);
  std::vector<double> x(B.size());
  for (std::size_t k = 0; k < x.size(); ++k)
    x[k] = signed_power(linear_argument(p, B[k]), g);
  x[0] = p.x0;
  return Path(B.grid(), std::move(x));
}

std::size_t first_zero_node(const ModelParams& p, const Path& B) {
  validate(p);
  const double u0 = linear_argument(p, B[0]);
  if (u0 == 0.0) return 0;
  for (std::size_t k = 1; k < B.size(); ++k) {
    const double u = linear_argument(p, B[k]);
    if (u == 0.0 || (u > 0.0) != (u0 > 0.0)) return k;
  }
  return B.size();
}

Path stopped_solution(const ModelParams& p, const Path& B) {
  const Path x0 = benchmark_solution(p, B);
  const std::size_t tau = first_zero_node(p, B);
  std::vector<double> x(x0.values().begin(), x0.values().end());
  std::fill(x.begin() + static_cast<std::ptrdiff_t>(tau), x.end(), 0.0);
  return Path(B.grid(), std::move(x));
}

double nonmarkov_map(double x, double alpha, const NonMarkovParams& nm) {
  const double g = 1.0 / (1.0 - alpha);
  if (x > nm.B_level) return std::pow(x - nm.B_level, g);
  if (x < -nm.A) return -std::pow(-(x + nm.A), g);
  return 0.0;
}

Path nonmarkov_solution(const ModelParams& p, const NonMarkovParams& nm, const Path& B) {
  validate(p);
  if (!(nm.A > 0.0) || !(nm.B_level > 0.0))
    throw std::invalid_argument("non-Markov levels A and B must be positive");
  std::vector<double> x(B.size());
  for (std::size_t k = 0; k < x.size(); ++k)
    x[k] = nonmarkov_map(linear_argument(p, B[k]), p.alpha, nm);
  return Path(B.grid(), std::move(x));
}

SkewSolution skew_solution(const ModelParams& p, const CoupledSkewPath& coupled) {
  validate(p);
  if (coupled.theta != p.theta)
    throw std::invalid_argument("coupled path has a different theta");
  const double start = skew_start(p.alpha, p.x0);
  if (std::abs(coupled.x0 - start) > 1e-12 * (1.0 + std::abs(start)))
    throw std::invalid_argument(
        "coupled path must start at (x0)^(1-alpha)/(1-alpha)");
  const double g = 1.0 / (1.0 - p.alpha);
  std::vector<double> x(coupled.skew_B.size());
  for (std::size_t k = 0; k < x.size(); ++k)
    x[k] = signed_power((1.0 - p.alpha) * coupled.skew_B[k], g);
  return SkewSolution{Path(coupled.grid(), std::move(x)), is_known_non_solution(p)};
}

Path reflected_solution_explicit(double alpha, double x0, const Path& B) {
  validate(ModelParams{alpha, 1.0, x0});
  if (x0 < 0.0) throw std::invalid_argument("reflected solution needs x0 >= 0");
  const double c = signed_power(x0, 1.0 - alpha);
  const double g = 1.0 / (1.0 - alpha);
  std::vector<double> x(B.size());
  double running_min = B[0];
  for (std::size_t k = 0; k < x.size(); ++k) {
    running_min = std::min(running_min, B[k]);
    const double push = std::max(0.0, -((1.0 - alpha) * running_min + c));
    x[k] = signed_power((1.0 - alpha) * B[k] + c + push, g);
  }
  return Path(B.grid(), std::move(x));
}

}  // namespace hdp
