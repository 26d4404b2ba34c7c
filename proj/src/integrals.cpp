#include "hdp/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hdp {

namespace {

template <class Term>
PartitionSumResult running_sum(const Path& x, const Path& y, Term term) {
  require_same_grid(x, y);
  std::vector<double> c(x.size());
  c[0] = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k)
    c[k + 1] = c[k] + term(x[k], x[k + 1]) * (y[k + 1] - y[k]);
  return {Path(x.grid(), std::move(c)), x.grid().step()};
}

}  // namespace

PartitionSumResult ito_sum(const Path& integrand, const Path& driver) {
  return running_sum(integrand, driver, [](double a, double) { return a; });
}

PartitionSumResult backward_sum(const Path& integrand, const Path& driver) {
  return running_sum(integrand, driver, [](double, double b) { return b; });
}

PartitionSumResult stratonovich_sum(const Path& integrand, const Path& driver) {
  return running_sum(integrand, driver,
                     [](double a, double b) { return 0.5 * (a + b); });
}

PartitionSumResult bracket_estimate(const Path& f_of_X, const Path& driver) {
  return running_sum(f_of_X, driver, [](double a, double b) { return b - a; });
}

Path apply_fn(const RealFn& f, const Path& x) {
  std::vector<double> v(x.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(x[k]);
  return Path(x.grid(), std::move(v));
}

RealFn mollify(const RealFn& f, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("mollifier width must be positive");
  const double lo = f(-width);
  const double hi = f(width);
  return [f, width, lo, hi](double x) {
    if (std::abs(x) >= width) return f(x);
    return lo + (hi - lo) * (x + width) / (2.0 * width);
  };
}

double sup_abs(const Path& p) {
  double m = 0.0;
  for (double v : p.values()) m = std::max(m, std::abs(v));
  return m;
}

BracketConvergence bracket_convergence(const RealFn& f, const CoupledSkewPath& coupled,
                                       const std::vector<double>& widths) {
  const Path& x = coupled.skew_B;
  const Path& b = coupled.driver_B;
  const Path rough = bracket_estimate(apply_fn(f, x), b).curve;
  BracketConvergence out;
  for (double w : widths) {
    const Path smooth = bracket_estimate(apply_fn(mollify(f, w), x), b).curve;
    double sup = 0.0;
    for (std::size_t k = 0; k < rough.size(); ++k)
      sup = std::max(sup, std::abs(smooth[k] - rough[k]));
    out.widths.push_back(w);
    out.sup_differences.push_back(sup);
  }
  return out;
}

PvReport pv_integral(const Path& X, double exponent, const std::vector<double>& eps_sequence,
                     double tolerance) {
  if (eps_sequence.empty()) throw std::invalid_argument("empty truncation sequence");
  for (std::size_t j = 0; j < eps_sequence.size(); ++j) {
    if (!(eps_sequence[j] > 0.0))
      throw std::invalid_argument("truncation levels must be positive");
    if (j > 0 && !(eps_sequence[j] < eps_sequence[j - 1]))
      throw std::invalid_argument("truncation levels must strictly decrease");
  }
  const double h = X.grid().step();
  PvReport r{eps_sequence, {}, tolerance, false};
  for (double eps : eps_sequence) {
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < X.size(); ++k)
      if (std::abs(X[k]) > eps) sum += signed_power(X[k], exponent);
    r.values.push_back(sum * h);
  }
  const std::size_t n = r.values.size();
  r.cauchy = n >= 2 && std::abs(r.values[n - 1] - r.values[n - 2]) < tolerance;
  return r;
}

std::vector<double> default_pv_eps(const TimeGrid& grid) {
  const double floor = 10.0 * std::sqrt(grid.step());
  std::vector<double> out;
  for (double e = 0.5; e >= floor; e *= 0.5) out.push_back(e);
  return out;
}

Path sde_residual(const ModelParams& p, const Path& X, const Path& driver) {
  validate(p);
  const Path integrand = apply_fn([a = p.alpha](double x) { return std::abs(signed_power(x, a)); }, X);
  const Path s = stratonovich_sum(integrand, driver).curve;
  std::vector<double> r(X.size());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = X[k] - p.x0 - s[k];
  return Path(X.grid(), std::move(r));
}

double default_pv_epsilon(double alpha, const TimeGrid& grid) {
  return std::abs(signed_power((1.0 - alpha) * 10.0 * std::sqrt(grid.step()),
                               1.0 / (1.0 - alpha)));
}

ItoFormResidual ito_form_residual(const ModelParams& p, const Path& X, const Path& driver,
                                  bool use_pv, double pv_epsilon) {
  validate(p);
  if (use_pv && !(pv_epsilon > 0.0))
    throw std::invalid_argument("principal-value truncation must be positive");
  const Path integrand = apply_fn([a = p.alpha](double x) { return std::abs(signed_power(x, a)); }, X);
  const Path ito = ito_sum(integrand, driver).curve;
  const double h = X.grid().step();
  const double e = 2.0 * p.alpha - 1.0;
  std::vector<double> r(X.size());
  double drift = 0.0;
  r[0] = X[0] - p.x0;
  for (std::size_t k = 0; k + 1 < X.size(); ++k) {
    if (p.alpha != 0.0 && (!use_pv || std::abs(X[k]) > pv_epsilon))
      drift += signed_power(X[k], e) * h;
    r[k + 1] = X[k + 1] - p.x0 - ito[k + 1] - 0.5 * p.alpha * drift;
  }
  return {Path(X.grid(), std::move(r)), p.alpha < 0.0 && !use_pv};
}

Path chain_rule_residual(const ChainRuleFunctions& fns, const Path& X, const Path& driver) {
  require_same_grid(X, driver);
  if (!(fns.delta > 0.0)) throw std::invalid_argument("delta must be positive");
  for (int i = 0; i <= 1000; ++i) {
    const double x = fns.delta * (-1.0 + 2.0 * i / 1000.0);
    if (fns.g(x) != 0.0)
      throw std::invalid_argument("g must vanish on [-delta, delta]");
  }
  const double h = X.grid().step();
  std::vector<double> r(X.size());
  const double g0 = fns.g(X[0]);
  double stoch = 0.0, drift = 0.0;
  r[0] = 0.0;
  for (std::size_t k = 0; k + 1 < X.size(); ++k) {
    const double x = X[k];
    const double dg = fns.dg(x);
    const double ph = fns.phi(x);
    stoch += dg * ph * (driver[k + 1] - driver[k]);
    drift += 0.5 * ph * (fns.d2g(x) * ph + dg * fns.dphi(x)) * h;
    r[k + 1] = fns.g(X[k + 1]) - g0 - stoch - drift;
  }
  return Path(X.grid(), std::move(r));
}

}  // namespace hdp
