#include "hdp/analytics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hdp/solutions.hpp"

namespace hdp {

namespace {

constexpr double kPi = std::numbers::pi;

void require_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("time must be positive");
}

void require_nonzero_theta(double theta) {
  require_theta(theta);
  if (theta == 0.0) throw std::invalid_argument("theta must be nonzero here");
}

// 2 y beta(y)^2 - z; equals theta (L + |B^theta|) on the support.
double wedge_distance(const SkewCoefficients& c, double y, double z) {
  const double b = c.beta(y);
  return 2.0 * y * b * b - z;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol, &err);
}

double joint_density_BL(double theta, double t, double w0, double b, double l) {
  require_theta(theta);
  require_time(t);
  if (!(l > 0.0)) throw std::invalid_argument("local time value must be positive");
  const SkewCoefficients c(theta);
  const double m = l + std::abs(w0) + std::abs(b);
  return 2.0 * c.beta(b) * m / std::sqrt(2.0 * kPi * t * t * t) * std::exp(-m * m / (2.0 * t));
}

bool in_yb_support(double theta, double y, double z) {
  const SkewCoefficients c(theta);
  return (c.r(y) - z) / theta > 0.0;
}

double joint_density_YB(double theta, double t, double y, double z) {
  require_nonzero_theta(theta);
  require_time(t);
  if (!in_yb_support(theta, y, z)) return 0.0;
  const SkewCoefficients c(theta);
  const double b = c.beta(y);
  const double d = wedge_distance(c, y, z);
  return 2.0 * b * b * d / (theta * std::abs(theta) * std::sqrt(2.0 * kPi * t * t * t)) *
         std::exp(-d * d / (2.0 * theta * theta * t));
}

double yb_y_marginal(double theta, double t, double y) {
  require_nonzero_theta(theta);
  require_time(t);
  const SkewCoefficients c(theta);
  const double b = c.beta(y);
  return 2.0 * b * b * normal_pdf(c.r(y), t);
}

double yb_z_marginal(double theta, double t, double z) {
  require_nonzero_theta(theta);
  require_time(t);
  if (theta < 0.0) return yb_z_marginal(-theta, t, -z);
  const SkewCoefficients c(theta);
  const double lo = c.s(z);
  const double hi = c.s(std::abs(z) + 14.0 * std::sqrt(t));
  auto f = [&](double y) { return joint_density_YB(theta, t, y, z); };
  if (lo >= 0.0) return integrate(f, lo, hi, 1e-12);
  return integrate(f, lo, 0.0, 1e-12) + integrate(f, 0.0, hi, 1e-12);
}

double bl_normalization(double theta, double t) {
  require_theta(theta);
  require_time(t);
  const double cut = 12.0 * std::sqrt(t);
  auto inner = [&](double b) {
    return integrate([&](double l) { return l > 0.0 ? joint_density_BL(theta, t, 0.0, b, l) : 0.0; },
                     0.0, cut, 1e-12);
  };
  return integrate(inner, -cut, 0.0) + integrate(inner, 0.0, cut);
}

double yb_normalization(double theta, double t) {
  require_nonzero_theta(theta);
  require_time(t);
  if (theta < 0.0) return yb_normalization(-theta, t);
  const SkewCoefficients c(theta);
  const double sd = std::sqrt(t);
  // In z the density decays on the scale theta sqrt(t) below r(y).
  auto inner = [&](double y) {
    const double top = c.r(y);
    return integrate([&](double z) { return joint_density_YB(theta, t, y, z); },
                     top - 13.0 * theta * sd, top, 1e-12);
  };
  return integrate(inner, c.s(-12.0 * sd), 0.0) + integrate(inner, 0.0, c.s(12.0 * sd));
}

namespace {

double msd_impl(double alpha, double theta, double t, double mean_factor) {
  if (!(alpha > -1.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (-1, 1)");
  require_theta(theta);
  require_time(t);
  const double q = 1.0 - alpha;
  const double scale = std::pow(2.0 * t * q * q, 1.0 / q);
  const double second = boost::math::tgamma((3.0 - alpha) / (2.0 * q)) / std::sqrt(kPi);
  const double g1 = boost::math::tgamma((2.0 - alpha) / (2.0 * q));
  return scale * (second - theta * theta * mean_factor * g1 * g1);
}

}  // namespace

double msd(double alpha, double theta, double t) {
  return msd_impl(alpha, theta, t, 1.0 / kPi);
}

double msd_without_pi_factor(double alpha, double theta, double t) {
  return msd_impl(alpha, theta, t, 1.0);
}

double msd_quadrature(double alpha, double theta, double t) {
  if (!(alpha > -1.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (-1, 1)");
  require_theta(theta);
  require_time(t);
  const double q = 1.0 - alpha;
  const double cut = 14.0 * std::sqrt(t);
  auto x_of = [&](double b) { return signed_power(q * b, 1.0 / q); };
  auto m1 = [&](double b) { return x_of(b) * skew_density(theta, t, b); };
  auto m2 = [&](double b) { return x_of(b) * x_of(b) * skew_density(theta, t, b); };
  const double e1 = integrate(m1, -cut, 0.0, 1e-13) + integrate(m1, 0.0, cut, 1e-13);
  const double e2 = integrate(m2, -cut, 0.0, 1e-13) + integrate(m2, 0.0, cut, 1e-13);
  return e2 - e1 * e1;
}

ReversedDrift::ReversedDrift(double th, double horizon) : theta(th), horizon(horizon) {
  require_nonzero_theta(th);
  require_time(horizon);
}

double ReversedDrift::by(double s, double y, double z) const {
  if (!(s >= 0.0 && s <= horizon)) throw std::invalid_argument("s must lie in [0, T]");
  if (y == 0.0 || s == horizon) return 0.0;
  if (!in_yb_support(theta, y, z))
    throw std::invalid_argument("reversed drift: point outside the support");
  const SkewCoefficients c(theta);
  const double d = wedge_distance(c, y, z);
  return theta * sign_of(y) / c.beta(y) *
         (1.0 / d - d / (theta * theta * (horizon - s)));
}

double ReversedDrift::bz(double s, double y, double z) const {
  if (y == 0.0) return 0.0;
  return by(s, y, z) / SkewCoefficients(theta).sigma(y);
}

double reversed_drift_y(double theta, double T, double s, double y, double z) {
  return ReversedDrift(theta, T).by(s, y, z);
}

double reversed_drift_z(double theta, double T, double s, double y, double z) {
  return ReversedDrift(theta, T).bz(s, y, z);
}

double reversed_drift_reflected(double s, double z) {
  if (!(s > 0.0)) throw std::invalid_argument("s must be positive");
  if (z < 0.0) throw std::invalid_argument("z must be nonnegative");
  return z / s;
}

std::pair<double, double> sample_forward_terminal(double theta, double T, SeedSpec seed) {
  require_theta(theta);
  require_time(T);
  RandomStream rng(seed);
  double l;
  const double x = skew_exact_step(0.0, T, 0.5 * (1.0 + theta), rng, &l);
  const double z = x - theta * l;
  if (theta == 1.0 || theta == -1.0) return {x, z};
  return {SkewCoefficients(theta).s(x), z};
}

ReversedPair simulate_reversed_pair(double theta, double T, double y, double z,
                                    const TimeGrid& grid, SeedSpec seed) {
  require_nonzero_theta(theta);
  if (std::abs(theta) == 1.0)
    throw std::invalid_argument("theta = +-1: use the reflected reversal");
  if (grid.t_end() > T * (1.0 + 1e-12))
    throw std::invalid_argument("grid extends past the horizon");
  if (!in_yb_support(theta, y, z))
    throw std::invalid_argument("terminal point outside the support");
  const ReversedDrift drift(theta, T);
  const SkewCoefficients c(theta);
  const double h = grid.step();
  const double sd = std::sqrt(h);
  RandomStream rng(seed);

  std::vector<double> ys(grid.n_nodes()), zs(grid.n_nodes());
  ys[0] = y;
  zs[0] = z;
  std::size_t reflections = 0;
  for (std::size_t k = 0; k + 1 < ys.size(); ++k) {
    const double s = std::min(grid.time(k), T);
    const double bz = drift.bz(s, y, z);
    const double dw = sd * rng.gaussian();
    double db = bz * h + dw;
    double y1 = y + c.sigma(y) * db;
    double z1 = z + db;
    if (!in_yb_support(theta, y1, z1)) {
      ++reflections;
      db = bz * h - dw;
      y1 = y + c.sigma(y) * db;
      z1 = z + db;
      if (!in_yb_support(theta, y1, z1)) {
        y1 = y;
        z1 = z;
      }
    }
    y = ys[k + 1] = y1;
    z = zs[k + 1] = z1;
  }
  return {Path(grid, std::move(ys)), Path(grid, std::move(zs)), reflections};
}

ReversedPair simulate_reversed_bessel(double theta, double T, double y, double z,
                                      const TimeGrid& grid, SeedSpec seed) {
  require_nonzero_theta(theta);
  if (std::abs(theta) == 1.0)
    throw std::invalid_argument("theta = +-1: use the reflected reversal");
  if (grid.t_end() > T * (1.0 + 1e-12))
    throw std::invalid_argument("grid extends past the horizon");
  if (!in_yb_support(theta, y, z))
    throw std::invalid_argument("terminal point outside the support");
  const SkewCoefficients c(theta);
  const double h = grid.step();
  const double sd = std::sqrt(h);
  RandomStream rng(seed);

  const double l_end = (c.r(y) - z) / theta;
  double v = l_end + std::abs(c.r(y));
  double l = l_end;
  double sgn = sign_of(y);
  std::vector<double> ys(grid.n_nodes()), zs(grid.n_nodes());
  ys[0] = y;
  zs[0] = z;
  for (std::size_t k = 0; k + 1 < ys.size(); ++k) {
    const double left = T - grid.time(k);
    v += (1.0 / v - v / left) * h + sd * rng.gaussian();
    v = std::abs(v);
    if (v <= l) {
      l = v;
      sgn = rng.uniform() < c.beta_plus ? 1.0 : -1.0;
    }
    const double x = sgn * (v - l);
    ys[k + 1] = c.s(x);
    zs[k + 1] = x - theta * l;
  }
  return {Path(grid, std::move(ys)), Path(grid, std::move(zs)), 0};
}

ReversedPair simulate_reversed_reflected(double T, double z1, double z, const TimeGrid& grid,
                                         SeedSpec seed) {
  require_time(T);
  if (grid.t_end() > T * (1.0 + 1e-12))
    throw std::invalid_argument("grid extends past the horizon");
  if (z1 < 0.0 || z > z1)
    throw std::invalid_argument("terminal point needs 0 <= B1 and B <= B1");
  const double h = grid.step();
  const double sd = std::sqrt(h);
  RandomStream rng(seed);

  std::vector<double> xs(grid.n_nodes()), zs(grid.n_nodes());
  xs[0] = z1;
  zs[0] = z;
  double x = z1;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double left = T - grid.time(k);
    const double drift = left > 0.0 ? -reversed_drift_reflected(left, x) : 0.0;
    const double db = drift * h + sd * rng.gaussian();
    const double free = x + db;
    const double push = free < 0.0 ? -2.0 * free : 0.0;
    // Going backwards the local time is given back, so Bbar gains the push
    // on top of the reflected increment.
    z += db + 2.0 * push;
    x = free + push;
    xs[k + 1] = x;
    zs[k + 1] = z;
  }
  return {Path(grid, std::move(xs)), Path(grid, std::move(zs)), 0};
}

HeatCheck heat_check_density(double theta, double u, double y, double z, double fd_step) {
  require_nonzero_theta(theta);
  if (std::abs(theta) == 1.0) throw std::invalid_argument("theta must lie in (-1, 1)");
  require_time(u);
  const double d = fd_step;
  if (!(d > 0.0) || !(u > 2.0 * d)) throw std::invalid_argument("fd_step too large for u");
  if (y == 0.0) throw std::invalid_argument("heat check: y must be nonzero");
  if (!in_yb_support(theta, y, z))
    throw std::invalid_argument("heat check: point outside the support");
  // Every stencil point has to sit in the same smooth piece of p.
  for (double dy : {-d, d})
    for (double dz : {-d, d})
      if (sign_of(y + dy) != sign_of(y) || !in_yb_support(theta, y + dy, z + dz))
        throw std::invalid_argument("heat check: point too close to y = 0 or the boundary");

  auto p = [&](double uu, double yy, double zz) { return joint_density_YB(theta, uu, yy, zz); };
  const double p0 = p(u, y, z);
  const double dpu = (p(u + d, y, z) - p(u - d, y, z)) / (2.0 * d);
  const double pyy = (p(u, y + d, z) - 2.0 * p0 + p(u, y - d, z)) / (d * d);
  const double pzz = (p(u, y, z + d) - 2.0 * p0 + p(u, y, z - d)) / (d * d);
  const double pyz = (p(u, y + d, z + d) - p(u, y + d, z - d) - p(u, y - d, z + d) +
                      p(u, y - d, z - d)) / (4.0 * d * d);
  const double sg = SkewCoefficients(theta).sigma(y);
  const double lp = 0.5 * sg * sg * pyy + sg * pyz + 0.5 * pzz;
  const double res = std::abs(lp - dpu);
  return {lp, dpu, res, res / std::max(std::abs(dpu), p0 / u)};
}

IntegrabilityFlags integrability_conditions(double alpha) {
  if (!(alpha > -1.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (-1, 1)");
  return {alpha > -1.0, alpha > 0.0, alpha > -1.0};
}

}  // namespace hdp
