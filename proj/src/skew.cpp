#include "hdp/skew.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hdp {

SkewCoefficients::SkewCoefficients(double th)
    : theta(th),
      beta_plus(0.5 * (1.0 + th)),
      beta_minus(0.5 * (1.0 - th)),
      kappa(0.5 * (1.0 - th * th)) {
  require_theta(th);
}

void require_theta(double theta) {
  if (!(theta >= -1.0 && theta <= 1.0))
    throw std::invalid_argument("theta must lie in [-1, 1]");
}

const char* to_string(SkewScheme scheme) {
  switch (scheme) {
    case SkewScheme::Exact: return "exact";
    case SkewScheme::DonskerWalk: return "walk";
    case SkewScheme::GridReflection: return "reflection";
  }
  return "?";
}

SkewScheme skew_scheme_from_string(const std::string& name) {
  if (name == "exact") return SkewScheme::Exact;
  if (name == "walk") return SkewScheme::DonskerWalk;
  if (name == "reflection") return SkewScheme::GridReflection;
  throw std::invalid_argument("unknown skew scheme '" + name + "'");
}

double skew_exact_step(double x, double h, double beta_plus, RandomStream& rng,
                       double* dl) {
  // |B^theta| is a reflected Brownian motion whose reflection term is the
  // symmetric local time. Draw its endpoint, then whether the step touched
  // zero, then the local time given a touch.
  const double a = std::abs(x);
  const double w = a + std::sqrt(h) * rng.gaussian();
  const double r = std::abs(w);

  bool hit = (a == 0.0 || w <= 0.0);
  if (!hit) {
    const double e = 2.0 * a * r / h;
    hit = e < 50.0 && rng.uniform() < std::exp(-e);
  }
  if (!hit) {
    *dl = 0.0;
    return x > 0.0 ? r : -r;
  }
  const double ar = a + r;
  const double total = std::sqrt(ar * ar - 2.0 * h * std::log(rng.uniform()));
  *dl = total - ar;
  return rng.uniform() < beta_plus ? r : -r;
}

namespace {

CoupledSkewPath assemble(double theta, double x0, const TimeGrid& grid,
                         std::vector<double> x, std::vector<double> l) {
  std::vector<double> b(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) b[k] = x[k] - x0 - theta * l[k];
  b[0] = 0.0;
  return CoupledSkewPath{Path(grid, std::move(b)), Path(grid, std::move(x)),
                         Path(grid, std::move(l)), theta, x0};
}

CoupledSkewPath simulate_exact(double theta, double x0, const TimeGrid& grid,
                               SeedSpec seed) {
  // Negative theta is the mirror image of |theta| started at -x0.
  const bool mirror = theta < 0.0;
  const double th = std::abs(theta);
  const double start = mirror ? -x0 : x0;
  const double bp = 0.5 * (1.0 + th);
  const double h = grid.step();
  RandomStream rng(seed);

  const std::size_t n = grid.n_nodes();
  std::vector<double> x(n), l(n);
  x[0] = start;
  l[0] = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    double dl;
    x[k] = skew_exact_step(x[k - 1], h, bp, rng, &dl);
    l[k] = l[k - 1] + dl;
  }
  if (mirror)
    for (double& v : x) v = -v;
  return assemble(theta, x0, grid, std::move(x), std::move(l));
}

CoupledSkewPath simulate_walk(double theta, double x0, const TimeGrid& grid,
                              SeedSpec seed) {
  const double sd = std::sqrt(grid.step());
  const double bp = 0.5 * (1.0 + theta);
  RandomStream rng(seed);

  const std::size_t n = grid.n_nodes();
  std::vector<double> x(n), l(n);
  // The walk lives on sqrt(h) Z; the start is snapped onto it after node 0.
  long long j = std::llround(x0 / sd);
  x[0] = x0;
  l[0] = 0.0;
  double lt = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double u = rng.uniform();
    if (j == 0) {
      lt += sd;
      j += (u < bp) ? 1 : -1;
    } else {
      j += (u < 0.5) ? 1 : -1;
    }
    x[k] = static_cast<double>(j) * sd;
    l[k] = lt;
  }
  return assemble(theta, x0, grid, std::move(x), std::move(l));
}

CoupledSkewPath simulate_reflection(double theta, double x0, const TimeGrid& grid,
                                    SeedSpec seed) {
  if (theta != 1.0 && theta != -1.0)
    throw std::invalid_argument("reflection scheme needs theta = +-1");
  if (theta * x0 < 0.0)
    throw std::invalid_argument(
        "reflection scheme needs x0 on the side selected by theta");
  const Path b = sample_brownian(grid, seed);
  const std::size_t n = grid.n_nodes();
  std::vector<double> x(n), l(n);
  double extreme = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double free = x0 + b[k];
    // theta = 1 pushes up by the running minimum, theta = -1 down by the maximum.
    extreme = std::max(extreme, -theta * free);
    l[k] = extreme;
    x[k] = free + theta * extreme;
  }
  return CoupledSkewPath{b, Path(grid, std::move(x)), Path(grid, std::move(l)),
                         theta, x0};
}

}  // namespace

CoupledSkewPath simulate_skew_pair(double theta, double x0, const TimeGrid& grid,
                                   SeedSpec seed, SkewScheme scheme) {
  require_theta(theta);
  if (!std::isfinite(x0)) throw std::invalid_argument("x0 must be finite");
  switch (scheme) {
    case SkewScheme::Exact: return simulate_exact(theta, x0, grid, seed);
    case SkewScheme::DonskerWalk: return simulate_walk(theta, x0, grid, seed);
    case SkewScheme::GridReflection:
      return simulate_reflection(theta, x0, grid, seed);
  }
  throw std::invalid_argument("unknown skew scheme");
}

CoupledSkewPath coarsen(const CoupledSkewPath& c, std::size_t factor) {
  return CoupledSkewPath{coarsen(c.driver_B, factor), coarsen(c.skew_B, factor),
                         coarsen(c.local_time_L, factor), c.theta, c.x0};
}

Path local_time_occupation(const Path& path, double epsilon) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("occupation width must be positive");
  const double w = path.grid().step() / (2.0 * epsilon);
  std::vector<double> out(path.size());
  out[0] = 0.0;
  for (std::size_t k = 1; k < out.size(); ++k)
    out[k] = out[k - 1] + (std::abs(path[k - 1]) <= epsilon ? w : 0.0);
  return Path(path.grid(), std::move(out));
}

double default_occupation_width(const TimeGrid& grid) {
  return 2.0 * std::sqrt(grid.step());
}

Path oscillating_from_skew(const CoupledSkewPath& coupled) {
  const SkewCoefficients c(coupled.theta);
  std::vector<double> y(coupled.skew_B.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    y[k] = c.s(coupled.skew_B[k]);
    if (!std::isfinite(y[k]))
      throw std::invalid_argument(
          "oscillating path undefined: skew path on the side where beta = 0");
  }
  return Path(coupled.grid(), std::move(y));
}

double skew_transition_sample(double theta, double x_start, double t, SeedSpec seed) {
  require_theta(theta);
  if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
  RandomStream rng(seed);
  double dl;
  return skew_exact_step(x_start, t, 0.5 * (1.0 + theta), rng, &dl);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x, double t) {
  return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
}

double skew_density(double theta, double t, double b) {
  require_theta(theta);
  if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
  return (1.0 + theta * sign_of(b)) * normal_pdf(b, t);
}

double skew_cdf(double theta, double t, double b) {
  require_theta(theta);
  if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
  const double phi = normal_cdf(b / std::sqrt(t));
  if (b < 0.0) return (1.0 - theta) * phi;
  return 0.5 * (1.0 - theta) + (1.0 + theta) * (phi - 0.5);
}

}  // namespace hdp
