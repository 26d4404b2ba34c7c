#pragma once

#include <string>

#include "hdp/paths.hpp"
#include "hdp/rng.hpp"

namespace hdp {

/// sign with sign(0) = 0.
inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// Two-valued coefficients attached to a skewness theta in [-1, 1].
struct SkewCoefficients {
  double theta;
  double beta_plus;
  double beta_minus;
  double kappa;

  explicit SkewCoefficients(double theta);

  double sigma(double x) const { return 2.0 / (1.0 + theta * sign_of(x)); }
  double beta(double x) const { return 0.5 * (1.0 + theta * sign_of(x)); }
  double r(double x) const { return x * beta(x); }
  /// Inverse of r; infinite on the side where beta vanishes (theta = +-1).
  double s(double x) const { return x * sigma(x); }
};

/// Throws std::invalid_argument unless theta lies in [-1, 1].
void require_theta(double theta);

/// Jointly simulated driver B, skew Brownian motion B^theta and the symmetric
/// local time L of B^theta at 0, with B^theta = x0 + B + theta * L at every node.
struct CoupledSkewPath {
  Path driver_B;
  Path skew_B;
  Path local_time_L;
  double theta;
  double x0;

  const TimeGrid& grid() const { return skew_B.grid(); }
};

/// Keeps every factor-th node of all three paths.
CoupledSkewPath coarsen(const CoupledSkewPath& coupled, std::size_t factor);

enum class SkewScheme {
  // Node values drawn from the exact transition of (|B^theta|, L) over each
  // step, with the excursion sign chosen at each hit of zero.
  Exact,
  // Lattice walk with steps of size sqrt(h): biased at 0, symmetric elsewhere.
  DonskerWalk,
  // theta = +-1 only: Skorokhod reflection of a Gaussian grid driver.
  GridReflection,
};

const char* to_string(SkewScheme scheme);
SkewScheme skew_scheme_from_string(const std::string& name);

CoupledSkewPath simulate_skew_pair(double theta, double x0, const TimeGrid& grid,
                                   SeedSpec seed,
                                   SkewScheme scheme = SkewScheme::Exact);

/// One exact transition of skew Brownian motion over time h from x.
/// Returns the new state and stores the local-time increment in *dl.
double skew_exact_step(double x, double h, double beta_plus, RandomStream& rng,
                       double* dl);

/// Occupation-time local time (1/2eps) * int_0^t 1{|X_s| <= eps} ds as a
/// left-point Riemann sum on the path's grid.
Path local_time_occupation(const Path& path, double epsilon);

/// Default band half-width 2 sqrt(h).
double default_occupation_width(const TimeGrid& grid);

/// Y = s(B^theta), so that r(Y) equals the skew path at every node. Throws
/// when theta = +-1 and the path sits on the side where s is infinite.
Path oscillating_from_skew(const CoupledSkewPath& coupled);

/// Exact draw of B^theta_t started at x_start.
double skew_transition_sample(double theta, double x_start, double t, SeedSpec seed);

/// Density (1 + theta sign b) phi_t(b) of B^theta_t started at 0.
double skew_density(double theta, double t, double b);
double skew_cdf(double theta, double t, double b);

/// Standard normal cdf and the N(0, t) density.
double normal_cdf(double x);
double normal_pdf(double x, double t = 1.0);

}  // namespace hdp
