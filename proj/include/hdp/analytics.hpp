#pragma once

#include <cstddef>
#include <functional>

#include "hdp/paths.hpp"
#include "hdp/rng.hpp"
#include "hdp/skew.hpp"

namespace hdp {

/// Adaptive Gauss-Kronrod quadrature of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10);

/// Joint density of (B^theta_t, L_t) for a start w0, at b and l > 0.
double joint_density_BL(double theta, double t, double w0, double b, double l);

/// theta^-1 (r(y) - z) > 0.
bool in_yb_support(double theta, double y, double z);

/// Joint density of (Y^theta_t, B_t) started at (0, 0); 0 outside the support.
double joint_density_YB(double theta, double t, double y, double z);

/// Closed-form y-marginal 2 beta(y)^2 phi_t(r(y)).
double yb_y_marginal(double theta, double t, double y);

/// Numerical z-marginal: integral of joint_density_YB over y.
double yb_z_marginal(double theta, double t, double z);

/// Double integrals of the joint densities over their domains (w0 = 0 for BL).
double bl_normalization(double theta, double t);
double yb_normalization(double theta, double t);

/// Var X^theta_t for X_0 = 0.
double msd(double alpha, double theta, double t);
/// Same expression without the 1/pi on the squared-mean term. Kept to show
/// that it disagrees with simulation (it is negative at alpha = 0, theta = 1).
double msd_without_pi_factor(double alpha, double theta, double t);
/// Var X^theta_t computed by quadrature against the skew density.
double msd_quadrature(double alpha, double theta, double t);

/// Drifts of the reversed pair (Ybar, Bbar) on [0, T).
struct ReversedDrift {
  double theta;
  double horizon;

  ReversedDrift(double theta, double horizon);
  double by(double s, double y, double z) const;
  double bz(double s, double y, double z) const;
};

double reversed_drift_y(double theta, double T, double s, double y, double z);
double reversed_drift_z(double theta, double T, double s, double y, double z);

/// z / s: minus the log-derivative of the reflected density at time s.
double reversed_drift_reflected(double s, double z);

struct ReversedPair {
  Path Y;
  Path B;
  std::size_t wedge_reflections = 0;  // steps whose noise was mirrored to stay in the support
};

/// Forward draw of (Y^theta_T, B_T) from (0, 0), exact.
std::pair<double, double> sample_forward_terminal(double theta, double T, SeedSpec seed);

/// Euler scheme for the reversed pair started at (y, z) at reversed time 0,
/// over grid (grid.t_end() <= T). Ybar and Bbar share the noise and
/// dYbar = sigma(Ybar) dBbar holds on every step.
ReversedPair simulate_reversed_pair(double theta, double T, double y, double z,
                                    const TimeGrid& grid, SeedSpec seed);

/// Reversal built without the reversed SDE: V = (2 Y beta(Y)^2 - B) / theta is
/// a Bessel(3) process, so reversed it is a Bessel(3) bridge to 0 (Euler
/// steps), the local time is min(L_T, running minimum of the bridge), and
/// each return of |B^theta| to 0 draws a fresh excursion sign.
ReversedPair simulate_reversed_bessel(double theta, double T, double y, double z,
                                      const TimeGrid& grid, SeedSpec seed);

/// Reflected case theta = 1: Bbar1 is reflected at 0 with drift -b(T - s, Bbar1),
/// Bbar takes the same noise and drift without the reflection. Returns
/// (Bbar1, Bbar) in (Y, B).
ReversedPair simulate_reversed_reflected(double T, double z1, double z,
                                         const TimeGrid& grid, SeedSpec seed);

struct HeatCheck {
  double lp;        // finite-difference generator applied to p
  double dp_du;     // finite-difference time derivative
  double residual;  // |lp - dp_du|
  double relative;  // residual / max(|dp_du|, p / u)
};

HeatCheck heat_check_density(double theta, double u, double y, double z, double fd_step);

struct IntegrabilityFlags {
  bool ito_integrand_ok;
  bool drift_lebesgue_ok;
  bool drift_pv_ok;
};

IntegrabilityFlags integrability_conditions(double alpha);

}  // namespace hdp
