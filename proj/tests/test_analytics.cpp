#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hdp/analytics.hpp"
#include "hdp/skew.hpp"

using namespace hdp;

TEST_CASE("joint_density_BL") {
  CHECK(joint_density_BL(1.0, 1.0, 0.0, -0.5, 0.2) == 0.0);
  CHECK(joint_density_BL(0.4, 1.3, 0.2, 0.7, 0.3) ==
        doctest::Approx(joint_density_BL(-0.4, 1.3, 0.2, -0.7, 0.3)));
  // Direct evaluation: 2 beta(b) (l + |w0| + |b|) / sqrt(2 pi t^3) exp(-(.)^2 / 2t).
  const double v = 2.0 * 0.75 * 1.5 / std::sqrt(2.0 * std::numbers::pi) * std::exp(-1.125);
  CHECK(joint_density_BL(0.5, 1.0, 0.0, 1.0, 0.5) == doctest::Approx(v));
  CHECK_THROWS_AS(joint_density_BL(0.5, 1.0, 0.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(joint_density_BL(0.5, 0.0, 0.0, 1.0, 0.5), std::invalid_argument);
  CHECK(bl_normalization(0.5, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("joint_density_YB") {
  const SkewCoefficients c(0.5);
  CHECK(joint_density_YB(0.5, 1.0, 1.0, c.r(1.0) + 0.1) == 0.0);
  CHECK(joint_density_YB(0.5, 1.0, 1.0, c.r(1.0) - 0.1) > 0.0);
  CHECK_FALSE(in_yb_support(0.5, 1.0, c.r(1.0)));
  CHECK(in_yb_support(-0.5, -1.0, SkewCoefficients(-0.5).r(-1.0) + 0.1));
  CHECK_THROWS_AS(joint_density_YB(0.0, 1.0, 1.0, 0.0), std::invalid_argument);
  CHECK(yb_normalization(0.5, 1.0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(yb_normalization(-0.5, 1.0) == doctest::Approx(1.0).epsilon(1e-4));
  // Mirror: (theta, y, z) -> (-theta, -y, -z).
  CHECK(joint_density_YB(-0.3, 0.8, -0.6, 0.1) == doctest::Approx(joint_density_YB(0.3, 0.8, 0.6, -0.1)));
}

TEST_CASE("marginals of the (Y, B) density") {
  for (double th : {0.5, -0.4}) {
    for (double z : {-1.5, -0.2, 0.0, 0.9}) CHECK(std::abs(yb_z_marginal(th, 1.0, z) - normal_pdf(z)) < 1e-4);
    const SkewCoefficients c(th);
    for (double y : {-1.2, -0.3, 0.4, 1.7}) {
      const double zmax = c.r(y);
      auto f = [&](double z) { return joint_density_YB(th, 1.0, y, z); };
      const double numeric = th > 0 ? integrate(f, zmax - 14.0 * th, zmax) : integrate(f, zmax, zmax - 14.0 * th);
      CHECK(numeric == doctest::Approx(yb_y_marginal(th, 1.0, y)).epsilon(1e-6));
      // y = s(b) change of variables back to the skew density.
      CHECK(yb_y_marginal(th, 1.0, y) == doctest::Approx(skew_density(th, 1.0, c.r(y)) * c.beta(y)).epsilon(1e-12));
    }
  }
}

TEST_CASE("msd") {
  CHECK(msd(0.0, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(msd(0.0, 1.0, 1.0) == doctest::Approx(1.0 - 2.0 / std::numbers::pi).epsilon(1e-14));
  CHECK(msd(0.5, 0.0, 1.0) == doctest::Approx(0.1875).epsilon(1e-14));
  CHECK(msd(0.3, 0.6, 1.0) == doctest::Approx(msd(0.3, -0.6, 1.0)));
  for (double a : {-0.5, 0.0, 0.5}) {
    CHECK(msd(a, 0.7, 2.5) == doctest::Approx(std::pow(2.5, 1.0 / (1.0 - a)) * msd(a, 0.7, 1.0)));
    for (double th : {0.0, 0.5, 1.0})
      CHECK(msd(a, th, 1.0) == doctest::Approx(msd_quadrature(a, th, 1.0)).epsilon(1e-8));
  }
  CHECK(msd_without_pi_factor(0.0, 1.0, 1.0) < 0.0);
  CHECK_THROWS_AS(msd(1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("reversed drifts") {
  CHECK(reversed_drift_y(0.5, 1.0, 0.5, 0.0, -1.0) == 0.0);
  CHECK(reversed_drift_y(0.5, 1.0, 1.0, 1.0, 0.0) == 0.0);
  // beta(1) = 0.75 and 2 y beta^2 = 1.125 at theta = 0.5.
  const double want = (0.5 / 0.75) * (1.0 / 1.125 - 1.125 / (0.25 * 0.5));
  CHECK(reversed_drift_y(0.5, 1.0, 0.5, 1.0, 0.0) == doctest::Approx(want));
  CHECK(reversed_drift_z(0.5, 1.0, 0.5, 1.0, 0.0) == doctest::Approx(want / SkewCoefficients(0.5).sigma(1.0)));
  CHECK_THROWS_AS(reversed_drift_y(0.5, 1.0, 0.5, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(reversed_drift_y(0.0, 1.0, 0.5, 1.0, 0.0), std::invalid_argument);

  CHECK(reversed_drift_reflected(0.7, 0.0) == 0.0);
  CHECK(reversed_drift_reflected(0.5, 1.0) == doctest::Approx(2.0));
  CHECK(reversed_drift_reflected(0.5, 3.0) == doctest::Approx(3.0 * reversed_drift_reflected(0.5, 1.0)));
  CHECK_THROWS_AS(reversed_drift_reflected(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("reversed pair keeps the shared-noise relation") {
  const auto g = make_grid(0.5, 500);
  const auto [y, z] = sample_forward_terminal(0.5, 1.0, SeedSpec{81, 0});
  CHECK(in_yb_support(0.5, y, z));
  const auto r = simulate_reversed_pair(0.5, 1.0, y, z, g, SeedSpec{81, 1});
  CHECK(r.Y[0] == y);
  CHECK(r.B[0] == z);
  const SkewCoefficients c(0.5);
  for (std::size_t k = 0; k < g.n_steps(); ++k) {
    if (r.Y[k] == 0.0 || r.Y[k] == r.Y[k + 1]) continue;
    CHECK(r.Y[k + 1] - r.Y[k] == doctest::Approx(c.sigma(r.Y[k]) * (r.B[k + 1] - r.B[k])).epsilon(1e-9));
  }
  for (std::size_t k = 0; k < g.n_nodes(); ++k) CHECK((r.Y[k] == 0.0 || in_yb_support(0.5, r.Y[k], r.B[k])));
  CHECK_THROWS_AS(simulate_reversed_pair(0.5, 1.0, 1.0, 1.0, g, SeedSpec{}), std::invalid_argument);
  CHECK_THROWS_AS(simulate_reversed_pair(0.5, 0.4, y, z, g, SeedSpec{}), std::invalid_argument);

  const auto b = simulate_reversed_bessel(0.5, 1.0, y, z, g, SeedSpec{81, 2});
  for (std::size_t k = 0; k < g.n_nodes(); ++k) CHECK((b.Y[k] == 0.0 || in_yb_support(0.5, b.Y[k], b.B[k]) ||
                                                       std::abs(c.r(b.Y[k]) - b.B[k]) < 1e-12));

  const auto [x1, z1] = sample_forward_terminal(1.0, 1.0, SeedSpec{81, 3});
  const auto f = simulate_reversed_reflected(1.0, x1, z1, g, SeedSpec{81, 4});
  for (std::size_t k = 0; k < g.n_nodes(); ++k) CHECK(f.Y[k] >= 0.0);
}

TEST_CASE("heat identity by finite differences") {
  const auto a = heat_check_density(0.5, 1.0, 1.0, 0.0, 1e-3);
  CHECK(a.relative < 1e-4);
  const auto b = heat_check_density(0.5, 1.0, 1.0, 0.0, 5e-4);
  const double ratio = a.residual / b.residual;
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);
  CHECK_THROWS_AS(heat_check_density(0.5, 1.0, 1.0, 1.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(heat_check_density(0.5, 1.0, 0.0, -1.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(heat_check_density(0.5, 0.0, 1.0, 0.0, 1e-3), std::invalid_argument);
}

TEST_CASE("integrability_conditions") {
  auto f = integrability_conditions(0.5);
  CHECK((f.ito_integrand_ok && f.drift_lebesgue_ok && f.drift_pv_ok));
  for (double a : {0.0, -0.5}) {
    f = integrability_conditions(a);
    CHECK((f.ito_integrand_ok && !f.drift_lebesgue_ok && f.drift_pv_ok));
  }
  CHECK_THROWS_AS(integrability_conditions(1.0), std::invalid_argument);
}
