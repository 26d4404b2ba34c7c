#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hdp/analytics.hpp"
#include "hdp/parallel.hpp"
#include "hdp/skew.hpp"
#include "hdp/stats.hpp"

using namespace hdp;

namespace {

double identity_gap(const CoupledSkewPath& c) {
  double gap = 0.0;
  for (std::size_t k = 0; k < c.skew_B.size(); ++k)
    gap = std::max(gap, std::abs(c.skew_B[k] - c.x0 - c.driver_B[k] - c.theta * c.local_time_L[k]));
  return gap;
}

bool nondecreasing_from_zero(const Path& p) {
  if (p[0] != 0.0) return false;
  for (std::size_t k = 1; k < p.size(); ++k)
    if (p[k] < p[k - 1]) return false;
  return true;
}

}  // namespace

TEST_CASE("skew coefficients") {
  for (double th : {-1.0, -0.4, 0.0, 0.3, 1.0}) {
    const SkewCoefficients c(th);
    CHECK(c.beta_plus + c.beta_minus == doctest::Approx(1.0));
    CHECK(c.kappa == doctest::Approx(0.5 * (1 - th * th)));
  }
  const SkewCoefficients c(0.5);
  CHECK(c.s(1.0) == doctest::Approx(4.0 / 3.0));
  CHECK(c.sigma(2.0) * c.beta(2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(SkewCoefficients(1.5), std::invalid_argument);
}

TEST_CASE("s inverts r to rounding") {
  RandomStream rng(SeedSpec{31, 0});
  double worst = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    const SkewCoefficients c(-0.999 + 1.998 * rng.uniform());
    const double x = 10.0 * rng.gaussian();
    worst = std::max(worst, std::abs(c.s(c.r(x)) - x) / std::max(1.0, std::abs(x)));
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("coupled identity holds for every scheme") {
  const auto g = make_grid(1.0, 2000);
  for (double th : {-0.7, 0.0, 0.5, 1.0}) {
    for (auto scheme : {SkewScheme::Exact, SkewScheme::DonskerWalk}) {
      const auto c = simulate_skew_pair(th, 0.3, g, SeedSpec{32, 1}, scheme);
      CHECK(identity_gap(c) <= 1e-12);
      CHECK(nondecreasing_from_zero(c.local_time_L));
    }
  }
  const auto r = simulate_skew_pair(-1.0, 0.0, g, SeedSpec{32, 2}, SkewScheme::GridReflection);
  CHECK(identity_gap(r) <= 1e-12);
  CHECK_THROWS_AS(simulate_skew_pair(0.5, 0.0, g, SeedSpec{}, SkewScheme::GridReflection),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_skew_pair(1.2, 0.0, g, SeedSpec{}), std::invalid_argument);
}

TEST_CASE("theta = 0 reduces to x0 + B") {
  const auto c = simulate_skew_pair(0.0, 0.25, make_grid(1.0, 1000), SeedSpec{33, 0});
  for (std::size_t k = 0; k < c.skew_B.size(); ++k) {
    CHECK(std::abs(c.skew_B[k] - 0.25 - c.driver_B[k]) < 1e-14);
  }
}

TEST_CASE("theta = +-1 is the reflection of the driver") {
  for (double th : {1.0, -1.0}) {
    // Grid reflection: node-exact Skorokhod map of the grid driver.
    const auto c = simulate_skew_pair(th, 0.0, make_grid(1.0, 1000), SeedSpec{34, 0},
                                      SkewScheme::GridReflection);
    double ext = 0.0, worst = 0.0;
    for (std::size_t k = 0; k < c.skew_B.size(); ++k) {
      ext = th > 0 ? std::min(ext, c.driver_B[k]) : std::max(ext, c.driver_B[k]);
      worst = std::max(worst, std::abs(c.skew_B[k] - (c.driver_B[k] - ext)));
      worst = std::max(worst, std::abs(c.local_time_L[k] - std::abs(ext)));
    }
    CHECK(worst < 1e-12);

    // Exact scheme: L is the running extremum between nodes too, so it
    // dominates the grid extremum and keeps th * B^theta >= 0.
    const auto e = simulate_skew_pair(th, 0.0, make_grid(1.0, 1000), SeedSpec{34, 1});
    ext = 0.0;
    for (std::size_t k = 0; k < e.skew_B.size(); ++k) {
      ext = th > 0 ? std::min(ext, e.driver_B[k]) : std::max(ext, e.driver_B[k]);
      CHECK(e.local_time_L[k] >= std::abs(ext) - 1e-12);
      CHECK(th * e.skew_B[k] >= 0.0);
    }
  }
}

TEST_CASE("sign law of the coupled path") {
  for (double t : {0.25, 1.0}) {
    const auto pos = parallel_map(20000, 0, [&](std::size_t i) {
      return simulate_skew_pair(0.6, 0.0, make_grid(t, 50), SeedSpec{35, i}).skew_B.back() >= 0.0
                 ? 1.0
                 : 0.0;
    });
    const auto m = mc_mean_ci(pos);
    CHECK(std::abs(m.value - 0.8) <= 3.0 * m.std_error);
  }
}

TEST_CASE("local_time_occupation") {
  const auto g = make_grid(1.0, 100);
  CHECK(local_time_occupation(Path(g, 5.0), 0.1).back() == 0.0);
  CHECK(local_time_occupation(Path(g, 0.0), 0.1).back() == doctest::Approx(1.0 / 0.2));
  CHECK_THROWS_AS(local_time_occupation(Path(g, 0.0), 0.0), std::invalid_argument);

  const auto fine = make_grid(1.0, 100000);
  const auto l = parallel_map(1000, 0, [&](std::size_t i) {
    return local_time_occupation(sample_brownian(fine, SeedSpec{36, i}), 0.02).back();
  });
  const auto m = mc_mean_ci(l);
  CHECK(std::abs(m.value - std::sqrt(2.0 / std::numbers::pi)) <= 3.0 * m.std_error);
}

TEST_CASE("occupation estimate agrees with the constructed local time") {
  const auto g = make_grid(1.0, 100000);
  const auto rows = parallel_map(200, 0, [&](std::size_t i) {
    const auto c = simulate_skew_pair(0.5, 0.0, g, SeedSpec{37, i});
    return std::pair{local_time_occupation(c.skew_B, default_occupation_width(g)).back(),
                     c.local_time_L.back()};
  });
  double occ = 0.0, built = 0.0;
  for (auto [a, b] : rows) {
    occ += a;
    built += b;
  }
  CHECK(std::abs(occ - built) / built < 0.10);
}

TEST_CASE("oscillating_from_skew") {
  const auto c = simulate_skew_pair(0.5, 0.0, make_grid(1.0, 1000), SeedSpec{38, 0});
  const Path y = oscillating_from_skew(c);
  const SkewCoefficients k(0.5);
  for (std::size_t i = 0; i < y.size(); ++i) {
    CHECK(k.r(y[i]) == doctest::Approx(c.skew_B[i]).epsilon(1e-14));
    // 2 Y beta(Y)^2 - B = theta (L + |B^theta|) >= 0.
    CHECK(2.0 * y[i] * k.beta(y[i]) * k.beta(y[i]) - c.driver_B[i] >= -1e-12);
  }
  const auto c0 = simulate_skew_pair(0.0, 0.0, make_grid(1.0, 10), SeedSpec{38, 1});
  const Path y0 = oscillating_from_skew(c0);
  for (std::size_t i = 0; i < y0.size(); ++i) CHECK(y0[i] == 2.0 * c0.skew_B[i]);
}

TEST_CASE("skew_transition_sample") {
  const auto n = 100000;
  const auto half = parallel_map(n, 0, [](std::size_t i) {
    return skew_transition_sample(0.5, 0.0, 1.0, SeedSpec{39, i});
  });
  std::vector<double> pos;
  for (double x : half) pos.push_back(x >= 0.0);
  const auto m = mc_mean_ci(pos);
  CHECK(std::abs(m.value - 0.75) <= 3.0 * m.std_error);
  CHECK(ks_test(half, [](double b) { return skew_cdf(0.5, 1.0, b); }).p_value > 0.001);

  const auto refl = parallel_map(20000, 0, [](std::size_t i) {
    return skew_transition_sample(1.0, 0.0, 2.0, SeedSpec{40, i});
  });
  for (double x : refl) REQUIRE(x >= 0.0);
  CHECK(ks_test(refl, [](double x) { return 2.0 * normal_cdf(x / std::sqrt(2.0)) - 1.0; }).p_value >
        0.001);

  const auto plain = parallel_map(20000, 0, [](std::size_t i) {
    return skew_transition_sample(0.0, 1.5, 1.0, SeedSpec{41, i});
  });
  CHECK(ks_test(plain, [](double x) { return normal_cdf(x - 1.5); }).p_value > 0.001);
  CHECK_THROWS_AS(skew_transition_sample(0.5, 0.0, 0.0, SeedSpec{}), std::invalid_argument);
}

TEST_CASE("skew_density") {
  CHECK(skew_density(0.0, 1.0, 0.3) == doctest::Approx(normal_pdf(0.3)));
  CHECK(skew_density(1.0, 1.0, -0.3) == 0.0);
  CHECK_THROWS_AS(skew_density(0.5, 0.0, 1.0), std::invalid_argument);
  for (double th : {-0.6, 0.3, 1.0}) {
    auto f = [&](double b) { return skew_density(th, 2.0, b); };
    const double cut = 10.0 * std::sqrt(2.0);
    CHECK(integrate(f, -cut, 0.0) + integrate(f, 0.0, cut) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("mirror symmetry in theta") {
  // -B^theta is skew Brownian motion with -theta.
  const auto neg = parallel_map(20000, 0, [](std::size_t i) {
    return -skew_transition_sample(-0.4, 0.0, 1.0, SeedSpec{42, i});
  });
  CHECK(ks_test(neg, [](double b) { return skew_cdf(0.4, 1.0, b); }).p_value > 0.001);
}

TEST_CASE("walk scheme spreads like Brownian motion") {
  const auto l = parallel_map(4000, 0, [](std::size_t i) {
    const auto c = simulate_skew_pair(0.0, 0.0, make_grid(1.0, 2500), SeedSpec{43, i},
                                      SkewScheme::DonskerWalk);
    return c.skew_B.back();
  });
  const auto v = mc_variance(l);
  CHECK(std::abs(v.value - 1.0) <= 3.0 * v.std_error);
}
