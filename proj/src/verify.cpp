#include "hdp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hdp/analytics.hpp"
#include "hdp/integrals.hpp"
#include "hdp/parallel.hpp"
#include "hdp/skew.hpp"
#include "hdp/solutions.hpp"

namespace hdp {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Master seed of one experiment inside a criterion.
std::uint64_t experiment_seed(const VerifyOptions& o, int criterion, int experiment) {
  return mix(o.seed ^ mix(static_cast<std::uint64_t>(criterion) * 1000 +
                          static_cast<std::uint64_t>(experiment)));
}

std::string fmt(double v) { return format_double(v); }

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

VerificationReport make_report(std::string name, int criterion, double measured,
                               double reference, double tolerance, bool pass) {
  VerificationReport r;
  r.check_name = std::move(name);
  r.measured = measured;
  r.reference = reference;
  r.tolerance = tolerance;
  r.pass = pass;
  r.metadata["criterion"] = std::to_string(criterion);
  return r;
}

VerificationReport within(std::string name, int criterion, double measured, double reference,
                          double tolerance) {
  return make_report(std::move(name), criterion, measured, reference, tolerance,
                     std::abs(measured - reference) <= tolerance);
}

void seed_metadata(VerificationReport& r, const VerifyOptions& o, std::uint64_t master) {
  r.metadata["seed"] = std::to_string(o.seed);
  r.metadata["master_seed"] = std::to_string(master);
}

std::vector<double> dyadic_meshes(double t_end, int from, int to) {
  std::vector<double> m;
  for (int j = from; j <= to; ++j) m.push_back(t_end * std::ldexp(1.0, -j));
  return m;
}

std::string label(const char* key, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%g", key, v);
  return buf;
}

}  // namespace

// 1. Exit through +eps happens with probability (1 + theta) / 2.
std::vector<VerificationReport> verify_exit_probability(const VerifyOptions& o) {
  const double eps = 0.1, h = 1e-5;
  const std::size_t n = 20000;
  std::vector<VerificationReport> out;
  int e = 0;
  for (double theta : {-0.6, 0.0, 0.6, 1.0}) {
    const std::uint64_t master = experiment_seed(o, 1, e++);
    const auto res = exit_probability(theta, eps, n, h, master, o.workers);
    const double ref = 0.5 * (1.0 + theta);
    const double tol = 3.0 * res.estimate.std_error;
    auto r = within("exit_probability " + label("theta", theta), 1, res.estimate.value, ref, tol);
    r.pass = r.pass && !res.coarse_mesh_warning;
    seed_metadata(r, o, master);
    r.metadata["eps"] = fmt(eps);
    r.metadata["h"] = fmt(h);
    r.metadata["n_paths"] = std::to_string(n);
    r.metadata["std_error"] = fmt(res.estimate.std_error);
    r.metadata["rule"] = "|p - (1+theta)/2| <= 3 SE";
    out.push_back(std::move(r));
  }
  return out;
}

// 2. Variance of the signed-power transform of exact skew draws.
std::vector<VerificationReport> verify_msd(const VerifyOptions& o, const MsdFn& evaluator) {
  std::vector<VerificationReport> out;
  out.push_back(within("msd anchor alpha=0 theta=0", 2, evaluator(0.0, 0.0, 1.0), 1.0, 1e-12));
  out.push_back(within("msd anchor alpha=0 theta=1", 2, evaluator(0.0, 1.0, 1.0),
                       1.0 - 2.0 / std::numbers::pi, 1e-12));
  out.push_back(within("msd anchor alpha=0.5 theta=0", 2, evaluator(0.5, 0.0, 1.0), 0.1875, 1e-12));

  const std::size_t n = 100000;
  const std::pair<double, double> cases[] = {{-0.5, 0.0}, {0.0, 0.0}, {0.0, 1.0},
                                             {0.5, 0.0},  {0.5, 0.5}, {0.5, 1.0}};
  int e = 0;
  for (auto [alpha, theta] : cases) {
    const std::uint64_t master = experiment_seed(o, 2, e++);
    const double q = 1.0 - alpha;
    const std::vector<double> x = parallel_map(n, o.workers, [&](std::size_t i) {
      const double b = skew_transition_sample(theta, 0.0, 1.0, SeedSpec{master, i});
      return signed_power(q * b, 1.0 / q);
    });
    const auto var = mc_variance(x);
    const double ref = evaluator(alpha, theta, 1.0);
    auto r = within("msd " + label("alpha", alpha) + " " + label("theta", theta), 2, var.value,
                    ref, 3.0 * var.std_error);
    seed_metadata(r, o, master);
    r.metadata["n_samples"] = std::to_string(n);
    r.metadata["t"] = "1";
    r.metadata["std_error"] = fmt(var.std_error);
    r.metadata["quadrature_variance"] = fmt(msd_quadrature(alpha, theta, 1.0));
    r.metadata["rule"] = "|sample variance - msd| <= 3 SE";
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

VerificationReport residual_study(const VerifyOptions& o, int criterion, int experiment,
                                  const std::string& name, double t_end, std::size_t n_paths,
                                  const std::vector<double>& meshes,
                                  const std::function<std::vector<double>(std::uint64_t, std::size_t)>& per_path) {
  const std::uint64_t master = experiment_seed(o, criterion, experiment);
  const auto study = convergence_study(
      meshes, n_paths, [&](std::size_t i) { return per_path(master, i); }, o.workers);
  auto r = to_report(name, study);
  r.metadata["criterion"] = std::to_string(criterion);
  seed_metadata(r, o, master);
  r.metadata["t_end"] = fmt(t_end);
  r.metadata["n_paths"] = std::to_string(n_paths);
  return r;
}

// Sup-residuals of one fine path restricted to each coarser mesh.
template <class Residual>
std::vector<double> per_mesh(std::size_t n_meshes, Residual residual_at_factor) {
  std::vector<double> out;
  for (std::size_t j = 0; j < n_meshes; ++j)
    out.push_back(residual_at_factor(std::size_t{1} << (n_meshes - 1 - j)));
  return out;
}

}  // namespace

// 3. Benchmark solution, symmetric-sum residual under refinement.
std::vector<VerificationReport> verify_benchmark_residual(const VerifyOptions& o) {
  // Long enough that most paths reach the level where the solution hits 0;
  // away from it the symmetric sums are exact for alpha = 1/2.
  const double t_end = 16.0;
  const auto meshes = dyadic_meshes(1.0, 10, 16);
  const std::size_t n_fine = static_cast<std::size_t>(std::llround(t_end / meshes.back()));
  std::vector<VerificationReport> out;
  int e = 0;
  for (double alpha : {-0.5, 0.5}) {
    const ModelParams p{alpha, 0.0, 1.0};
    out.push_back(residual_study(
        o, 3, e++, "benchmark sde_residual " + label("alpha", alpha), t_end, 50, meshes,
        [&](std::uint64_t master, std::size_t i) {
          const Path b = sample_brownian(TimeGrid(t_end, n_fine), SeedSpec{master, i});
          return per_mesh(meshes.size(), [&](std::size_t f) {
            const Path bc = f > 1 ? coarsen(b, f) : b;
            return sup_abs(sde_residual(p, benchmark_solution(p, bc), bc));
          });
        }));
  }
  return out;
}

// 4. Skew solution with alpha in (0, 1) solves the equation.
std::vector<VerificationReport> verify_skew_residual(const VerifyOptions& o) {
  const auto meshes = dyadic_meshes(1.0, 10, 16);
  const ModelParams p{0.5, 0.5, 0.0};
  return {residual_study(o, 4, 0, "skew sde_residual alpha=0.5 theta=0.5", 1.0, 50, meshes,
                         [&](std::uint64_t master, std::size_t i) {
                           const auto c = simulate_skew_pair(p.theta, 0.0, TimeGrid(1.0, std::size_t{1} << 16),
                                                             SeedSpec{master, i});
                           return per_mesh(meshes.size(), [&](std::size_t f) {
                             const auto cc = f > 1 ? coarsen(c, f) : c;
                             return sup_abs(sde_residual(p, skew_solution(p, cc).X, cc.driver_B));
                           });
                         })};
}

// 5. alpha = 0, theta != 0: the residual is theta L.
std::vector<VerificationReport> verify_skew_failure(const VerifyOptions& o) {
  const TimeGrid grid(1.0, 100000);
  const std::size_t n = 100;
  std::vector<VerificationReport> out;
  int e = 0;
  for (double theta : {0.5, 1.0}) {
    const std::uint64_t master = experiment_seed(o, 5, e++);
    const ModelParams p{0.0, theta, 0.0};
    struct Row { double residual, l_occupation, l_construction; };
    const auto rows = parallel_map(n, o.workers, [&](std::size_t i) {
      const auto c = simulate_skew_pair(theta, 0.0, grid, SeedSpec{master, i});
      const Path x = skew_solution(p, c).X;
      return Row{sde_residual(p, x, c.driver_B).back(),
                 local_time_occupation(c.skew_B, default_occupation_width(grid)).back(),
                 c.local_time_L.back()};
    });
    std::vector<double> res, lo, lc;
    for (const auto& row : rows) {
      res.push_back(row.residual);
      lo.push_back(row.l_occupation);
      lc.push_back(row.l_construction);
    }
    const auto fit = linear_fit(lo, res);
    const auto fit_c = linear_fit(lc, res);
    auto r = make_report("skew residual vs local time alpha=0 " + label("theta", theta), 5,
                         fit.slope, theta, 0.05,
                         std::abs(fit.slope - theta) <= 0.05 && fit.r2 > 0.98);
    seed_metadata(r, o, master);
    r.metadata["r2"] = fmt(fit.r2);
    r.metadata["intercept"] = fmt(fit.intercept);
    r.metadata["regressor"] = "occupation estimate of L_1, eps = 2 sqrt(h)";
    r.metadata["slope_on_simulated_L"] = fmt(fit_c.slope);
    r.metadata["r2_on_simulated_L"] = fmt(fit_c.r2);
    r.metadata["h"] = fmt(grid.step());
    r.metadata["n_paths"] = std::to_string(n);
    r.metadata["rule"] = "|slope - theta| <= 0.05 and R^2 > 0.98";
    out.push_back(std::move(r));
  }
  return out;
}

// 6. [sign(B), B]_1 against twice the occupation local time.
std::vector<VerificationReport> verify_tanaka_bracket(const VerifyOptions& o) {
  const TimeGrid grid(1.0, 100000);
  const std::size_t n = 100;
  const std::uint64_t master = experiment_seed(o, 6, 0);
  const auto rel = parallel_map(n, o.workers, [&](std::size_t i) {
    const Path b = sample_brownian(grid, SeedSpec{master, i});
    const double br = bracket_estimate(apply_fn(sign_of, b), b).curve.back();
    const double l2 = 2.0 * local_time_occupation(b, default_occupation_width(grid)).back();
    return std::abs(br - l2) / l2;
  });
  const auto mean = mc_mean_ci(rel);
  auto r = make_report("tanaka bracket [sign(B),B]_1 vs 2L", 6, mean.value, 0.0, 0.10,
                       mean.value < 0.10);
  seed_metadata(r, o, master);
  r.metadata["h"] = fmt(grid.step());
  r.metadata["n_paths"] = std::to_string(n);
  r.metadata["median_relative_error"] = fmt(median(rel));
  r.metadata["std_error"] = fmt(mean.std_error);
  r.metadata["rule"] = "mean over paths of |bracket - 2L| / 2L < 0.10";
  return {r};
}

// 7. Mollified brackets approach the rough bracket as the window shrinks.
std::vector<VerificationReport> verify_mollifier(const VerifyOptions& o) {
  // Fine enough that the 0.01 window spans ten grid standard deviations.
  const TimeGrid grid(1.0, 1000000);
  const std::vector<double> widths{0.1, 0.01, 0.001};
  const std::size_t n = 10;
  const std::uint64_t master = experiment_seed(o, 7, 0);
  const RealFn fs[] = {[](double x) { return std::sqrt(std::abs(x)); }, sign_of};
  const char* names[] = {"|x|^0.5", "sign"};

  const auto runs = parallel_map(n, o.workers, [&](std::size_t i) {
    const auto c = simulate_skew_pair(0.5, 0.0, grid, SeedSpec{master, i});
    std::vector<std::vector<double>> per_f;
    for (const auto& f : fs) per_f.push_back(bracket_convergence(f, c, widths).sup_differences);
    return per_f;
  });

  std::vector<VerificationReport> out;
  for (std::size_t fi = 0; fi < 2; ++fi) {
    std::vector<double> mean(widths.size(), 0.0);
    int monotone_paths = 0;
    for (const auto& run : runs) {
      const auto& d = run[fi];
      for (std::size_t j = 0; j < d.size(); ++j) mean[j] += d[j] / static_cast<double>(n);
      monotone_paths += (d[1] < d[0] && d[2] < d[1]);
    }
    const bool decreasing = mean[1] < mean[0] && mean[2] < mean[1];
    auto r = make_report(std::string("mollified bracket f=") + names[fi] + " on B^0.5", 7,
                         mean.back(), 0.0, mean.front(), decreasing);
    seed_metadata(r, o, master);
    r.metadata["widths"] = join(widths);
    r.metadata["mean_sup_differences"] = join(mean);
    r.metadata["paths_monotone"] = std::to_string(monotone_paths) + "/" + std::to_string(n);
    r.metadata["h"] = fmt(grid.step());
    r.metadata["rule"] = "mean sup-difference over the paths strictly decreasing in the width";
    out.push_back(std::move(r));
  }
  return out;
}

// 8. Normalization of the joint densities and the z-marginal of (Y, B).
std::vector<VerificationReport> verify_density_normalization(const VerifyOptions&) {
  std::vector<VerificationReport> out;
  for (double theta : {0.3, 0.7}) {
    for (double t : {0.5, 1.0}) {
      const std::string tag = label("theta", theta) + " " + label("t", t);
      out.push_back(within("BL density mass " + tag, 8, bl_normalization(theta, t), 1.0, 1e-4));
      out.push_back(within("YB density mass " + tag, 8, yb_normalization(theta, t), 1.0, 1e-4));
      double worst = 0.0;
      std::vector<double> zs;
      for (int k = 0; k < 20; ++k) {
        const double z = std::sqrt(t) * (-3.0 + 6.0 * k / 19.0);
        zs.push_back(z);
        worst = std::max(worst, std::abs(yb_z_marginal(theta, t, z) - normal_pdf(z, t)));
      }
      auto r = make_report("YB z-marginal vs phi_t " + tag, 8, worst, 0.0, 1e-4, worst <= 1e-4);
      r.metadata["points"] = join(zs);
      r.metadata["rule"] = "max |integral over y - phi_t(z)| <= 1e-4";
      out.push_back(std::move(r));
    }
  }
  return out;
}

// 9. Finite-difference check of L p = dp/du.
std::vector<VerificationReport> verify_heat(const VerifyOptions& o) {
  // The density varies on very different scales across the wedge, so each
  // point walks down a dyadic ladder of steps until the truncation error is
  // below tolerance; the halving ratio is taken from that step.
  const double first_step = 0x1p-6, last_step = 0x1p-14, tol = 1e-4;
  std::vector<VerificationReport> out;
  int e = 0;
  for (double theta : {0.3, 0.7}) {
    const std::uint64_t master = experiment_seed(o, 9, e++);
    RandomStream rng(SeedSpec{master, 0});
    const SkewCoefficients c(theta);
    double worst = 0.0, ratio_lo = 1e300, ratio_hi = 0.0;
    double step_lo = first_step, step_hi = 0.0;
    bool ok = true;
    for (int k = 0; k < 20; ++k) {
      const double u = 0.5 + rng.uniform();
      const double y = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (0.2 + 1.8 * rng.uniform());
      const double z = c.r(y) - theta * std::sqrt(u) * (0.1 + 1.4 * rng.uniform());
      double step = first_step;
      HeatCheck a{};
      bool found = false;
      for (; step >= last_step; step /= 2.0) {
        try {
          a = heat_check_density(theta, u, y, z, step);
        } catch (const std::invalid_argument&) {
          continue;  // stencil leaves the support
        }
        if (a.relative < tol) {
          found = true;
          break;
        }
      }
      if (!found) {
        ok = false;
        worst = std::max(worst, a.relative);
        continue;
      }
      const auto b = heat_check_density(theta, u, y, z, step / 2.0);
      worst = std::max(worst, a.relative);
      const double ratio = a.residual / b.residual;
      ratio_lo = std::min(ratio_lo, ratio);
      ratio_hi = std::max(ratio_hi, ratio);
      step_lo = std::min(step_lo, step);
      step_hi = std::max(step_hi, step);
    }
    const bool pass = ok && worst < tol && ratio_lo >= 3.0 && ratio_hi <= 5.0;
    auto r = make_report("heat identity " + label("theta", theta), 9, worst, 0.0, tol, pass);
    seed_metadata(r, o, master);
    r.metadata["fd_step_min"] = fmt(step_lo);
    r.metadata["fd_step_max"] = fmt(step_hi);
    r.metadata["halving_ratio_min"] = fmt(ratio_lo);
    r.metadata["halving_ratio_max"] = fmt(ratio_hi);
    r.metadata["n_points"] = "20";
    r.metadata["rule"] =
        "max relative residual < 1e-4 and every halving ratio in [3, 5]; residual "
        "relative to max(|dp/du|, p/u)";
    out.push_back(std::move(r));
  }
  return out;
}

// 10. Reversed dynamics reproduce the forward marginal at mid-horizon.
std::vector<VerificationReport> verify_reversal(const VerifyOptions& o) {
  const double T = 1.0;
  const std::size_t n = 10000;
  const TimeGrid grid(T / 2.0, 5000);
  const TimeGrid fine(T / 2.0, 10000);
  std::vector<VerificationReport> out;

  {
    const double theta = 0.5;
    const SkewCoefficients c(theta);
    const std::uint64_t master = experiment_seed(o, 10, 0);
    struct Row { double sde, bessel; std::size_t reflections; };
    const auto rows = parallel_map(n, o.workers, [&](std::size_t i) {
      const SeedSpec s{master, i};
      const auto [y, z] = sample_forward_terminal(theta, T, s);
      const auto sde = simulate_reversed_pair(theta, T, y, z, grid, s.substream(1));
      const auto bes = simulate_reversed_bessel(theta, T, y, z, fine, s.substream(2));
      return Row{sde.Y.back(), bes.Y.back(), sde.wedge_reflections};
    });
    std::vector<double> ys, yb;
    std::size_t refl = 0;
    for (const auto& row : rows) {
      ys.push_back(row.sde);
      yb.push_back(row.bessel);
      refl += row.reflections;
    }
    auto cdf = [&](double y) { return skew_cdf(theta, T / 2.0, c.r(y)); };
    const auto ks = ks_test(ys, cdf);
    const auto ks_b = ks_test(yb, cdf);
    auto r = make_report("reversed SDE theta=0.5, KS of Y at T/2", 10, ks.p_value, 0.01, 0.0,
                         ks.p_value > 0.01);
    seed_metadata(r, o, master);
    r.metadata["ks_statistic"] = fmt(ks.statistic);
    r.metadata["euler_steps"] = std::to_string(grid.n_steps());
    r.metadata["n_samples"] = std::to_string(n);
    r.metadata["wedge_reflections"] = std::to_string(refl);
    r.metadata["bessel_reversal_p_value"] = fmt(ks_b.p_value);
    r.metadata["bessel_reversal_ks_statistic"] = fmt(ks_b.statistic);
    r.metadata["rule"] = "KS p > 0.01 against P(Y_{T/2} <= y) = F_skew(r(y))";
    out.push_back(std::move(r));
  }
  {
    const std::uint64_t master = experiment_seed(o, 10, 1);
    const auto xs = parallel_map(n, o.workers, [&](std::size_t i) {
      const SeedSpec s{master, i};
      const auto [x1, z] = sample_forward_terminal(1.0, T, s);
      return simulate_reversed_reflected(T, x1, z, grid, s.substream(1)).Y.back();
    });
    const auto ks = ks_test(xs, [&](double x) {
      return x <= 0.0 ? 0.0 : 2.0 * normal_cdf(x / std::sqrt(T / 2.0)) - 1.0;
    });
    auto r = make_report("reflected reversal theta=1, KS of B^1 at T/2", 10, ks.p_value, 0.01,
                         0.0, ks.p_value > 0.01);
    seed_metadata(r, o, master);
    r.metadata["ks_statistic"] = fmt(ks.statistic);
    r.metadata["euler_steps"] = std::to_string(grid.n_steps());
    r.metadata["n_samples"] = std::to_string(n);
    r.metadata["rule"] = "KS p > 0.01 against 2 Phi(z / sqrt(T/2)) - 1";
    out.push_back(std::move(r));
  }
  return out;
}

// 11. Principal-value truncations settle for theta = 0 and drift for theta = 0.5.
std::vector<VerificationReport> verify_pv(const VerifyOptions& o) {
  const TimeGrid grid(1.0, 1000000);
  const std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
  const std::size_t n = 30;
  std::vector<VerificationReport> out;
  int e = 0;
  for (double theta : {0.0, 0.5}) {
    const std::uint64_t master = experiment_seed(o, 11, e++);
    struct Row { std::vector<double> values; double l; };
    const auto rows = parallel_map(n, o.workers, [&](std::size_t i) {
      const auto c = simulate_skew_pair(theta, 0.0, grid, SeedSpec{master, i});
      return Row{pv_integral(c.skew_B, -1.0, eps, 0.1).values, c.local_time_L.back()};
    });
    std::vector<double> mean_inc, se_inc, mean_abs;
    std::vector<double> ls;
    for (const auto& row : rows) ls.push_back(row.l);
    for (std::size_t j = 0; j + 1 < eps.size(); ++j) {
      std::vector<double> d, a;
      for (const auto& row : rows) {
        d.push_back(row.values[j + 1] - row.values[j]);
        a.push_back(std::abs(d.back()));
      }
      const auto m = mc_mean_ci(d);
      mean_inc.push_back(m.value);
      se_inc.push_back(m.std_error);
      mean_abs.push_back(mc_mean_ci(a).value);
    }
    const std::size_t k = mean_inc.size();
    bool pass = true;
    std::string rule;
    if (theta == 0.0) {
      for (std::size_t j = 0; j < k; ++j) pass = pass && std::abs(mean_inc[j]) <= 3.0 * se_inc[j];
      for (std::size_t j = 1; j < k; ++j) pass = pass && mean_abs[j] < mean_abs[j - 1];
      rule = "stabilizes: per-decade mean increment within 3 SE of 0 and mean |increment| "
             "strictly shrinking";
    } else {
      for (std::size_t j = 0; j < k; ++j) pass = pass && mean_inc[j] > 3.0 * se_inc[j];
      pass = pass && mean_abs.back() >= 0.5 * mean_abs.front();
      rule = "drifts: every per-decade mean increment above 3 SE with one sign and no decay "
             "(last >= half of first)";
    }
    auto r = make_report(std::string("pv truncations exponent=-1 ") + label("theta", theta) +
                             (theta == 0.0 ? " stabilize" : " drift"),
                         11, mean_abs.back(), 0.0, 3.0 * se_inc.back(), pass);
    seed_metadata(r, o, master);
    r.metadata["eps"] = join(eps);
    r.metadata["mean_increment_per_decade"] = join(mean_inc);
    r.metadata["std_error_per_decade"] = join(se_inc);
    r.metadata["mean_abs_increment_per_decade"] = join(mean_abs);
    r.metadata["expected_drift_per_decade"] =
        fmt(2.0 * theta * mc_mean_ci(ls).value * std::log(10.0));
    r.metadata["h"] = fmt(grid.step());
    r.metadata["n_paths"] = std::to_string(n);
    r.metadata["rule"] = rule;
    out.push_back(std::move(r));
  }
  return out;
}

// 12. |X^theta_1|^(1-alpha) / (1-alpha) is distributed as |N(0,1)|.
std::vector<VerificationReport> verify_law_of_solutions(const VerifyOptions& o) {
  const TimeGrid grid(1.0, 10000);
  const std::size_t n = 10000;
  const double alpha = 0.5;
  std::vector<VerificationReport> out;
  int e = 0;
  for (double theta : {0.0, 0.5, 1.0}) {
    const std::uint64_t master = experiment_seed(o, 12, e++);
    const ModelParams p{alpha, theta, 0.0};
    const auto v = parallel_map(n, o.workers, [&](std::size_t i) {
      const auto c = simulate_skew_pair(theta, 0.0, grid, SeedSpec{master, i});
      const double x = skew_solution(p, c).X.back();
      return std::pow(std::abs(x), 1.0 - alpha) / (1.0 - alpha);
    });
    const auto ks = ks_test(v, [](double x) { return x <= 0.0 ? 0.0 : 2.0 * normal_cdf(x) - 1.0; });
    auto r = make_report("law of X^theta_1 " + label("theta", theta) + " alpha=0.5", 12,
                         ks.p_value, 0.01, 0.0, ks.p_value > 0.01);
    seed_metadata(r, o, master);
    r.metadata["ks_statistic"] = fmt(ks.statistic);
    r.metadata["h"] = fmt(grid.step());
    r.metadata["n_paths"] = std::to_string(n);
    r.metadata["rule"] = "KS p > 0.01 against the reflected Brownian cdf at t=1";
    out.push_back(std::move(r));
  }
  return out;
}

// Generalized chain rule with g vanishing near 0.
std::vector<VerificationReport> verify_chain_rule(const VerifyOptions& o) {
  // C^2 bump on (0.5, 2.5), zero on [-0.5, 0.5].
  const double a = 0.5, b = 2.5;
  ChainRuleFunctions fns;
  fns.delta = 0.5;
  fns.g = [=](double x) { return x > a && x < b ? std::pow((x - a) * (b - x), 3) : 0.0; };
  fns.dg = [=](double x) {
    if (!(x > a && x < b)) return 0.0;
    const double w = (x - a) * (b - x);
    return 3.0 * w * w * (a + b - 2.0 * x);
  };
  fns.d2g = [=](double x) {
    if (!(x > a && x < b)) return 0.0;
    const double w = (x - a) * (b - x);
    const double dw = a + b - 2.0 * x;
    return 6.0 * w * dw * dw - 6.0 * w * w;
  };
  const auto meshes = dyadic_meshes(1.0, 8, 14);
  std::vector<VerificationReport> out;

  {
    const ModelParams p{0.5, 0.0, 1.0};
    ChainRuleFunctions f = fns;
    f.phi = [](double x) { return std::sqrt(std::abs(x)); };
    f.dphi = [](double x) { return x == 0.0 ? 0.0 : 0.5 * sign_of(x) / std::sqrt(std::abs(x)); };
    auto r = residual_study(o, 0, 1, "chain rule residual, benchmark alpha=0.5", 1.0, 50, meshes,
                            [&](std::uint64_t master, std::size_t i) {
                              const Path bm = sample_brownian(TimeGrid(1.0, std::size_t{1} << 14),
                                                              SeedSpec{master, i});
                              return per_mesh(meshes.size(), [&](std::size_t k) {
                                const Path bc = k > 1 ? coarsen(bm, k) : bm;
                                return sup_abs(chain_rule_residual(f, benchmark_solution(p, bc), bc));
                              });
                            });
    r.metadata["criterion"] = "chain-rule";
    out.push_back(std::move(r));
  }
  {
    ChainRuleFunctions f = fns;
    f.phi = [](double) { return 1.0; };
    f.dphi = [](double) { return 0.0; };
    auto r = residual_study(o, 0, 2, "chain rule residual, phi=1 on Brownian paths", 1.0, 50,
                            meshes, [&](std::uint64_t master, std::size_t i) {
                              const Path bm = sample_brownian(TimeGrid(1.0, std::size_t{1} << 14),
                                                              SeedSpec{master, i});
                              return per_mesh(meshes.size(), [&](std::size_t k) {
                                const Path bc = k > 1 ? coarsen(bm, k) : bm;
                                return sup_abs(chain_rule_residual(f, bc, bc));
                              });
                            });
    r.metadata["criterion"] = "chain-rule";
    out.push_back(std::move(r));
  }
  return out;
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "exit probability equals (1+theta)/2", "exit-prob", verify_exit_probability},
      {2, "mean square displacement", "msd",
       [](const VerifyOptions& o) { return verify_msd(o, msd); }},
      {3, "benchmark solution residual under refinement", "sde-residuals",
       verify_benchmark_residual},
      {4, "skew solution residual under refinement, alpha=0.5", "sde-residuals",
       verify_skew_residual},
      {5, "alpha=0 skew residual equals theta L", "sde-residuals", verify_skew_failure},
      {6, "Tanaka bracket [sign(B),B] = 2L", "brackets", verify_tanaka_bracket},
      {7, "mollified brackets converge", "brackets", verify_mollifier},
      {8, "joint density normalization and z-marginal", "densities",
       verify_density_normalization},
      {9, "heat identity for the (Y,B) density", "heat", verify_heat},
      {10, "time reversal marginals", "reversal", verify_reversal},
      {11, "principal value stabilizes only without skew", "pv", verify_pv},
      {12, "law of |X^theta_1|", "densities", verify_law_of_solutions},
      {0, "generalized chain rule", "chain-rule", verify_chain_rule},
  };
  return list;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"densities", "msd",      "exit-prob",
                                                 "brackets",  "sde-residuals", "reversal",
                                                 "heat",      "pv",       "chain-rule",
                                                 "all"};
  return names;
}

bool is_suite(const std::string& name) {
  const auto& n = suite_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

std::vector<VerificationReport> run_suite(const std::string& suite, const VerifyOptions& o) {
  if (!is_suite(suite)) throw std::invalid_argument("unknown suite '" + suite + "'");
  std::vector<VerificationReport> out;
  for (const auto& c : criteria()) {
    if (suite != "all" && c.suite != suite) continue;
    auto r = c.run(o);
    out.insert(out.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  }
  return out;
}

bool all_pass(const std::vector<VerificationReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const VerificationReport& r) { return r.pass; });
}

}  // namespace hdp
