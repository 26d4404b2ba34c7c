#include "hdp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "hdp/parallel.hpp"
#include "hdp/skew.hpp"

namespace hdp {

EstimatorResult mc_mean_ci(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("need at least two samples");
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return {mean, sd / std::sqrt(static_cast<double>(n)), n};
}

EstimatorResult mc_variance(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("need at least two samples");
  const double nn = static_cast<double>(n);
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= nn;
  double m2 = 0.0, m4 = 0.0;
  for (double v : samples) {
    const double d2 = (v - mean) * (v - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= nn;
  m4 /= nn;
  return {m2, std::sqrt(std::max(0.0, m4 - m2 * m2) / nn), n};
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("linear fit needs matching samples, at least three");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear fit: constant regressor");
  const double slope = sxy / sxx;
  const double r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return {slope, my - slope * mx, r2};
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("KS needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    if (!(f >= 0.0 && f <= 1.0) || f < prev)
      throw std::invalid_argument("cdf is not a nondecreasing map into [0, 1]");
    prev = f;
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double kolmogorov_p_value(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda <= 0.0) return 1.0;
  double p;
  if (lambda < 1.18) {
    // Theta-function form of the cdf; converges fast for small lambda.
    const double c = -std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double s = 0.0;
    for (int k = 1; k <= 50; ++k) s += std::exp((2 * k - 1) * (2 * k - 1) * c);
    p = 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s;
  } else {
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      s += (k % 2 ? term : -term);
      if (term < 1e-300) break;
    }
    p = 2.0 * s;
  }
  return std::clamp(p, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.size() < 10) throw std::invalid_argument("KS test needs at least 10 samples");
  const std::size_t n = samples.size();
  const double d = ks_statistic(std::move(samples), cdf);
  return {d, kolmogorov_p_value(d, n)};
}

ExitProbabilityResult exit_probability(double theta, double eps, std::size_t n_paths,
                                       double h, std::uint64_t master_seed,
                                       unsigned workers) {
  require_theta(theta);
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  if (n_paths < 2) throw std::invalid_argument("need at least two paths");
  const double bp = 0.5 * (1.0 + theta);
  const std::vector<double> up = parallel_map(n_paths, workers, [&](std::size_t i) {
    RandomStream rng(SeedSpec{master_seed, i});
    double x = 0.0, dl;
    while (std::abs(x) < eps) x = skew_exact_step(x, h, bp, rng, &dl);
    return x > 0.0 ? 1.0 : 0.0;
  });
  return {mc_mean_ci(up), h > eps * eps / 100.0};
}

ConvergenceStudy judge_convergence(std::vector<double> meshes, std::vector<double> medians,
                                   double min_reduction) {
  ConvergenceStudy s{std::move(meshes), std::move(medians), 0, false};
  const auto& m = s.medians;
  if (std::all_of(m.begin(), m.end(), [](double v) { return v < kResidualFloor; })) {
    s.pass = true;
    return s;
  }
  for (std::size_t j = 1; j < m.size(); ++j)
    if (!(m[j] < m[j - 1])) ++s.inversions;
  s.pass = s.inversions <= 1 && m.back() <= min_reduction * m.front();
  return s;
}

ConvergenceStudy convergence_study(
    const std::vector<double>& meshes, std::size_t n_paths,
    const std::function<std::vector<double>(std::size_t)>& experiment,
    unsigned workers, double min_reduction) {
  if (meshes.size() < 3) throw std::invalid_argument("need at least three meshes");
  for (std::size_t j = 1; j < meshes.size(); ++j)
    if (!(meshes[j] < meshes[j - 1]))
      throw std::invalid_argument("meshes must strictly decrease");
  if (n_paths == 0) throw std::invalid_argument("need at least one path");

  const auto per_path = parallel_map(n_paths, workers, experiment);
  std::vector<double> medians;
  for (std::size_t j = 0; j < meshes.size(); ++j) {
    std::vector<double> col;
    for (const auto& row : per_path) {
      if (row.size() != meshes.size())
        throw std::invalid_argument("experiment must return one value per mesh");
      col.push_back(row[j]);
    }
    medians.push_back(median(std::move(col)));
  }
  return judge_convergence(meshes, std::move(medians), min_reduction);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

VerificationReport to_report(const std::string& name, const ConvergenceStudy& study) {
  VerificationReport r;
  r.check_name = name;
  r.measured = study.medians.back();
  r.reference = 0.0;
  r.tolerance = study.medians.front();
  r.pass = study.pass;
  r.metadata["rule"] =
      "median sup-residual decreasing under refinement with at most one inversion, "
      "finest median at most half the coarsest (or all medians below 1e-12)";
  r.metadata["inversions"] = std::to_string(study.inversions);
  std::string meshes, medians;
  for (std::size_t j = 0; j < study.meshes.size(); ++j) {
    meshes += (j ? "," : "") + format_double(study.meshes[j]);
    medians += (j ? "," : "") + format_double(study.medians[j]);
  }
  r.metadata["meshes"] = meshes;
  r.metadata["medians"] = medians;
  return r;
}

}  // namespace hdp
