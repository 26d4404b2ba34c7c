#include "hdp/paths.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hdp {

TimeGrid::TimeGrid(double t_end, std::size_t n_steps)
    : t_end_(t_end), n_steps_(n_steps) {
  if (!(t_end > 0.0) || !std::isfinite(t_end))
    throw std::invalid_argument("time grid: t_end must be positive and finite");
  if (n_steps == 0)
    throw std::invalid_argument("time grid: n_steps must be at least 1");
}

double TimeGrid::time(std::size_t k) const {
  // Exact endpoint regardless of rounding in k * step.
  if (k == n_steps_) return t_end_;
  return static_cast<double>(k) * step();
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> out(n_nodes());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = time(k);
  return out;
}

TimeGrid make_grid(double t_end, std::size_t n_steps) {
  return TimeGrid(t_end, n_steps);
}

Path::Path(TimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.n_nodes())
    throw std::invalid_argument("path: expected " +
                                std::to_string(grid_.n_nodes()) +
                                " values, got " +
                                std::to_string(values_.size()));
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("path: non-finite value");
}

Path::Path(TimeGrid grid, double value)
    : Path(grid, std::vector<double>(grid.n_nodes(), value)) {}

void require_same_grid(const Path& a, const Path& b) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument("paths live on different grids");
}

Path sample_brownian(const TimeGrid& grid, SeedSpec seed) {
  RandomStream rng(seed);
  const double sd = std::sqrt(grid.step());
  std::vector<double> v(grid.n_nodes());
  v[0] = 0.0;
  for (std::size_t k = 1; k < v.size(); ++k) v[k] = v[k - 1] + sd * rng.gaussian();
  return Path(grid, std::move(v));
}

Path refine(const Path& path, std::size_t factor, SeedSpec seed) {
  if (factor < 2) throw std::invalid_argument("refine: factor must be >= 2");
  const TimeGrid& coarse = path.grid();
  const TimeGrid fine(coarse.t_end(), coarse.n_steps() * factor);
  const double h = fine.step();
  RandomStream rng(seed);

  std::vector<double> v(fine.n_nodes());
  for (std::size_t k = 0; k < coarse.n_steps(); ++k) {
    const double a = path[k];
    const double b = path[k + 1];
    v[k * factor] = a;
    double x = a;
    for (std::size_t j = 1; j < factor; ++j) {
      // Next point of a bridge from (t, x) to (t + remaining*h, b).
      const double remaining = static_cast<double>(factor - j + 1);
      const double mean = x + (b - x) / remaining;
      const double var = h * (remaining - 1.0) / remaining;
      x = mean + std::sqrt(var) * rng.gaussian();
      v[k * factor + j] = x;
    }
  }
  v.back() = path.back();
  return Path(fine, std::move(v));
}

Path coarsen(const Path& path, std::size_t factor) {
  const TimeGrid& g = path.grid();
  if (factor == 0 || g.n_steps() % factor != 0)
    throw std::invalid_argument("coarsen: factor must divide the step count");
  const TimeGrid coarse(g.t_end(), g.n_steps() / factor);
  std::vector<double> v(coarse.n_nodes());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = path[k * factor];
  return Path(coarse, std::move(v));
}

}  // namespace hdp
