#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hdp/rng.hpp"

namespace hdp {

/// Uniform grid 0 = t_0 < t_1 < ... < t_n = t_end with t_k = k * step().
class TimeGrid {
public:
  TimeGrid(double t_end, std::size_t n_steps);

  double t_end() const { return t_end_; }
  std::size_t n_steps() const { return n_steps_; }
  std::size_t n_nodes() const { return n_steps_ + 1; }
  double step() const { return t_end_ / static_cast<double>(n_steps_); }
  double time(std::size_t k) const;
  std::vector<double> times() const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
  double t_end_;
  std::size_t n_steps_;
};

/// Throws std::invalid_argument unless t_end > 0 and n_steps >= 1.
TimeGrid make_grid(double t_end, std::size_t n_steps);

/// Real-valued sample path with one finite value per grid node.
class Path {
public:
  Path(TimeGrid grid, std::vector<double> values);
  /// Constant path.
  Path(TimeGrid grid, double value);

  const TimeGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  double back() const { return values_.back(); }

private:
  TimeGrid grid_;
  std::vector<double> values_;
};

/// Throws std::invalid_argument when the two paths do not share a grid.
void require_same_grid(const Path& a, const Path& b);

/// Standard Brownian motion started at 0, sampled exactly at the grid nodes.
Path sample_brownian(const TimeGrid& grid, SeedSpec seed);

/// Refines the grid by `factor`, keeping the original nodes and filling each
/// coarse step with a Brownian bridge pinned at its endpoints.
Path refine(const Path& path, std::size_t factor, SeedSpec seed);

/// Keeps every `factor`-th node. `factor` must divide the number of steps.
Path coarsen(const Path& path, std::size_t factor);

}  // namespace hdp
