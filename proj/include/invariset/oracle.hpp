#pragma once

// White-box verification for systems whose dynamics we can evaluate
// directly: grid computation of the k-step safe sets, Monte-Carlo violation
// estimates, sandwich measurements for the inner/outer classifiers, and the
// closed-form failure-probability bounds.
//
// The grid uses cell-center sampling: a cell belongs to the k-step safe set
// when its center's whole k-step orbit stays inside the box.  That is itself
// a discretization, which is why tolerances that compare grid and
// Monte-Carlo answers carry a boundary-cell slack term.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "core.hpp"
#include "dynamics.hpp"
#include "identify.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "sampling.hpp"

namespace invariset {

/// A membership mask over the cell centers of a regular grid on a box.
struct GridSet {
  ConstraintBox box;
  std::vector<std::int64_t> resolution;  // cells per axis
  std::vector<std::uint8_t> mask;        // row-major over cell centers
  std::vector<std::size_t> failed_cells; // cells whose simulation blew up

  std::size_t cells() const noexcept { return mask.size(); }

  double measure() const noexcept {
    std::size_t on = 0;
    for (const auto m : mask) on += m;
    return mask.empty() ? 0.0
                        : static_cast<double>(on) /
                              static_cast<double>(mask.size());
  }

  /// Center coordinates of a row-major cell index.
  State center(std::size_t flat) const {
    State c(box.dim());
    for (std::size_t j = box.dim(); j-- > 0;) {
      const auto r = static_cast<std::size_t>(resolution[j]);
      const std::size_t idx = flat % r;
      flat /= r;
      c[j] = box.lower()[j] +
             (static_cast<double>(idx) + 0.5) * box.side(j) /
                 static_cast<double>(r);
    }
    return c;
  }
};

namespace detail {

/// Exit step of every cell center, capped at max_steps (0 = no exit within
/// the window).  Shared by the safe-set masks and the fixed-point search.
/// A simulation failure marks the cell with exit step 1 (conservatively
/// unsafe) and records it.
struct GridExitTimes {
  std::vector<std::int64_t> exit_step;  // 0 = survived the window
  std::vector<std::size_t> failed_cells;
};

inline GridExitTimes grid_exit_times(const SystemModel& sys,
                                     const ConstraintBox& box,
                                     std::int64_t resolution,
                                     std::int64_t max_steps,
                                     unsigned workers) {
  if (resolution < 2)
    throw ParameterError("grid resolution must be at least 2 per axis");
  const std::size_t d = box.dim();
  std::size_t total = 1;
  for (std::size_t j = 0; j < d; ++j)
    total *= static_cast<std::size_t>(resolution);

  GridSet geometry;  // only used for center()
  geometry.box = box;
  geometry.resolution.assign(d, resolution);
  geometry.mask.resize(total);

  GridExitTimes out;
  out.exit_step.assign(total, 0);
  std::vector<std::uint8_t> failed(total, 0);

  parallel_for(total, workers, [&](std::size_t i) {
    const State c = geometry.center(i);
    try {
      const auto e = exit_time(sys, c, box, max_steps);
      out.exit_step[i] = e.value_or(0);
    } catch (const SimulationError&) {
      out.exit_step[i] = 1;
      failed[i] = 1;
    }
  });
  for (std::size_t i = 0; i < total; ++i)
    if (failed[i]) out.failed_cells.push_back(i);
  return out;
}

}  // namespace detail

/// The k-step safe set on a grid: cell centers whose orbits stay inside the
/// box for steps 0..k.
inline GridSet grid_O_k(const SystemModel& sys, const ConstraintBox& box,
                        std::int64_t k, std::int64_t resolution,
                        unsigned workers = 1) {
  if (k < 0) throw ParameterError("grid_O_k: negative horizon");
  const auto exits = detail::grid_exit_times(sys, box, resolution, k, workers);

  GridSet grid;
  grid.box = box;
  grid.resolution.assign(box.dim(), resolution);
  grid.mask.resize(exits.exit_step.size());
  for (std::size_t i = 0; i < grid.mask.size(); ++i)
    grid.mask[i] = exits.exit_step[i] == 0;  // survived all k steps
  grid.failed_cells = exits.failed_cells;
  return grid;
}

/// All k-step safe sets for k = 0..k_max in one sweep (the per-cell exit
/// steps are computed once).  family[k] equals grid_O_k(..., k, ...).
inline std::vector<GridSet> grid_O_k_family(const SystemModel& sys,
                                            const ConstraintBox& box,
                                            std::int64_t k_max,
                                            std::int64_t resolution,
                                            unsigned workers = 1) {
  if (k_max < 0) throw ParameterError("grid_O_k_family: negative horizon");
  const auto exits =
      detail::grid_exit_times(sys, box, resolution, k_max, workers);

  std::vector<GridSet> family(static_cast<std::size_t>(k_max) + 1);
  for (std::int64_t k = 0; k <= k_max; ++k) {
    GridSet& grid = family[static_cast<std::size_t>(k)];
    grid.box = box;
    grid.resolution.assign(box.dim(), resolution);
    grid.mask.resize(exits.exit_step.size());
    for (std::size_t i = 0; i < grid.mask.size(); ++i) {
      const auto e = exits.exit_step[i];
      grid.mask[i] = e == 0 || e > k;
    }
    grid.failed_cells = exits.failed_cells;
  }
  return family;
}

/// Smallest k <= k_max at which the grid safe-set recursion reaches a fixed
/// point (no cell exits at exactly step k+1); nullopt if none below k_max.
inline std::optional<std::int64_t> grid_fixed_point_index(
    const SystemModel& sys, const ConstraintBox& box, std::int64_t resolution,
    std::int64_t k_max, unsigned workers = 1) {
  if (k_max < 0) throw ParameterError("grid_fixed_point_index: negative cap");
  const auto exits =
      detail::grid_exit_times(sys, box, resolution, k_max + 1, workers);

  // exits_at[t] = number of cells leaving at exactly step t.
  std::vector<std::int64_t> exits_at(static_cast<std::size_t>(k_max) + 2, 0);
  for (const auto e : exits.exit_step)
    if (e > 0) ++exits_at[static_cast<std::size_t>(e)];
  for (std::int64_t k = 0; k <= k_max; ++k)
    if (exits_at[static_cast<std::size_t>(k) + 1] == 0) return k;
  return std::nullopt;
}

/// A Monte-Carlo estimate of an event probability, kept as exact counts.
struct ViolationEstimate {
  std::int64_t violating = 0;
  std::int64_t n_mc = 0;
  std::uint64_t seed = 0;

  double point_estimate() const noexcept {
    return static_cast<double>(violating) / static_cast<double>(n_mc);
  }
  /// Binomial standard deviation at the point estimate.
  double sigma() const noexcept {
    const double p = point_estimate();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n_mc));
  }
};

/// Estimates the measure of points that survive k steps but not k+1 (the
/// one-step escape measure of the k-step safe set), with n_mc fresh uniform
/// points.
inline ViolationEstimate violation_S_k(const SystemModel& sys,
                                       const ConstraintBox& box,
                                       std::int64_t k, std::int64_t n_mc,
                                       std::uint64_t seed,
                                       unsigned workers = 1) {
  if (n_mc < 1) throw ParameterError("violation_S_k: need n_mc >= 1");
  if (k < 0) throw ParameterError("violation_S_k: negative horizon");

  std::vector<std::uint8_t> violates(static_cast<std::size_t>(n_mc), 0);
  parallel_for(static_cast<std::size_t>(n_mc), workers, [&](std::size_t i) {
    State x(box.dim());
    sample_point(box, seed, i, x);
    const auto e = exit_time(sys, x, box, k + 1);
    violates[i] = e.has_value() && *e == k + 1;
  });

  ViolationEstimate est;
  est.n_mc = n_mc;
  est.seed = seed;
  for (const auto v : violates) est.violating += v;
  return est;
}

struct SandwichMeasures {
  /// Points the inner classifier accepts although they are not in the set.
  ViolationEstimate inner_excess;
  /// Points of the set the outer classifier fails to accept.
  ViolationEstimate outer_deficit;
};

/// Monte-Carlo check of the inner/outer guarantee: membership in the true
/// set is decided by direct t_star-step simulation (never by grid lookup).
inline SandwichMeasures sandwich_measures(const SetClassifier& inner,
                                          const SetClassifier& outer,
                                          const SystemModel& sys,
                                          const ConstraintBox& box,
                                          std::int64_t t_star,
                                          std::int64_t n_mc,
                                          std::uint64_t seed,
                                          unsigned workers = 1) {
  if (n_mc < 1) throw ParameterError("sandwich_measures: need n_mc >= 1");
  if (t_star < 0) throw ParameterError("sandwich_measures: negative horizon");

  std::vector<std::uint8_t> excess(static_cast<std::size_t>(n_mc), 0);
  std::vector<std::uint8_t> deficit(static_cast<std::size_t>(n_mc), 0);
  parallel_for(static_cast<std::size_t>(n_mc), workers, [&](std::size_t i) {
    State x(box.dim());
    sample_point(box, seed, i, x);
    const bool in_set = !exit_time(sys, x, box, t_star).has_value();
    if (in_set) {
      deficit[i] = !outer.contains(x);
    } else {
      excess[i] = inner.contains(x);
    }
  });

  SandwichMeasures m;
  m.inner_excess.n_mc = n_mc;
  m.inner_excess.seed = seed;
  m.outer_deficit.n_mc = n_mc;
  m.outer_deficit.seed = seed;
  for (std::size_t i = 0; i < excess.size(); ++i) {
    m.inner_excess.violating += excess[i];
    m.outer_deficit.violating += deficit[i];
  }
  return m;
}

/// The three closed-form bounds on the probability that an N-sample run
/// misses an epsilon-sized escape region, evaluated in log space:
///   standard     (1-eps)^N          - for the max-exit-time estimate
///   conservative (1/eps)(1-eps)^N   - also covers the plateau estimate
///   hoeffding    (2/eps)e^{-2N eps^2}
struct BoundTable {
  double standard = 0.0;
  double conservative = 0.0;
  double hoeffding = 0.0;
};

inline BoundTable bound_table(double epsilon, std::int64_t n) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ParameterError("epsilon must lie in (0,1)");
  if (n < 1) throw ParameterError("bound_table: need N >= 1");

  const double log_eps = std::log(epsilon);
  const double n_log_1m = static_cast<double>(n) * std::log1p(-epsilon);
  BoundTable t;
  t.standard = std::exp(n_log_1m);
  t.conservative = std::exp(n_log_1m - log_eps);
  t.hoeffding = std::exp(std::log(2.0) - log_eps -
                         2.0 * static_cast<double>(n) * epsilon * epsilon);
  return t;
}

}  // namespace invariset
