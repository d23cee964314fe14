#pragma once

// Phase I: estimate the invariance horizon from simulated trajectories.
//
// Every sample point is simulated until it either leaves the box (its exit
// step is recorded), or it has run for at least the long horizon and come
// back within delta_traj of its own past orbit (treated as "never leaves"),
// or the hard step cap is reached (flagged).  The headline statistic
// t_star is the largest recorded exit step; t_bar is the first plateau of
// the survival curve theta.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "dynamics.hpp"
#include "parallel.hpp"
#include "sampling.hpp"

namespace invariset {

struct Phase1Config {
  double delta_traj = 0.0;            // recurrence tolerance (state units)
  std::int64_t t_bar_horizon = 100;   // minimum steps before retiring a sample
  std::int64_t max_steps_hard = 10000;  // absolute per-sample cap
  unsigned workers = 1;

  void validate() const {
    if (!(delta_traj > 0.0))
      throw ParameterError("delta_traj must be positive");
    if (t_bar_horizon < 1)
      throw ParameterError("t_bar_horizon must be at least 1");
    if (max_steps_hard < t_bar_horizon)
      throw ParameterError("max_steps_hard must be >= t_bar_horizon");
  }
};

/// Defaults that terminate on all built-in benchmarks: tolerance scaled to
/// the box diagonal, a 100-step minimum horizon, and a 10000-step cap.
inline Phase1Config default_phase1_config(const ConstraintBox& box) {
  Phase1Config cfg;
  cfg.delta_traj = 1e-3 * box.diameter();
  return cfg;
}

enum class Phase1Termination { recurrence, all_exited, hard_cap };

inline std::string to_string(Phase1Termination t) {
  switch (t) {
    case Phase1Termination::recurrence: return "recurrence";
    case Phase1Termination::all_exited: return "all_exited";
    case Phase1Termination::hard_cap: return "hard_cap";
  }
  return "unknown";
}

/// The survival curve theta_k = (# samples alive after k steps) / N, stored
/// as exact integer counts so plateau detection and serialization never see
/// rounding.
struct ThetaSequence {
  std::vector<std::int64_t> survivors;  // survivors[k] for k = 0..K
  std::int64_t sample_count = 0;

  std::size_t size() const noexcept { return survivors.size(); }
  double value(std::size_t k) const {
    return static_cast<double>(survivors[k]) /
           static_cast<double>(sample_count);
  }
};

/// Builds theta_0..theta_K from per-sample exit steps (absent = never exits
/// within the observed window).
inline ThetaSequence theta_sequence(
    const std::vector<std::optional<std::int64_t>>& exit_steps,
    std::int64_t k_max) {
  if (exit_steps.empty())
    throw ParameterError("theta_sequence: no samples");
  if (k_max < 0) throw ParameterError("theta_sequence: negative horizon");

  ThetaSequence theta;
  theta.sample_count = static_cast<std::int64_t>(exit_steps.size());

  // exits_at[t] = number of samples with exit step exactly t.
  std::vector<std::int64_t> exits_at(static_cast<std::size_t>(k_max) + 2, 0);
  for (const auto& e : exit_steps) {
    if (!e) continue;
    if (*e < 1 || *e > k_max)
      throw ParameterError("theta_sequence: exit step outside [1, k_max]");
    ++exits_at[static_cast<std::size_t>(*e)];
  }

  theta.survivors.resize(static_cast<std::size_t>(k_max) + 1);
  std::int64_t alive = theta.sample_count;
  for (std::int64_t k = 0; k <= k_max; ++k) {
    alive -= exits_at[static_cast<std::size_t>(k)];  // exits_at[0] == 0
    theta.survivors[static_cast<std::size_t>(k)] = alive;
  }
  return theta;
}

/// First index k with theta_k = theta_{k+1} (exact, via survivor counts).
inline std::int64_t t_bar(const ThetaSequence& theta) {
  if (theta.size() < 2)
    throw ParameterError("t_bar: need at least theta_0 and theta_1");
  for (std::size_t k = 0; k + 1 < theta.size(); ++k) {
    if (theta.survivors[k] == theta.survivors[k + 1])
      return static_cast<std::int64_t>(k);
  }
  throw ParameterError("t_bar: sequence has no plateau");
}

struct HorizonReport {
  ThetaSequence theta;
  std::int64_t t_bar = 0;
  std::int64_t t_star = 0;
  /// The loop horizon at which the last sample resolved (diagnostic; this is
  /// the value a literal reading of the stopping rule would assign).
  std::int64_t termination_horizon = 0;
  Phase1Termination terminated_by = Phase1Termination::recurrence;
  /// Per-sample first exit step; absent for samples retired by recurrence
  /// (or capped).
  std::vector<std::optional<std::int64_t>> exit_steps;
  /// Samples that hit max_steps_hard without exiting or recurring.
  std::vector<std::size_t> capped_samples;
};

/// Runs Phase I on a sample set.  Samples are processed independently: each
/// is simulated until exit, recurrence (its new state comes within
/// delta_traj of its own past orbit, checked once at least t_bar_horizon
/// steps have been taken), or the hard cap.  Results are bitwise identical
/// for any worker count.
inline HorizonReport estimate_horizon(const SystemModel& sys,
                                      const SampleSet& omega,
                                      const ConstraintBox& box,
                                      const Phase1Config& cfg) {
  cfg.validate();
  const std::size_t n = omega.points.size();
  if (n == 0) throw ParameterError("estimate_horizon: empty sample set");
  if (omega.points.dim() != box.dim() ||
      box.dim() != static_cast<std::size_t>(sys.dim()))
    throw ParameterError("estimate_horizon: dimension mismatch");

  const std::size_t dim = box.dim();
  const double delta_sq = cfg.delta_traj * cfg.delta_traj;

  // Per-sample results; each loop iteration writes only its own slots.
  std::vector<std::optional<std::int64_t>> exit_steps(n);
  // Final loop horizon per sample: exit step - 1 for exits, the retirement
  // horizon for recurrences, max_steps_hard for capped samples.
  std::vector<std::int64_t> final_horizon(n, 0);
  std::vector<std::uint8_t> capped(n, 0);

  parallel_for(n, cfg.workers, [&](std::size_t i) {
    const auto x0 = omega.points[i];
    if (!box.contains(x0))
      throw ParameterError("estimate_horizon: sample " + std::to_string(i) +
                           " lies outside the constraint box");

    // Grown on demand; holds the past orbit for the recurrence test.
    std::vector<double> orbit(x0.begin(), x0.end());
    State cur(x0.begin(), x0.end());
    State nxt(dim);

    for (std::int64_t s = 1;; ++s) {
      sys.step_into(cur, nxt);
      if (!all_finite(nxt))
        throw SimulationError("sample " + std::to_string(i) + ": system '" +
                              sys.name() + "' produced a non-finite state at step " +
                              std::to_string(s));
      if (!box.contains(nxt)) {
        exit_steps[i] = s;
        final_horizon[i] = s - 1;
        return;
      }
      if (s - 1 >= cfg.t_bar_horizon) {
        // Distance from the new state to the sample's own past orbit,
        // scanned backwards: recurrent orbits revisit their recent past
        // first, so the early exit usually fires within a few steps.
        const std::int64_t past = s;  // orbit holds states 0..s-1
        bool recurred = false;
        for (std::int64_t k = past - 1; k >= 0; --k) {
          const double* p = orbit.data() + static_cast<std::size_t>(k) * dim;
          double d2 = 0.0;
          for (std::size_t j = 0; j < dim; ++j) {
            const double d = nxt[j] - p[j];
            d2 += d * d;
          }
          if (d2 <= delta_sq) {
            recurred = true;
            break;
          }
        }
        if (recurred) {
          final_horizon[i] = s - 1;
          return;
        }
      }
      if (s >= cfg.max_steps_hard) {
        capped[i] = 1;
        final_horizon[i] = cfg.max_steps_hard;
        return;
      }
      orbit.insert(orbit.end(), nxt.begin(), nxt.end());
      cur.swap(nxt);
    }
  });

  HorizonReport report;
  report.exit_steps = std::move(exit_steps);

  std::int64_t t_star = 0;
  for (const auto& e : report.exit_steps)
    if (e && *e > t_star) t_star = *e;
  report.t_star = t_star;

  std::size_t exited = 0;
  for (const auto& e : report.exit_steps) exited += e.has_value();
  for (std::size_t i = 0; i < n; ++i)
    if (capped[i]) report.capped_samples.push_back(i);

  if (!report.capped_samples.empty())
    report.terminated_by = Phase1Termination::hard_cap;
  else if (exited == n)
    report.terminated_by = Phase1Termination::all_exited;
  else
    report.terminated_by = Phase1Termination::recurrence;

  report.termination_horizon =
      *std::max_element(final_horizon.begin(), final_horizon.end());

  report.theta = theta_sequence(report.exit_steps, report.t_star + 1);
  report.t_bar = t_bar(report.theta);
  return report;
}

}  // namespace invariset
