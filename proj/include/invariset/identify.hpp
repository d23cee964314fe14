#pragma once

// Phase II: explicit identification of the almost-invariant set.
//
// Reference points are labeled inside/outside by running the system for
// t_star steps (a point is inside exactly when its whole t_star-step orbit
// stays in the box).  Membership in the identified set is then a
// nearest-neighbor test: x belongs when its distance to the inside
// references minus its distance to the outside references is at most a
// signed radius r.  The radius comes from a one-variable scenario program:
// delta_star is the smallest bound covering all fresh test points, and the
// inner/outer classifiers use radii -delta_star / +delta_star.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "dynamics.hpp"
#include "horizon.hpp"
#include "nn.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "sampling.hpp"

namespace invariset {

enum class PointLabel : std::uint8_t { inside, outside };

/// Reference points split by their relationship to the implicit set: a point
/// is `inside` when its t_star-step orbit never leaves the box.
struct LabeledReference {
  PointBuffer inside;
  PointBuffer outside;
  std::int64_t t_star = 0;

  std::size_t size() const noexcept { return inside.size() + outside.size(); }
};

/// Labels every point by direct simulation (exactly reproducible: re-running
/// the same t_star-step orbit re-derives each label).
inline LabeledReference label_points(const SystemModel& sys,
                                     const PointBuffer& points,
                                     const ConstraintBox& box,
                                     std::int64_t t_star,
                                     unsigned workers = 1) {
  if (t_star < 0) throw ParameterError("label_points: negative horizon");
  if (points.dim() != box.dim())
    throw ParameterError("label_points: dimension mismatch");

  const std::size_t n = points.size();
  std::vector<std::uint8_t> is_inside(n, 0);
  parallel_for(n, workers, [&](std::size_t i) {
    try {
      is_inside[i] = !exit_time(sys, points[i], box, t_star).has_value();
    } catch (const SimulationError& e) {
      throw SimulationError("labeling point " + std::to_string(i) + ": " +
                            e.what());
    }
  });

  LabeledReference ref;
  ref.t_star = t_star;
  ref.inside = PointBuffer(points.dim());
  ref.outside = PointBuffer(points.dim());
  for (std::size_t i = 0; i < n; ++i) {
    (is_inside[i] ? ref.inside : ref.outside).push_back(points[i]);
  }
  return ref;
}

/// Explicit membership test for the identified set at signed radius r:
///   x is a member  <=>  x in box  and  dist(x, inside) - dist(x, outside) <= r.
/// Distance to an empty side is +infinity, so a classifier with no inside
/// references accepts nothing and one with no outside references accepts all
/// of the box.
class SetClassifier {
 public:
  SetClassifier(ConstraintBox box, std::shared_ptr<const KdTree> inside,
                std::shared_ptr<const KdTree> outside, double radius)
      : box_(std::move(box)),
        inside_(std::move(inside)),
        outside_(std::move(outside)),
        radius_(radius) {}

  double radius() const noexcept { return radius_; }
  const ConstraintBox& box() const noexcept { return box_; }
  const KdTree& inside_index() const noexcept { return *inside_; }
  const KdTree& outside_index() const noexcept { return *outside_; }

  bool contains(std::span<const double> x) const noexcept {
    if (!box_.contains(x)) return false;
    // inf - inf = NaN and NaN <= r is false, so two empty sides reject —
    // exactly the empty-set convention.
    const double diff = inside_->distance(x) - outside_->distance(x);
    return diff <= radius_;
  }

 private:
  ConstraintBox box_;
  std::shared_ptr<const KdTree> inside_;
  std::shared_ptr<const KdTree> outside_;
  double radius_;
};

inline bool classify(const SetClassifier& classifier,
                     std::span<const double> x) {
  return classifier.contains(x);
}

/// The scenario constraint value at x: distance to the reference side
/// matching x's own label (+infinity when that side is empty).
inline double h_value(std::span<const double> x, PointLabel label,
                      const KdTree& inside_index,
                      const KdTree& outside_index) {
  return label == PointLabel::inside ? inside_index.distance(x)
                                     : outside_index.distance(x);
}

/// Exact optimum of the sampled scenario program: the smallest delta >= 0
/// with h(x) <= delta for every test point, i.e. max(0, max_x h(x)).
/// Returns +infinity when a test point's reference side is empty.
inline double solve_delta_star(const LabeledReference& test,
                               const KdTree& inside_index,
                               const KdTree& outside_index,
                               unsigned workers = 1) {
  const std::size_t ni = test.inside.size();
  const std::size_t no = test.outside.size();
  std::vector<double> h(ni + no, 0.0);
  parallel_for(ni + no, workers, [&](std::size_t i) {
    h[i] = i < ni ? inside_index.distance(test.inside[i])
                  : outside_index.distance(test.outside[i - ni]);
  });
  double best = 0.0;
  for (const double v : h) best = std::max(best, v);
  return best;
}

/// Convenience overload building the reference indexes on the fly.
inline double solve_delta_star(const LabeledReference& test,
                               const LabeledReference& reference,
                               unsigned workers = 1) {
  const KdTree inside_index(reference.inside);
  const KdTree outside_index(reference.outside);
  return solve_delta_star(test, inside_index, outside_index, workers);
}

struct Phase2Config {
  double eps_tilde = 1e-3;    // violation tolerance per round
  double beta_tilde = 0.01;   // per-round confidence target
  double delta_bar = 0.0;     // stop once delta_star falls to this
  std::int64_t d = 1;         // scenario dimension for the sizing rule
  std::int64_t max_rounds = 64;
  std::int64_t n_delta_override = 0;  // 0 = derive from (eps_tilde, beta_tilde, d)
  unsigned workers = 1;

  void validate() const {
    if (!(delta_bar >= 0.0))
      throw ParameterError("delta_bar must be non-negative");
    if (max_rounds < 1) throw ParameterError("max_rounds must be >= 1");
    if (n_delta_override < 0)
      throw ParameterError("n_delta override must be >= 0 (0 = automatic)");
    // eps_tilde / beta_tilde / d are validated by the sizing functions.
  }
};

struct RoundRecord {
  std::int64_t n_reference = 0;  // reference size the round was solved against
  double delta_star = 0.0;
};

struct Phase2Result {
  LabeledReference reference;  // final merged reference set
  std::shared_ptr<const KdTree> inside_index;
  std::shared_ptr<const KdTree> outside_index;
  double delta_star = 0.0;     // last round's optimum
  std::int64_t n_delta = 0;    // fresh test points per round
  std::vector<RoundRecord> rounds;
  bool round_cap_hit = false;

  SetClassifier inner(const ConstraintBox& box) const {
    return SetClassifier(box, inside_index, outside_index, -delta_star);
  }
  SetClassifier outer(const ConstraintBox& box) const {
    return SetClassifier(box, inside_index, outside_index, delta_star);
  }
};

/// The iterative identification loop.  Starting from the Phase-I sample as
/// the reference set, each round draws n_delta fresh points, labels them by
/// t_star-step simulation, solves the scenario program against the current
/// reference, and then merges the fresh points in.  Terminates once
/// delta_star <= delta_bar (checked after the merge) or after max_rounds
/// rounds (flagged).  Round r uses the independent sample stream
/// derive(seed, r).
inline Phase2Result identify_set(const SystemModel& sys,
                                 const SampleSet& omega,
                                 std::int64_t t_star,
                                 const ConstraintBox& box,
                                 const Phase2Config& cfg,
                                 std::uint64_t seed) {
  cfg.validate();
  if (t_star < 0)
    throw ParameterError("identify_set: negative labeling horizon");

  Phase2Result result;
  result.n_delta =
      cfg.n_delta_override > 0
          ? cfg.n_delta_override
          : scenario_sample_size(cfg.eps_tilde, cfg.beta_tilde, cfg.d);

  result.reference =
      label_points(sys, omega.points, box, t_star, cfg.workers);
  auto inside_index =
      std::make_shared<const KdTree>(result.reference.inside);
  auto outside_index =
      std::make_shared<const KdTree>(result.reference.outside);

  for (std::int64_t round = 1;; ++round) {
    const std::uint64_t round_seed = rng::derive(seed, static_cast<std::uint64_t>(round));
    const SampleSet fresh =
        sample_uniform(box, result.n_delta, round_seed, cfg.workers);
    const LabeledReference labeled =
        label_points(sys, fresh.points, box, t_star, cfg.workers);

    const double delta = solve_delta_star(labeled, *inside_index,
                                          *outside_index, cfg.workers);
    result.rounds.push_back(
        {static_cast<std::int64_t>(result.reference.size()), delta});
    result.delta_star = delta;

    // Merge the round's test points into the reference and rebuild the
    // indexes (rebuild cost is dominated by the simulations above).
    result.reference.inside.append(labeled.inside);
    result.reference.outside.append(labeled.outside);
    inside_index = std::make_shared<const KdTree>(result.reference.inside);
    outside_index = std::make_shared<const KdTree>(result.reference.outside);

    if (delta <= cfg.delta_bar) break;
    if (round >= cfg.max_rounds) {
      result.round_cap_hit = true;
      break;
    }
  }

  result.inside_index = std::move(inside_index);
  result.outside_index = std::move(outside_index);
  return result;
}

/// Convenience overload taking the Phase-I report directly.
inline Phase2Result identify_set(const SystemModel& sys,
                                 const SampleSet& omega,
                                 const HorizonReport& horizon,
                                 const ConstraintBox& box,
                                 const Phase2Config& cfg,
                                 std::uint64_t seed) {
  return identify_set(sys, omega, horizon.t_star, box, cfg, seed);
}

}  // namespace invariset
