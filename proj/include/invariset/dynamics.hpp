#pragma once

// Discrete-time system models and trajectory simulation.
//
// A SystemModel is a black box mapping a state to its successor state.  The
// rest of the library only ever calls step(); nothing downstream assumes any
// structure beyond determinism.  Four built-in benchmark systems are provided
// for experiments and for white-box verification.

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace invariset {

class SystemModel {
 public:
  virtual ~SystemModel() = default;

  virtual int dim() const = 0;
  virtual std::string name() const = 0;

  /// Writes the successor state f(x) into `out`.  Both spans have size
  /// dim() and must not alias.  Implementations must be deterministic and
  /// safe for concurrent read-only use.
  virtual void step_into(std::span<const double> x,
                         std::span<double> out) const = 0;

  /// Convenience wrapper around step_into with a finiteness check.
  State step(std::span<const double> x) const {
    State out(static_cast<std::size_t>(dim()));
    step_into(x, out);
    if (!all_finite(out))
      throw SimulationError("system '" + name() +
                            "' produced a non-finite state");
    return out;
  }
};

/// A simulated orbit x_0, x_1, ..., together with the first time step (>= 1)
/// at which the orbit left the constraint box, if that happened within the
/// simulated window.  An absent first_exit means every recorded state stayed
/// inside the box.
struct Trajectory {
  PointBuffer states;
  std::optional<std::int64_t> first_exit;
};

/// Simulates from x0 for up to max_steps steps, recording every state.
/// Stops early at the first exit from `box`; the exiting state is recorded
/// as the last entry and first_exit is set to its step index.
inline Trajectory simulate(const SystemModel& sys, std::span<const double> x0,
                           const ConstraintBox& box, std::int64_t max_steps) {
  if (x0.size() != static_cast<std::size_t>(sys.dim()) ||
      x0.size() != box.dim())
    throw ParameterError("simulate: dimension mismatch");
  if (!box.contains(x0))
    throw ParameterError("simulate: initial state outside the constraint box");
  if (max_steps < 0) throw ParameterError("simulate: negative step count");

  Trajectory traj;
  traj.states = PointBuffer(x0.size());
  traj.states.reserve(static_cast<std::size_t>(max_steps) + 1);
  traj.states.push_back(x0);

  State cur(x0.begin(), x0.end());
  for (std::int64_t t = 1; t <= max_steps; ++t) {
    cur = sys.step(cur);
    traj.states.push_back(cur);
    if (!box.contains(cur)) {
      traj.first_exit = t;
      break;
    }
  }
  return traj;
}

/// First step index in [1, max_steps] at which the orbit from x0 leaves
/// `box`, or nullopt if it stays inside for the whole window.  Unlike
/// simulate(), nothing is recorded; this is the hot path for labeling,
/// grid evaluation, and Monte-Carlo estimation.
inline std::optional<std::int64_t> exit_time(const SystemModel& sys,
                                             std::span<const double> x0,
                                             const ConstraintBox& box,
                                             std::int64_t max_steps) {
  if (x0.size() != static_cast<std::size_t>(sys.dim()) ||
      x0.size() != box.dim())
    throw ParameterError("exit_time: dimension mismatch");
  if (max_steps < 0) throw ParameterError("exit_time: negative step count");

  State a(x0.begin(), x0.end());
  State b(x0.size());
  for (std::int64_t t = 1; t <= max_steps; ++t) {
    sys.step_into(a, b);
    if (!all_finite(b))
      throw SimulationError("system '" + sys.name() +
                            "' produced a non-finite state");
    if (!box.contains(b)) return t;
    a.swap(b);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Built-in benchmark systems
// ---------------------------------------------------------------------------

/// Planar polynomial map
///   x1' = 2 x1^2 + x2
///   x2' = -2 (x1')^2 - 0.8 x1
/// asymptotically stable at the origin; default box [-1,1]^2.
class Example1System final : public SystemModel {
 public:
  int dim() const override { return 2; }
  std::string name() const override { return "example1"; }
  void step_into(std::span<const double> x,
                 std::span<double> out) const override {
    const double y1 = 2.0 * x[0] * x[0] + x[1];
    out[0] = y1;
    out[1] = -2.0 * y1 * y1 - 0.8 * x[0];
  }
};

/// Odd piecewise-linear feedback nonlinearity used by the Lur'e benchmark:
///   y            on [0, 2)
///   0.25 y + 1.5 on [2, 4)
///   2.5          on [4, inf)
/// extended to negative arguments by phi(-y) = -phi(y).
inline double lure_nonlinearity(double y) noexcept {
  const double a = std::abs(y);
  double v;
  if (a < 2.0) {
    v = a;
  } else if (a < 4.0) {
    v = 0.25 * a + 1.5;
  } else {
    v = 2.5;
  }
  return y < 0.0 ? -v : v;
}

/// Feedback interconnection x' = A x - B phi(F.x) with saturation-like phi;
/// has an attractor inside the default box [-15,15] x [-10,10] without being
/// stable on all of it.
class LureSystem final : public SystemModel {
 public:
  int dim() const override { return 2; }
  std::string name() const override { return "lure"; }
  void step_into(std::span<const double> x,
                 std::span<double> out) const override {
    const double y = kF1 * x[0] + kF2 * x[1];
    const double u = lure_nonlinearity(y);
    out[0] = 1.2 * x[0] + 1.0 * x[1] - 0.5 * u;
    out[1] = 1.2 * x[1] - 1.0 * u;
  }

 private:
  static constexpr double kF1 = 0.6290;
  static constexpr double kF2 = 1.2261;
};

/// Quadratic map
///   x1' = x1 + x2
///   x2' = -0.5952 + x1^2
/// not stable at the origin but carries an attractor inside the default
/// box [-2,2]^2; fixed points at (+-sqrt(0.5952), 0).
class ChatalaSystem final : public SystemModel {
 public:
  int dim() const override { return 2; }
  std::string name() const override { return "chatala"; }
  void step_into(std::span<const double> x,
                 std::span<double> out) const override {
    out[0] = x[0] + x[1];
    out[1] = -0.5952 + x[0] * x[0];
  }
};

/// Piecewise-linear switched map x' = A_1 x when |x1| > |x2|, else A_2 x.
/// The matrices are exact matrix exponentials of
///   [-0.1  5; -1 -0.1]   and   [-0.1  1; -5 -0.1],
/// hard-coded via the closed form e^{aI+K} = e^a (cos(w) I + sin(w)/w K)
/// for K with K^2 = -w^2 I (here w = sqrt(5)); the constants are verified
/// against a truncated power series in the test suite.  Discontinuous
/// dynamics, asymptotically stable; default box [-5,5]^2.
class PwaSystem final : public SystemModel {
 public:
  int dim() const override { return 2; }
  std::string name() const override { return "pwa"; }
  void step_into(std::span<const double> x,
                 std::span<double> out) const override {
    if (std::abs(x[0]) > std::abs(x[1])) {
      out[0] = kA1[0] * x[0] + kA1[1] * x[1];
      out[1] = kA1[2] * x[0] + kA1[3] * x[1];
    } else {
      out[0] = kA2[0] * x[0] + kA2[1] * x[1];
      out[1] = kA2[2] * x[0] + kA2[3] * x[1];
    }
  }

  // Row-major 2x2 entries, full binary64 precision.
  static constexpr double kA1[4] = {
      -0.55853159575713248, 1.5918121899567377,
      -0.31836243799134753, -0.55853159575713248};
  static constexpr double kA2[4] = {
      -0.55853159575713248, 0.31836243799134753,
      -1.5918121899567377, -0.55853159575713248};
};

inline const std::vector<std::string>& builtin_system_names() {
  static const std::vector<std::string> names = {"example1", "lure", "chatala",
                                                 "pwa"};
  return names;
}

/// Constructs one of the built-in systems by name; throws ParameterError for
/// unknown names.
inline std::shared_ptr<SystemModel> make_builtin_system(
    const std::string& name) {
  if (name == "example1") return std::make_shared<Example1System>();
  if (name == "lure") return std::make_shared<LureSystem>();
  if (name == "chatala") return std::make_shared<ChatalaSystem>();
  if (name == "pwa") return std::make_shared<PwaSystem>();
  throw ParameterError("unknown built-in system '" + name + "'");
}

/// The constraint box each built-in benchmark is usually studied on.
inline ConstraintBox builtin_default_box(const std::string& name) {
  if (name == "example1") return ConstraintBox({-1.0, -1.0}, {1.0, 1.0});
  if (name == "lure") return ConstraintBox({-15.0, -10.0}, {15.0, 10.0});
  if (name == "chatala") return ConstraintBox({-2.0, -2.0}, {2.0, 2.0});
  if (name == "pwa") return ConstraintBox({-5.0, -5.0}, {5.0, 5.0});
  throw ParameterError("no default box for system '" + name + "'");
}

}  // namespace invariset
