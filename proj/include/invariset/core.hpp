#pragma once

// Core value types shared by every module: state vectors, dense point
// storage, axis-aligned constraint boxes, and the library error taxonomy.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace invariset {

/// A single system state: a point in R^n.
using State = std::vector<double>;

/// Invalid user-supplied parameter (out-of-range probability, bad box, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A system evaluation produced an unusable result (NaN/Inf state).
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure while communicating with an external simulator process.
class SubprocessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline bool all_finite(std::span<const double> xs) noexcept {
  for (double v : xs) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

/// Squared Euclidean distance between two points of equal dimension.
inline double squared_distance(std::span<const double> a,
                               std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

inline double distance(std::span<const double> a,
                       std::span<const double> b) noexcept {
  return std::sqrt(squared_distance(a, b));
}

/// Row-major storage for a list of points sharing one dimension.
///
/// Keeping coordinates contiguous (instead of vector-of-vectors) matters for
/// the nearest-neighbor index and the per-sample trajectory buffers, both of
/// which scan millions of points.
class PointBuffer {
 public:
  PointBuffer() = default;
  explicit PointBuffer(std::size_t dim) : dim_(dim) {}
  PointBuffer(std::size_t dim, std::size_t count)
      : dim_(dim), data_(dim * count, 0.0) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const double> operator[](std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> operator[](std::size_t i) noexcept {
    return {data_.data() + i * dim_, dim_};
  }

  void push_back(std::span<const double> p) {
    if (p.size() != dim_) throw ParameterError("point dimension mismatch");
    data_.insert(data_.end(), p.begin(), p.end());
  }

  void append(const PointBuffer& other) {
    if (other.dim_ != dim_) throw ParameterError("buffer dimension mismatch");
    data_.insert(data_.end(), other.data_.begin(), other.data_.end());
  }

  void reserve(std::size_t count) { data_.reserve(count * dim_); }
  void clear() noexcept { data_.clear(); }
  void resize(std::size_t count) { data_.resize(count * dim_, 0.0); }

  const std::vector<double>& raw() const noexcept { return data_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Appends the shortest decimal representation of `v` that parses back to
/// exactly the same binary64 value.  All text output (CSV, JSON, the wire
/// protocol) goes through this, which is what makes file artifacts and
/// process round-trips exact.
inline void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

inline std::string format_double(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

/// Parses a decimal double; throws ParameterError on malformed or trailing
/// text.
inline double parse_double(std::string_view text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParameterError("malformed number '" + std::string(text) + "'");
  return v;
}

/// The axis-aligned compact constraint set [lo_1,hi_1] x ... x [lo_n,hi_n].
/// Membership is inclusive of the boundary; NaN coordinates never belong.
class ConstraintBox {
 public:
  ConstraintBox() = default;

  ConstraintBox(State lower, State upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.empty() || lower_.size() != upper_.size())
      throw ParameterError("constraint box needs matching non-empty bounds");
    for (std::size_t j = 0; j < lower_.size(); ++j) {
      if (!(std::isfinite(lower_[j]) && std::isfinite(upper_[j])))
        throw ParameterError("constraint box bounds must be finite");
      if (!(lower_[j] < upper_[j]))
        throw ParameterError("constraint box requires lower < upper per axis");
    }
  }

  std::size_t dim() const noexcept { return lower_.size(); }
  const State& lower() const noexcept { return lower_; }
  const State& upper() const noexcept { return upper_; }
  double side(std::size_t j) const noexcept { return upper_[j] - lower_[j]; }

  bool contains(std::span<const double> x) const noexcept {
    if (x.size() != lower_.size()) return false;
    for (std::size_t j = 0; j < lower_.size(); ++j) {
      if (!(x[j] >= lower_[j] && x[j] <= upper_[j])) return false;
    }
    return true;
  }

  /// Euclidean length of the main diagonal.
  double diameter() const noexcept {
    double s = 0.0;
    for (std::size_t j = 0; j < lower_.size(); ++j) s += side(j) * side(j);
    return std::sqrt(s);
  }

  double volume() const noexcept {
    double v = 1.0;
    for (std::size_t j = 0; j < lower_.size(); ++j) v *= side(j);
    return v;
  }

 private:
  State lower_;
  State upper_;
};

}  // namespace invariset
