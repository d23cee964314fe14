#pragma once

// Seeded uniform sampling over a constraint box, and every a-priori
// sample-size / confidence calculator used by the two phases.
//
// All formulas are evaluated in binary64 with log-space accumulation where
// products would underflow (e.g. (1-eps)^N for N in the millions).

#include <cmath>
#include <cstdint>

#include "core.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace invariset {

/// A reproducible i.i.d. uniform sample over a box.  Point i's coordinate j
/// is draw number i*dim+j of the stream, so any point can be regenerated in
/// isolation.
struct SampleSet {
  PointBuffer points;
  std::uint64_t seed = 0;
};

/// Writes point `index` of stream `seed`, uniform over `box`, into `out`.
inline void sample_point(const ConstraintBox& box, std::uint64_t seed,
                         std::uint64_t index, std::span<double> out) {
  const std::size_t d = box.dim();
  for (std::size_t j = 0; j < d; ++j) {
    const double u = rng::unit(seed, index * d + j);
    out[j] = box.lower()[j] + u * box.side(j);
  }
}

inline SampleSet sample_uniform(const ConstraintBox& box, std::int64_t n,
                                std::uint64_t seed, unsigned workers = 1) {
  if (n < 1) throw ParameterError("sample_uniform: need at least one point");
  SampleSet set;
  set.seed = seed;
  set.points = PointBuffer(box.dim(), static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), workers, [&](std::size_t i) {
    sample_point(box, seed, i, set.points[i]);
  });
  return set;
}

namespace detail {

inline void check_probability(double value, const char* name,
                              bool allow_one = true) {
  const bool ok = value > 0.0 && (allow_one ? value <= 1.0 : value < 1.0) &&
                  std::isfinite(value);
  if (!ok)
    throw ParameterError(std::string(name) + " must lie in (0,1" +
                         (allow_one ? "]" : ")"));
}

inline std::int64_t ceil_to_count(double value) {
  const double c = std::ceil(value);
  const std::int64_t n = static_cast<std::int64_t>(c);
  return n < 1 ? 1 : n;
}

inline double log_choose(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace detail

/// Samples needed so that, with confidence 1-beta, the set implied by the
/// largest observed exit time has escape measure at most epsilon:
///   N = ceil( ln(beta) / ln(1-epsilon) ).
inline std::int64_t phase1_sample_size(double epsilon, double beta) {
  detail::check_probability(epsilon, "epsilon");
  detail::check_probability(beta, "beta");
  if (epsilon == 1.0 || beta == 1.0) return 1;
  return detail::ceil_to_count(std::log(beta) / std::log1p(-epsilon));
}

/// The more conservative sizing that also covers the plateau-based estimate:
///   N = ceil( ln(epsilon * beta) / ln(1-epsilon) ).
inline std::int64_t phase1_sample_size_conservative(double epsilon,
                                                    double beta) {
  detail::check_probability(epsilon, "epsilon");
  detail::check_probability(beta, "beta");
  if (epsilon == 1.0) return 1;
  return detail::ceil_to_count((std::log(epsilon) + std::log(beta)) /
                               std::log1p(-epsilon));
}

/// Smallest N with (2/epsilon) * exp(-2 N epsilon^2) <= beta:
///   N = ceil( ln(2/(epsilon*beta)) / (2 epsilon^2) ).
/// Dramatically looser than the other two rules; exposed for comparison.
inline std::int64_t hoeffding_sample_size(double epsilon, double beta) {
  detail::check_probability(epsilon, "epsilon");
  detail::check_probability(beta, "beta");
  const double num = std::log(2.0) - std::log(epsilon) - std::log(beta);
  return detail::ceil_to_count(num / (2.0 * epsilon * epsilon));
}

/// Probability that an n_delta-sample scenario program with d support
/// dimensions misses an eps_tilde-sized violation region:
///   sum_{i=0}^{d-1} C(n_delta, i) eps^i (1-eps)^(n_delta-i).
/// d = 1 gives the plain (1-eps)^N bound; d = 2 additionally counts the
/// one-support-constraint term.
inline double scenario_confidence(std::int64_t n_delta, double eps_tilde,
                                  std::int64_t d = 1) {
  if (d < 1) throw ParameterError("scenario dimension d must be >= 1");
  if (n_delta < d)
    throw ParameterError("scenario_confidence: need n_delta >= d");
  detail::check_probability(eps_tilde, "eps_tilde");

  const double log_eps = std::log(eps_tilde);       // -inf when eps_tilde -> 0
  const double log_1m_eps = std::log1p(-eps_tilde); // -inf when eps_tilde = 1
  double sum = 0.0;
  for (std::int64_t i = 0; i < d; ++i) {
    double log_term = detail::log_choose(n_delta, i) +
                      static_cast<double>(n_delta - i) * log_1m_eps;
    if (i > 0) log_term += static_cast<double>(i) * log_eps;
    sum += std::exp(log_term);
  }
  return sum;
}

/// Smallest n_delta with scenario_confidence(n_delta, eps_tilde, d) strictly
/// below beta_tilde, found by exponential growth then binary search (the
/// confidence is strictly decreasing in n_delta).
inline std::int64_t scenario_sample_size(double eps_tilde, double beta_tilde,
                                         std::int64_t d = 1) {
  detail::check_probability(eps_tilde, "eps_tilde", /*allow_one=*/true);
  detail::check_probability(beta_tilde, "beta_tilde");
  if (d < 1) throw ParameterError("scenario dimension d must be >= 1");

  constexpr std::int64_t kCap = std::int64_t(1) << 40;
  std::int64_t hi = d;
  if (scenario_confidence(hi, eps_tilde, d) < beta_tilde) return hi;
  while (scenario_confidence(hi, eps_tilde, d) >= beta_tilde) {
    if (hi > kCap)
      throw ParameterError(
          "scenario_sample_size: target confidence needs more than 2^40 "
          "samples");
    hi *= 2;
  }
  std::int64_t lo = hi / 2;  // confidence(lo) >= beta_tilde > confidence(hi)
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (scenario_confidence(mid, eps_tilde, d) < beta_tilde)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace invariset
