// Counter-based RNG, uniform box sampling, and the sample-size calculators.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <tuple>
#include <vector>

#include <invariset/sampling.hpp>

using namespace invariset;

TEST_CASE("rng draws are pure functions of (seed, index)") {
  CHECK(rng::at(42, 0) == rng::at(42, 0));
  CHECK(rng::at(42, 0) != rng::at(42, 1));
  CHECK(rng::at(42, 0) != rng::at(43, 0));
  CHECK(rng::unit(7, 3) == rng::unit(7, 3));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = rng::unit(123, i);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("derived streams differ from the parent and from each other") {
  const std::uint64_t seed = 99;
  const auto a = rng::derive(seed, 1);
  const auto b = rng::derive(seed, 2);
  CHECK(a != b);
  CHECK(a != seed);
  CHECK(rng::derive(seed, 1) == a);  // deterministic
  // Streams decorrelate: first draws of sibling streams differ.
  CHECK(rng::at(a, 0) != rng::at(b, 0));
}

TEST_CASE("uniform draws pass a chi-squared bin test") {
  // 1e5 draws into 100 equal bins; the 99.9% critical value for 99 degrees
  // of freedom is 148.23.  Deterministic given the fixed seed.
  constexpr int kBins = 100;
  constexpr std::int64_t kDraws = 100000;
  std::vector<std::int64_t> counts(kBins, 0);
  for (std::int64_t i = 0; i < kDraws; ++i) {
    const double u = rng::unit(2024, static_cast<std::uint64_t>(i));
    const int bin = static_cast<int>(u * kBins);
    ++counts[bin < kBins ? bin : kBins - 1];
  }
  const double expected = static_cast<double>(kDraws) / kBins;
  double chi2 = 0.0;
  for (const auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  CHECK(chi2 < 148.23035916510173);
}

TEST_CASE("samples land inside the box and are worker-independent") {
  const ConstraintBox box({-1.0, 2.0}, {1.0, 5.0});
  const auto one = sample_uniform(box, 5000, 31, 1);
  const auto four = sample_uniform(box, 5000, 31, 4);
  CHECK(one.points.raw() == four.points.raw());  // bitwise identical
  CHECK(one.seed == 31);
  for (std::size_t i = 0; i < one.points.size(); ++i)
    CHECK(box.contains(one.points[i]));
}

TEST_CASE("any sample point can be regenerated in isolation") {
  const ConstraintBox box({0.0, 0.0, 0.0}, {1.0, 2.0, 3.0});
  const auto set = sample_uniform(box, 100, 77);
  State x(3);
  for (const std::uint64_t i : {std::uint64_t{0}, std::uint64_t{42},
                                std::uint64_t{99}}) {
    sample_point(box, 77, i, x);
    const auto row = set.points[static_cast<std::size_t>(i)];
    CHECK(x[0] == row[0]);
    CHECK(x[1] == row[1]);
    CHECK(x[2] == row[2]);
  }
}

TEST_CASE("sample_uniform rejects empty requests") {
  const ConstraintBox box({0.0}, {1.0});
  CHECK_THROWS_AS(sample_uniform(box, 0, 1), ParameterError);
  CHECK_THROWS_AS(sample_uniform(box, -5, 1), ParameterError);
}

TEST_CASE("phase-one sample sizes match hand-computed values") {
  CHECK(phase1_sample_size(1e-3, 0.05) == 2995);
  CHECK(phase1_sample_size(0.01, 0.01) == 459);
  CHECK(phase1_sample_size(0.05, 0.5) == 14);
  CHECK(phase1_sample_size(0.25, 0.5) == 3);
  CHECK(phase1_sample_size(0.5, 0.5) == 1);
  CHECK(phase1_sample_size(1.0, 0.5) == 1);   // one sample suffices
  CHECK(phase1_sample_size(0.5, 1.0) == 1);

  CHECK(phase1_sample_size_conservative(1e-3, 0.05) == 9899);
  CHECK(phase1_sample_size_conservative(0.5, 0.5) == 2);
  CHECK(phase1_sample_size_conservative(1.0, 0.5) == 1);

  CHECK(hoeffding_sample_size(1e-3, 0.05) == 5298318);
  CHECK(hoeffding_sample_size(0.5, 1.0) == 3);
}

TEST_CASE("sample sizes reject invalid probabilities") {
  CHECK_THROWS_AS(phase1_sample_size(0.0, 0.5), ParameterError);
  CHECK_THROWS_AS(phase1_sample_size(0.5, 0.0), ParameterError);
  CHECK_THROWS_AS(phase1_sample_size(-0.1, 0.5), ParameterError);
  CHECK_THROWS_AS(phase1_sample_size(0.5, 1.5), ParameterError);
  CHECK_THROWS_AS(phase1_sample_size_conservative(1.5, 0.5), ParameterError);
  CHECK_THROWS_AS(hoeffding_sample_size(0.5, -1.0), ParameterError);
}

TEST_CASE("sizing rules are ordered and monotone over a log grid") {
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i)
    grid.push_back(1e-4 * std::pow(0.5 / 1e-4, i / 9.0));

  for (const double eps : grid) {
    for (const double beta : grid) {
      const auto n_std = phase1_sample_size(eps, beta);
      const auto n_con = phase1_sample_size_conservative(eps, beta);
      const auto n_hoe = hoeffding_sample_size(eps, beta);
      INFO("eps " << eps << " beta " << beta);
      CHECK(n_hoe >= n_con);
      CHECK(n_con >= n_std);
    }
  }

  // Nonincreasing in each argument separately.
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    CHECK(phase1_sample_size(grid[i], 0.05) >=
          phase1_sample_size(grid[i + 1], 0.05));
    CHECK(phase1_sample_size(1e-3, grid[i]) >=
          phase1_sample_size(1e-3, grid[i + 1]));
  }
}

TEST_CASE("scenario confidence matches frozen values") {
  CHECK_THAT(scenario_confidence(4800, 1e-3, 1),
             Catch::Matchers::WithinRel(0.00821000619294, 1e-9));
  CHECK_THAT(scenario_confidence(4800, 1e-3, 2),
             Catch::Matchers::WithinRel(0.0476574833963, 1e-9));
}

TEST_CASE("scenario confidence properties") {
  // d = 1 reduces to the plain no-violation probability.
  for (const std::int64_t n : {10, 100, 4800}) {
    const double direct = std::exp(static_cast<double>(n) * std::log1p(-1e-3));
    CHECK_THAT(scenario_confidence(n, 1e-3, 1),
               Catch::Matchers::WithinRel(direct, 1e-13));
  }
  // Strictly decreasing in the sample count, increasing in d.
  CHECK(scenario_confidence(100, 0.01, 2) > scenario_confidence(101, 0.01, 2));
  CHECK(scenario_confidence(100, 0.01, 2) > scenario_confidence(100, 0.01, 1));
  CHECK(scenario_confidence(100, 0.01, 3) > scenario_confidence(100, 0.01, 2));

  CHECK_THROWS_AS(scenario_confidence(10, 0.01, 0), ParameterError);
  CHECK_THROWS_AS(scenario_confidence(1, 0.01, 2), ParameterError);
  CHECK_THROWS_AS(scenario_confidence(10, 0.0, 1), ParameterError);
  CHECK_THROWS_AS(scenario_confidence(10, 1.5, 1), ParameterError);
}

TEST_CASE("scenario sample size is the smallest count below target") {
  CHECK(scenario_sample_size(1e-3, 0.01, 1) == 4603);
  CHECK(scenario_sample_size(1e-3, 0.01, 2) == 6636);
  CHECK(scenario_sample_size(1e-3, 0.05, 2) == 4742);

  for (const auto& [eps, beta, d] :
       std::vector<std::tuple<double, double, std::int64_t>>{
           {1e-3, 0.01, 1}, {1e-3, 0.05, 2}, {0.01, 0.1, 3}, {0.2, 0.3, 1}}) {
    const auto n = scenario_sample_size(eps, beta, d);
    INFO("eps " << eps << " beta " << beta << " d " << d);
    CHECK(scenario_confidence(n, eps, d) < beta);
    if (n > d) CHECK(scenario_confidence(n - 1, eps, d) >= beta);
  }

  // Already below target at the minimum feasible count.
  CHECK(scenario_sample_size(0.9, 0.9, 1) == 1);

  CHECK_THROWS_AS(scenario_sample_size(0.5, 0.5, 0), ParameterError);
  CHECK_THROWS_AS(scenario_sample_size(0.0, 0.5, 1), ParameterError);
  CHECK_THROWS_AS(scenario_sample_size(0.5, 0.0, 1), ParameterError);
}
