// Acceptance gate: one self-contained binary that re-checks the project's
// headline guarantees end to end and prints one PASS/FAIL line per criterion.
// Exits 0 only if every criterion holds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <invariset/invariset.hpp>

using namespace invariset;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s: criterion %d: %s\n", ok ? "PASS" : "FAIL", id,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

PointBuffer random_cloud(std::size_t n, std::size_t dim, std::uint64_t seed,
                         double lo, double hi) {
  PointBuffer pts(dim, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      pts[i][j] = lo + (hi - lo) * rng::unit(seed, i * dim + j);
  return pts;
}

std::shared_ptr<const KdTree> tree_of(const PointBuffer& pts) {
  return std::make_shared<const KdTree>(pts);
}

SetClassifier make_pi(const ConstraintBox& box, const PointBuffer& s1,
                      const PointBuffer& s2, double r) {
  return SetClassifier(box, tree_of(s1), tree_of(s2), r);
}

std::int64_t median_of(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// ---------------------------------------------------------------------------

void criterion_1_sample_sizes() {
  const auto n = phase1_sample_size(1e-3, 0.05);
  const auto n_cons = phase1_sample_size_conservative(1e-3, 0.05);
  const bool ok = n == 2995 && n_cons == 9899;
  report(1, ok,
         "sample sizes at (1e-3, 0.05): standard " + std::to_string(n) +
             " (want 2995), conservative " + std::to_string(n_cons) +
             " (want 9899)");
}

void criterion_2_scenario_confidence() {
  const double c2 = scenario_confidence(4800, 1e-3, 2);
  const double c1 = scenario_confidence(4800, 1e-3, 1);
  const bool ok =
      std::fabs(c2 - 0.0476) <= 5e-4 && std::fabs(c1 - 0.00821) <= 1e-5;
  report(2, ok,
         "scenario confidence at n=4800, eps=1e-3: d=2 gives " + fmt(c2) +
             " (want 0.0476 +/- 5e-4), d=1 gives " + fmt(c1) +
             " (want 0.00821 +/- 1e-5)");
}

void median_horizon_criterion(int id, const std::string& system,
                              std::int64_t want_median) {
  const auto sys = make_builtin_system(system);
  const auto box = builtin_default_box(system);
  const auto cfg = default_phase1_config(box);
  const auto n = phase1_sample_size(1e-3, 0.05);

  std::vector<std::int64_t> t_stars;
  double max_run = 0.0;
  for (std::uint64_t seed = 0; seed < 11; ++seed) {
    const auto start = Clock::now();
    const auto omega = sample_uniform(box, n, rng::derive(seed, 1));
    const auto rep = estimate_horizon(*sys, omega, box, cfg);
    max_run = std::max(max_run, seconds_since(start));
    t_stars.push_back(rep.t_star);
  }
  const auto median = median_of(t_stars);
  const bool ok = median == want_median && max_run < 5.0;
  std::string values;
  for (const auto t : t_stars) values += std::to_string(t) + " ";
  report(id, ok,
         system + " horizon over 11 seeds at N=" + std::to_string(n) +
             ": median t*=" + std::to_string(median) + " (want " +
             std::to_string(want_median) + "), t* values " + values +
             "- slowest run " + fmt(max_run) + " s");
}

void criterion_5_horizon_spread() {
  const auto start = Clock::now();
  // Sized at the conservative rate: the histogram ranges reproduce there
  // ([25,76] and [20,46] are the observed extremes at N=9899; the standard
  // N=2995 concentrates well below the upper ends of those ranges).
  const auto n = phase1_sample_size_conservative(1e-3, 0.05);
  const struct {
    const char* system;
    std::int64_t lo, hi;
  } cases[] = {{"lure", 25, 76}, {"chatala", 20, 46}};

  bool ok = true;
  std::string detail = "spread over 20 seeds at conservative N=" +
                       std::to_string(n) + ":";
  for (const auto& c : cases) {
    const auto sys = make_builtin_system(c.system);
    const auto box = builtin_default_box(c.system);
    const auto cfg = default_phase1_config(box);
    int in_range = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto omega = sample_uniform(box, n, rng::derive(seed, 1));
      const auto rep = estimate_horizon(*sys, omega, box, cfg);
      in_range += rep.t_star >= c.lo && rep.t_star <= c.hi;
    }
    ok = ok && in_range >= 16;
    detail += std::string(" ") + c.system + " " + std::to_string(in_range) +
              "/20 in [" + std::to_string(c.lo) + "," + std::to_string(c.hi) +
              "]";
  }
  const double elapsed = seconds_since(start);
  ok = ok && elapsed < 300.0;
  report(5, ok, detail + " (need >= 16/20 each); " + fmt(elapsed) + " s");
}

void criterion_6_escape_guarantee() {
  const auto start = Clock::now();
  const auto sys = make_builtin_system("example1");
  const auto box = builtin_default_box("example1");
  const auto cfg = default_phase1_config(box);
  const auto n = phase1_sample_size(1e-3, 0.05);
  const double eps = 1e-3;

  int good = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto omega = sample_uniform(box, n, rng::derive(seed, 1));
    const auto rep = estimate_horizon(*sys, omega, box, cfg);
    const auto est =
        violation_S_k(*sys, box, rep.t_star, 100000, rng::derive(seed, 99));
    const double margin = est.point_estimate() - 3.0 * est.sigma();
    worst = std::max(worst, est.point_estimate());
    good += est.point_estimate() <= eps + 3.0 * est.sigma();
    (void)margin;
  }
  const double elapsed = seconds_since(start);
  const bool ok = good >= 17 && elapsed < 600.0;
  report(6, ok,
         "escape guarantee on example1: " + std::to_string(good) +
             "/20 seeds with one-step escape estimate <= 1e-3 + 3 sigma "
             "(need >= 17), worst estimate " +
             fmt(worst) + "; " + fmt(elapsed) + " s");
}

void criterion_7_sandwich_guarantee() {
  const auto start = Clock::now();
  const auto sys = make_builtin_system("example1");
  const auto box = builtin_default_box("example1");
  const auto p1 = default_phase1_config(box);
  const std::uint64_t seed = 1;

  const auto omega =
      sample_uniform(box, phase1_sample_size(1e-3, 0.05), rng::derive(seed, 1));
  const auto rep = estimate_horizon(*sys, omega, box, p1);

  Phase2Config cfg;
  cfg.eps_tilde = 1e-3;
  cfg.beta_tilde = 0.01;
  cfg.delta_bar = 0.01;
  cfg.d = 1;
  const auto result =
      identify_set(*sys, omega, rep.t_star, box, cfg, rng::derive(seed, 2));

  const auto measures =
      sandwich_measures(result.inner(box), result.outer(box), *sys, box,
                        rep.t_star, 100000, rng::derive(seed, 3));
  const double excess = measures.inner_excess.point_estimate();
  const double deficit = measures.outer_deficit.point_estimate();
  const bool excess_ok =
      excess <= 1e-3 + 3.0 * measures.inner_excess.sigma();
  const bool deficit_ok =
      deficit <= 1e-3 + 3.0 * measures.outer_deficit.sigma();
  const double elapsed = seconds_since(start);
  const bool ok =
      excess_ok && deficit_ok && !result.round_cap_hit && elapsed < 300.0;
  report(7, ok,
         "sandwich on example1 full pipeline (delta_bar 0.01): delta*=" +
             fmt(result.delta_star) + " after " +
             std::to_string(result.rounds.size()) +
             " rounds, inner excess " + fmt(excess) + ", outer deficit " +
             fmt(deficit) + " (each must be <= 1e-3 + 3 sigma); " +
             fmt(elapsed) + " s");
}

void criterion_8_classifier_algebra() {
  const auto start = Clock::now();
  const ConstraintBox box({-1.0, -1.0}, {1.0, 1.0});
  const double two_pi = 2.0 * std::acos(-1.0);
  std::size_t bad_i = 0, bad_ii = 0, bad_iii = 0;

  for (int instance = 0; instance < 200; ++instance) {
    // (i) zero radius with a finite set against its complement recovers the
    // partition exactly.
    {
      const auto seed = static_cast<std::uint64_t>(93000 + instance);
      const auto n = 20 + static_cast<std::size_t>(rng::at(seed, 0) % 81);
      const auto pts = random_cloud(n, 2, seed * 11 + 3, -1.0, 1.0);
      PointBuffer s(2), complement(2);
      std::vector<bool> in_s(n);
      for (std::size_t i = 0; i < n; ++i) {
        in_s[i] = rng::at(seed, 50 + i) % 2 == 0;
        (in_s[i] ? s : complement).push_back(pts[i]);
      }
      const auto pi = make_pi(box, s, complement, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        bad_i += pi.contains(pts[i]) != in_s[i];
    }

    // (ii) growing the accept side and shrinking the reject side can only
    // grow the classified set.
    {
      const auto seed = static_cast<std::uint64_t>(94000 + instance);
      const auto n1 = 5 + static_cast<std::size_t>(rng::at(seed, 0) % 26);
      const auto n2 = 5 + static_cast<std::size_t>(rng::at(seed, 1) % 26);
      const auto extra = 1 + static_cast<std::size_t>(rng::at(seed, 2) % 10);
      const double r = -0.5 + rng::unit(seed, 3);
      const auto s1 = random_cloud(n1, 2, seed * 11 + 4, -1.0, 1.0);
      PointBuffer s1_plus = s1;
      s1_plus.append(random_cloud(extra, 2, seed * 11 + 5, -1.0, 1.0));
      const auto s2 = random_cloud(n2, 2, seed * 11 + 6, -1.0, 1.0);
      PointBuffer s2_minus(2);
      for (std::size_t i = 0; i + 1 < s2.size(); ++i)
        s2_minus.push_back(s2[i]);
      if (s2_minus.empty()) s2_minus.push_back(s2[0]);

      const auto small = make_pi(box, s1, s2, r);
      const auto large = make_pi(box, s1_plus, s2_minus, r);
      const auto queries = random_cloud(50, 2, seed * 11 + 7, -1.0, 1.0);
      for (std::size_t i = 0; i < queries.size(); ++i)
        bad_ii += small.contains(queries[i]) && !large.contains(queries[i]);
    }

    // (iii) inflating a side by delta shifts the radius by at most delta,
    // in the matching direction.
    {
      const auto seed = static_cast<std::uint64_t>(95000 + instance);
      const auto n1 = 3 + static_cast<std::size_t>(rng::at(seed, 0) % 12);
      const auto n2 = 3 + static_cast<std::size_t>(rng::at(seed, 1) % 12);
      const double r = -0.3 + 0.6 * rng::unit(seed, 2);
      const double delta = 0.01 + 0.3 * rng::unit(seed, 3);
      const auto s1 = random_cloud(n1, 2, seed * 13 + 1, -1.0, 1.0);
      const auto s2 = random_cloud(n2, 2, seed * 13 + 2, -1.0, 1.0);
      const auto inflate = [&](const PointBuffer& side, std::uint64_t tag) {
        PointBuffer out = side;
        for (std::size_t i = 0; i < side.size(); ++i)
          for (std::uint64_t k = 0; k < 4; ++k) {
            const double angle = two_pi * rng::unit(seed ^ tag, i * 4 + k);
            out.push_back(State{side[i][0] + delta * std::cos(angle),
                                side[i][1] + delta * std::sin(angle)});
          }
        return out;
      };
      const auto s1_plus = inflate(s1, 0x11);
      const auto s2_plus = inflate(s2, 0x22);
      const auto pi_inflated_in = make_pi(box, s1_plus, s2, r);
      const auto pi_relaxed = make_pi(box, s1, s2, r + delta);
      const auto pi_tight = make_pi(box, s1, s2, r - delta);
      const auto pi_inflated_out = make_pi(box, s1, s2_plus, r);
      const auto queries = random_cloud(50, 2, seed * 13 + 3, -1.0, 1.0);
      for (std::size_t i = 0; i < queries.size(); ++i) {
        bad_iii += pi_inflated_in.contains(queries[i]) &&
                   !pi_relaxed.contains(queries[i]);
        bad_iii += pi_tight.contains(queries[i]) &&
                   !pi_inflated_out.contains(queries[i]);
      }
    }
  }
  const double elapsed = seconds_since(start);
  const bool ok =
      bad_i == 0 && bad_ii == 0 && bad_iii == 0 && elapsed < 60.0;
  report(8, ok,
         "classifier set algebra on 200 random finite instances per "
         "property: violations (i) " +
             std::to_string(bad_i) + ", (ii) " + std::to_string(bad_ii) +
             ", (iii) " + std::to_string(bad_iii) + "; " + fmt(elapsed) +
             " s");
}

void criterion_9_oracle_equivalences() {
  const auto start = Clock::now();

  // Spatial index vs linear scan on a 10^4 x 10^4 instance.
  const auto data = random_cloud(10000, 2, 2601, -1.0, 1.0);
  const auto queries = random_cloud(10000, 2, 2602, -1.5, 1.5);
  const KdTree tree(data);
  std::size_t nn_mismatches = 0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    double best = kInfinity;
    for (std::size_t i = 0; i < data.size(); ++i)
      best = std::min(best, squared_distance(queries[q], data[i]));
    const double brute = std::sqrt(best);
    if (std::fabs(tree.distance(queries[q]) - brute) > 1e-12) ++nn_mismatches;
  }

  // Scenario optimum vs the double loop on 100 instances.
  std::size_t delta_mismatches = 0;
  for (int instance = 0; instance < 100; ++instance) {
    const auto seed = static_cast<std::uint64_t>(97000 + instance);
    const auto n_ref = 50 + static_cast<std::size_t>(rng::at(seed, 0) % 451);
    const auto n_test = 20 + static_cast<std::size_t>(rng::at(seed, 1) % 181);
    LabeledReference reference, test;
    reference.inside = PointBuffer(2);
    reference.outside = PointBuffer(2);
    test.inside = PointBuffer(2);
    test.outside = PointBuffer(2);
    const auto ref_pts = random_cloud(n_ref, 2, seed * 7 + 1, -1.0, 1.0);
    for (std::size_t i = 0; i < n_ref; ++i)
      (rng::at(seed, 100 + i) % 2 ? reference.inside : reference.outside)
          .push_back(ref_pts[i]);
    const auto test_pts = random_cloud(n_test, 2, seed * 7 + 2, -1.2, 1.2);
    for (std::size_t i = 0; i < n_test; ++i)
      (rng::at(seed, 5000 + i) % 2 ? test.inside : test.outside)
          .push_back(test_pts[i]);

    const auto side_max = [](const PointBuffer& qs, const PointBuffer& side) {
      double worst = 0.0;
      for (std::size_t i = 0; i < qs.size(); ++i) {
        double best = kInfinity;
        for (std::size_t k = 0; k < side.size(); ++k)
          best = std::min(best, squared_distance(qs[i], side[k]));
        worst = std::max(worst, std::sqrt(best));
      }
      return worst;
    };
    const double brute = std::max({0.0, side_max(test.inside, reference.inside),
                                   side_max(test.outside, reference.outside)});
    if (std::fabs(solve_delta_star(test, reference) - brute) > 1e-12)
      ++delta_mismatches;
  }

  const double elapsed = seconds_since(start);
  const bool ok = nn_mismatches == 0 && delta_mismatches == 0 && elapsed < 60.0;
  report(9, ok,
         "oracle equivalences: nearest-neighbor mismatches " +
             std::to_string(nn_mismatches) +
             "/10000, scenario-optimum mismatches " +
             std::to_string(delta_mismatches) + "/100; " + fmt(elapsed) +
             " s");
}

void criterion_10_grid_nestedness() {
  const auto start = Clock::now();
  bool nested = true;
  std::string where;
  for (const auto& name : builtin_system_names()) {
    const auto sys = make_builtin_system(name);
    const auto box = builtin_default_box(name);
    GridSet prev;
    for (std::int64_t k = 0; k <= 10; ++k) {
      // Independent sweeps per k: nestedness is a real consistency check of
      // the exit-time computation, not a by-construction identity.
      auto g = grid_O_k(*sys, box, k, 500);
      if (k > 0) {
        for (std::size_t i = 0; i < g.mask.size(); ++i)
          if (g.mask[i] && !prev.mask[i]) {
            nested = false;
            where = name + " at k=" + std::to_string(k);
            break;
          }
      }
      prev = std::move(g);
      if (!nested) break;
    }
    if (!nested) break;
  }

  const auto ex1 = make_builtin_system("example1");
  const auto fp1 =
      grid_fixed_point_index(*ex1, builtin_default_box("example1"), 500, 64);
  const auto pwa = make_builtin_system("pwa");
  const auto fp4 =
      grid_fixed_point_index(*pwa, builtin_default_box("pwa"), 500, 64);
  const bool fp_ok = fp1.has_value() && *fp1 == 3 && fp4.has_value() &&
                     *fp4 == 4;

  const double elapsed = seconds_since(start);
  const bool ok = nested && fp_ok && elapsed < 300.0;
  report(10, ok,
         std::string("grid recursion: nestedness for k <= 10 on all four "
                     "systems ") +
             (nested ? "holds" : ("violated at " + where)) +
             "; fixed-point index example1 " +
             (fp1 ? std::to_string(*fp1) : std::string("none")) +
             " (want 3), pwa " +
             (fp4 ? std::to_string(*fp4) : std::string("none")) +
             " (want 4); " + fmt(elapsed) + " s");
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<missing:" + path.string() + ">";
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void criterion_11_cli_determinism() {
  const auto start = Clock::now();
  const fs::path root =
      fs::temp_directory_path() /
      ("invariset_accept_" + std::to_string(::getpid()));
  std::error_code ec;
  fs::remove_all(root, ec);
  fs::create_directories(root);

  const auto run = [&](const fs::path& dir) {
    const std::string cmd = std::string(INVARISET_CLI_BIN) +
                            " demo example1 --seed 7 --out " + dir.string() +
                            " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return status != -1 ? WEXITSTATUS(status) : -1;
  };
  const int rc_a = run(root / "a");
  const int rc_b = run(root / "b");

  const bool omega_same =
      slurp(root / "a" / "omega.csv") == slurp(root / "b" / "omega.csv");
  const bool classifier_same = slurp(root / "a" / "classifier.csv") ==
                               slurp(root / "b" / "classifier.csv");
  const double elapsed = seconds_since(start);
  const bool ok = rc_a == 0 && rc_b == 0 && omega_same && classifier_same &&
                  elapsed < 300.0;
  report(11, ok,
         "two 'demo example1 --seed 7' runs: exit codes " +
             std::to_string(rc_a) + "/" + std::to_string(rc_b) +
             ", omega.csv " + (omega_same ? "identical" : "DIFFER") +
             ", classifier.csv " +
             (classifier_same ? "identical" : "DIFFER") + "; " +
             fmt(elapsed) + " s");
}

}  // namespace

int main() {
  criterion_1_sample_sizes();
  criterion_2_scenario_confidence();
  median_horizon_criterion(3, "example1", 3);
  median_horizon_criterion(4, "pwa", 4);
  criterion_5_horizon_spread();
  criterion_6_escape_guarantee();
  criterion_7_sandwich_guarantee();
  criterion_8_classifier_algebra();
  criterion_9_oracle_equivalences();
  criterion_10_grid_nestedness();
  criterion_11_cli_determinism();

  if (g_failures == 0) {
    std::printf("all 11 acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criterion(s) failed\n", g_failures);
  return 1;
}
