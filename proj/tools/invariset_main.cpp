// invariset — command-line driver.
//
// Subcommands:
//   size    print the sample sizes the probabilistic guarantees require
//   phase1  estimate the invariance horizon from sampled trajectories
//   phase2  identify the almost-invariant set via nearest-neighbor classifiers
//   verify  white-box grid / Monte-Carlo verification (built-in systems only)
//   bounds  tabulate the failure-probability bounds over a range of N
//   demo    full pipeline (phase1 -> phase2 -> verify) with preset parameters
//
// Exit codes: 0 success; 1 runtime failure (I/O, subprocess, simulation);
// 2 invalid parameters or missing/malformed artifacts; 3 a hard cap was hit
// (step cap in phase1, round cap in phase2) with artifacts still written;
// 4 verify requested for an external system (no white-box oracle available).

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include <invariset/invariset.hpp>

namespace {

using invariset::ConstraintBox;
using invariset::ParameterError;
using invariset::format_double;

struct Options {
  std::string config_file;  // flat key=value file; empty = none
  std::string system = "example1";
  std::string box_lower;  // comma-separated bounds; empty = built-in default
  std::string box_upper;
  double epsilon = 1e-3;
  double beta = 0.05;
  double eps_tilde = 1e-3;
  double beta_tilde = 0.01;
  double delta_bar = 0.0;  // phase2 target; must be set > 0
  std::int64_t d = 1;
  std::uint64_t seed = 1;
  double delta_traj = 0.0;  // 0 = automatic (1e-3 * diam(X))
  std::int64_t t_bar = 100;
  std::int64_t max_steps_hard = 10000;
  std::int64_t grid = 500;
  std::int64_t n_mc = 100000;
  std::int64_t n_delta = 0;  // 0 = automatic (smallest-N search)
  std::int64_t max_rounds = 64;
  std::int64_t n_min = 1;      // bounds table range
  std::int64_t n_max = 10000;
  std::int64_t n_step = 0;  // 0 = automatic (~200 rows)
  unsigned workers = 0;     // 0 = one per hardware thread
  std::string out = "out";
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

unsigned resolve_workers(const Options& o) {
  return o.workers == 0 ? invariset::default_workers() : o.workers;
}

std::vector<double> parse_bounds(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string field =
        text.substr(start, comma == std::string::npos ? comma : comma - start);
    try {
      values.push_back(invariset::parse_double(field));
    } catch (const ParameterError&) {
      throw ParameterError(std::string(flag) + ": '" + field +
                           "' is not a number");
    }
    if (comma == std::string::npos) return values;
    start = comma + 1;
  }
}

ConstraintBox resolve_box(const Options& o) {
  if (!o.box_lower.empty() || !o.box_upper.empty()) {
    if (o.box_lower.empty() || o.box_upper.empty())
      throw ParameterError(
          "--box-lower and --box-upper must be given together");
    return ConstraintBox(parse_bounds(o.box_lower, "--box-lower"),
                         parse_bounds(o.box_upper, "--box-upper"));
  }
  if (invariset::is_builtin_system(o.system))
    return invariset::builtin_default_box(o.system);
  throw ParameterError(
      "external systems need explicit --box-lower/--box-upper "
      "(use the --box-lower=-1,-1 form for negative bounds)");
}

void check_dimensions(const invariset::SystemModel& sys,
                      const ConstraintBox& box) {
  if (static_cast<std::size_t>(sys.dim()) != box.dim())
    throw ParameterError("system '" + sys.name() + "' has dimension " +
                         std::to_string(sys.dim()) + " but the box has " +
                         std::to_string(box.dim()));
}

nlohmann::json violation_json(const invariset::ViolationEstimate& v) {
  return {{"violating", v.violating},
          {"n_mc", v.n_mc},
          {"estimate", v.point_estimate()},
          {"sigma", v.sigma()}};
}

// ---------------------------------------------------------------------------
// size

int run_size(const Options& o) {
  const auto n = invariset::phase1_sample_size(o.epsilon, o.beta);
  const auto n_cons =
      invariset::phase1_sample_size_conservative(o.epsilon, o.beta);
  const auto n_hoef = invariset::hoeffding_sample_size(o.epsilon, o.beta);
  const auto n_delta = invariset::scenario_sample_size(
      o.eps_tilde, o.beta_tilde, o.d);
  const double conf_auto =
      invariset::scenario_confidence(n_delta, o.eps_tilde, o.d);

  std::cout << "phase I  (epsilon=" << format_double(o.epsilon)
            << ", beta=" << format_double(o.beta) << ")\n";
  const auto bounds = invariset::bound_table(o.epsilon, n);
  const auto bounds_cons = invariset::bound_table(o.epsilon, n_cons);
  const auto bounds_hoef = invariset::bound_table(o.epsilon, n_hoef);
  std::cout << "  phase1_sample_size               " << n
            << "  (failure bound " << format_double(bounds.standard) << ")\n";
  std::cout << "  phase1_sample_size_conservative  " << n_cons
            << "  (failure bound " << format_double(bounds_cons.conservative)
            << ")\n";
  std::cout << "  hoeffding_sample_size            " << n_hoef
            << "  (failure bound " << format_double(bounds_hoef.hoeffding)
            << ")\n";
  std::cout << "phase II (eps_tilde=" << format_double(o.eps_tilde)
            << ", beta_tilde=" << format_double(o.beta_tilde) << ", d=" << o.d
            << ")\n";
  std::cout << "  scenario_sample_size (n_delta)   " << n_delta
            << "  (confidence " << format_double(conf_auto) << ")\n";
  if (o.n_delta > 0) {
    const double conf =
        invariset::scenario_confidence(o.n_delta, o.eps_tilde, o.d);
    std::cout << "  scenario_confidence(n_delta=" << o.n_delta << ")  = "
              << format_double(conf)
              << (conf < o.beta_tilde ? "  < beta_tilde\n"
                                      : "  NOT below beta_tilde\n");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// phase1

nlohmann::json phase1_config_echo(const Options& o, const ConstraintBox& box,
                                  const invariset::Phase1Config& cfg) {
  return {{"system", o.system},
          {"box_lower", box.lower()},
          {"box_upper", box.upper()},
          {"epsilon", o.epsilon},
          {"beta", o.beta},
          {"seed", o.seed},
          {"delta_traj", cfg.delta_traj},
          {"t_bar_horizon", cfg.t_bar_horizon},
          {"max_steps_hard", cfg.max_steps_hard}};
}

int run_phase1(const Options& o) {
  const Stopwatch clock;
  const ConstraintBox box = resolve_box(o);  // parameter checks before any
  const auto sys = invariset::make_system(o.system);  // subprocess is spawned
  check_dimensions(*sys, box);

  invariset::Phase1Config cfg = invariset::default_phase1_config(box);
  if (o.delta_traj > 0.0) cfg.delta_traj = o.delta_traj;
  cfg.t_bar_horizon = o.t_bar;
  cfg.max_steps_hard = o.max_steps_hard;
  cfg.workers = resolve_workers(o);
  cfg.validate();

  const auto n = invariset::phase1_sample_size(o.epsilon, o.beta);
  const auto omega = invariset::sample_uniform(
      box, n, invariset::rng::derive(o.seed, 1), cfg.workers);
  const auto report = invariset::estimate_horizon(*sys, omega, box, cfg);

  const std::filesystem::path out_dir(o.out);
  invariset::io::ensure_directory(out_dir);
  invariset::io::write_omega_csv(out_dir / "omega.csv", omega.points,
                                 report.exit_steps);

  std::vector<double> theta;
  for (std::size_t k = 0; k < report.theta.size(); ++k)
    theta.push_back(report.theta.value(static_cast<std::int64_t>(k)));
  const nlohmann::json hj = {
      {"command", "phase1"},
      {"config", phase1_config_echo(o, box, cfg)},
      {"n", n},
      {"t_bar", report.t_bar},
      {"t_star", report.t_star},
      {"termination_horizon", report.termination_horizon},
      {"terminated_by", invariset::to_string(report.terminated_by)},
      {"capped_samples", report.capped_samples.size()},
      {"survivors", report.theta.survivors},
      {"theta", theta},
      {"timing_seconds", clock.seconds()}};
  invariset::io::write_json(out_dir / "horizon.json", hj);

  std::cout << "n=" << n << " t_bar=" << report.t_bar
            << " t_star=" << report.t_star << " terminated_by="
            << invariset::to_string(report.terminated_by) << "\n";
  std::cout << "wrote " << (out_dir / "omega.csv").string() << " and "
            << (out_dir / "horizon.json").string() << "\n";
  if (report.terminated_by == invariset::Phase1Termination::hard_cap) {
    std::cerr << "warning: " << report.capped_samples.size()
              << " trajectories hit the hard step cap of "
              << cfg.max_steps_hard
              << "; the reported horizon is unreliable\n";
    return 3;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// phase2

int run_phase2(const Options& o) {
  const Stopwatch clock;
  const ConstraintBox box = resolve_box(o);  // parameter checks before any
  const auto sys = invariset::make_system(o.system);  // subprocess is spawned
  check_dimensions(*sys, box);

  const std::filesystem::path out_dir(o.out);
  nlohmann::json horizon_echo;
  std::int64_t t_star = 0;
  std::string terminated_by;
  try {
    const auto hj = invariset::io::read_json(out_dir / "horizon.json");
    horizon_echo = hj.at("config");
    t_star = hj.at("t_star").get<std::int64_t>();
    terminated_by = hj.at("terminated_by").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("horizon.json is missing a field (" +
                         std::string(e.what()) + "); re-run phase1");
  }
  if (horizon_echo.at("system").get<std::string>() != o.system ||
      horizon_echo.at("box_lower").get<std::vector<double>>() != box.lower() ||
      horizon_echo.at("box_upper").get<std::vector<double>>() != box.upper() ||
      horizon_echo.at("seed").get<std::uint64_t>() != o.seed)
    throw ParameterError(
        "phase2 configuration (system/box/seed) does not match the phase1 "
        "artifacts in '" + o.out + "'");
  if (terminated_by == "hard_cap")
    std::cerr << "warning: phase1 hit the hard step cap; labels use its "
                 "(unreliable) t_star\n";

  auto stored = invariset::io::read_omega_csv(out_dir / "omega.csv");
  if (stored.points.dim() != box.dim())
    throw ParameterError("omega.csv dimension does not match the box");
  invariset::SampleSet omega{std::move(stored.points),
                             invariset::rng::derive(o.seed, 1)};

  invariset::Phase2Config cfg;
  cfg.eps_tilde = o.eps_tilde;
  cfg.beta_tilde = o.beta_tilde;
  cfg.delta_bar = o.delta_bar;
  cfg.d = o.d;
  cfg.max_rounds = o.max_rounds;
  cfg.n_delta_override = o.n_delta;
  cfg.workers = resolve_workers(o);

  const auto result = invariset::identify_set(
      *sys, omega, t_star, box, cfg, invariset::rng::derive(o.seed, 2));

  const double beta_delta = invariset::scenario_confidence(
      result.n_delta, o.eps_tilde, o.d);
  std::cout << "t_star=" << t_star << " n_delta=" << result.n_delta
            << " (round confidence " << format_double(beta_delta) << ")\n";
  for (std::size_t i = 0; i < result.rounds.size(); ++i)
    std::cout << "round " << (i + 1)
              << ": n_reference=" << result.rounds[i].n_reference
              << " delta_star=" << format_double(result.rounds[i].delta_star)
              << "\n";
  std::cout << "final delta_star=" << format_double(result.delta_star)
            << " n_reference=" << result.reference.size() << "\n";

  invariset::io::write_classifier_csv(out_dir / "classifier.csv",
                                      result.reference, result.delta_star);
  nlohmann::json config_echo = horizon_echo;
  config_echo["eps_tilde"] = o.eps_tilde;
  config_echo["beta_tilde"] = o.beta_tilde;
  config_echo["delta_bar"] = o.delta_bar;
  config_echo["d"] = o.d;
  config_echo["max_rounds"] = o.max_rounds;
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : result.rounds)
    rounds.push_back(
        {{"n_reference", r.n_reference}, {"delta_star", r.delta_star}});
  const nlohmann::json rj = {
      {"command", "phase2"},
      {"config", config_echo},
      {"n", omega.points.size()},
      {"t_star", t_star},
      {"n_delta", result.n_delta},
      {"beta_delta", beta_delta},
      {"rounds", rounds},
      {"delta_star", result.delta_star},
      {"n_reference_final", result.reference.size()},
      {"round_cap_hit", result.round_cap_hit},
      {"timing_seconds", clock.seconds()}};
  invariset::io::write_json(out_dir / "report.json", rj);
  std::cout << "wrote " << (out_dir / "classifier.csv").string() << " and "
            << (out_dir / "report.json").string() << "\n";

  if (result.round_cap_hit) {
    std::cerr << "warning: round cap of " << o.max_rounds
              << " reached before delta_star <= "
              << format_double(o.delta_bar) << "\n";
    return 3;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify

int run_verify(const Options& o) {
  if (!invariset::is_builtin_system(o.system)) {
    std::cerr << "error: verify needs the white-box oracle, which exists "
                 "only for built-in systems; got '"
              << o.system << "'\n";
    return 4;
  }
  const Stopwatch clock;
  const auto sys = invariset::make_builtin_system(o.system);
  const ConstraintBox box = resolve_box(o);
  check_dimensions(*sys, box);
  const unsigned workers = resolve_workers(o);

  const std::filesystem::path out_dir(o.out);
  const auto data =
      invariset::io::read_classifier_csv(out_dir / "classifier.csv");
  if (data.reference.size() == 0)
    throw ParameterError("classifier.csv holds no reference points");
  if (data.reference.inside.dim() != box.dim())
    throw ParameterError("classifier.csv dimension does not match the box");
  const std::int64_t t_star = data.reference.t_star;

  const auto inside_index =
      std::make_shared<const invariset::KdTree>(data.reference.inside);
  const auto outside_index =
      std::make_shared<const invariset::KdTree>(data.reference.outside);
  const invariset::SetClassifier inner(box, inside_index, outside_index,
                                       -data.delta_star);
  const invariset::SetClassifier outer(box, inside_index, outside_index,
                                       data.delta_star);

  const auto grid =
      invariset::grid_O_k(*sys, box, t_star, o.grid, workers);
  const std::int64_t fp_cap = std::max<std::int64_t>(64, 2 * t_star + 16);
  const auto fixed_point = invariset::grid_fixed_point_index(
      *sys, box, o.grid, fp_cap, workers);
  const auto s_t_star = invariset::violation_S_k(
      *sys, box, t_star, o.n_mc, invariset::rng::derive(o.seed, 4), workers);
  const auto sandwich = invariset::sandwich_measures(
      inner, outer, *sys, box, t_star, o.n_mc,
      invariset::rng::derive(o.seed, 3), workers);

  invariset::io::write_grid_csv(out_dir / "grid.csv", grid, inner, outer);
  const nlohmann::json vj = {
      {"command", "verify"},
      {"config",
       {{"system", o.system},
        {"box_lower", box.lower()},
        {"box_upper", box.upper()},
        {"seed", o.seed},
        {"grid", o.grid},
        {"n_mc", o.n_mc}}},
      {"t_star", t_star},
      {"delta_star", data.delta_star},
      {"inner_radius", -data.delta_star},
      {"outer_radius", data.delta_star},
      {"grid_resolution", o.grid},
      {"grid_measure", grid.measure()},
      {"grid_fixed_point_index",
       fixed_point ? nlohmann::json(*fixed_point) : nlohmann::json(nullptr)},
      {"grid_fixed_point_cap", fp_cap},
      {"s_t_star", violation_json(s_t_star)},
      {"inner_excess", violation_json(sandwich.inner_excess)},
      {"outer_deficit", violation_json(sandwich.outer_deficit)},
      {"timing_seconds", clock.seconds()}};
  invariset::io::write_json(out_dir / "verify.json", vj);

  std::cout << "grid measure of the " << t_star
            << "-step safe set = " << format_double(grid.measure()) << "\n";
  if (fixed_point)
    std::cout << "grid fixed-point index = " << *fixed_point << "\n";
  else
    std::cout << "grid fixed-point index: none below " << fp_cap << "\n";
  std::cout << "one-step escape estimate S(t_star) = "
            << format_double(s_t_star.point_estimate()) << " (sigma "
            << format_double(s_t_star.sigma()) << ")\n";
  std::cout << "inner_excess = "
            << format_double(sandwich.inner_excess.point_estimate())
            << " (sigma "
            << format_double(sandwich.inner_excess.sigma()) << ")\n";
  std::cout << "outer_deficit = "
            << format_double(sandwich.outer_deficit.point_estimate())
            << " (sigma "
            << format_double(sandwich.outer_deficit.sigma()) << ")\n";
  std::cout << "wrote " << (out_dir / "grid.csv").string() << " and "
            << (out_dir / "verify.json").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// bounds

int run_bounds(const Options& o) {
  if (o.n_min < 1 || o.n_max < o.n_min)
    throw ParameterError("need 1 <= --n-min <= --n-max");
  const std::int64_t step =
      o.n_step > 0 ? o.n_step
                   : std::max<std::int64_t>(1, (o.n_max - o.n_min) / 199);
  std::vector<std::pair<std::int64_t, invariset::BoundTable>> rows;
  for (std::int64_t n = o.n_min; n <= o.n_max; n += step)
    rows.emplace_back(n, invariset::bound_table(o.epsilon, n));
  if (rows.back().first != o.n_max)
    rows.emplace_back(o.n_max, invariset::bound_table(o.epsilon, o.n_max));

  const std::filesystem::path out_dir(o.out);
  invariset::io::ensure_directory(out_dir);
  invariset::io::write_bounds_csv(out_dir / "bounds.csv", rows);
  std::cout << "wrote " << rows.size() << " rows to "
            << (out_dir / "bounds.csv").string() << " (epsilon="
            << format_double(o.epsilon) << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// demo

int run_demo(const Options& o) {
  std::cout << "== phase1 ==\n";
  if (const int rc = run_phase1(o); rc != 0) return rc;
  std::cout << "== phase2 ==\n";
  if (const int rc = run_phase2(o); rc != 0) return rc;
  std::cout << "== verify ==\n";
  return run_verify(o);
}

double demo_delta_bar(const std::string& system) {
  if (system == "example1") return 0.02;
  if (system == "lure") return 0.3;
  if (system == "chatala") return 0.05;
  return 0.15;  // pwa
}

// ---------------------------------------------------------------------------

// Applies a flat key=value config file to a parsed subcommand.  Keys are the
// long option names without the leading dashes; values already given on the
// command line win.  Unknown keys, unparsable lines, and bad values are
// parameter errors.  (Applied by hand rather than through the option parser's
// own config support, which skips files attached to subcommands.)
void apply_config_file(CLI::App* sub, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ParameterError("--config: cannot open '" + path + "'");
  const auto strip = [](const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto where = [&] {
      return "config '" + path + "' line " + std::to_string(line_no);
    };
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParameterError(where() + ": expected key=value");
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key.empty()) throw ParameterError(where() + ": empty key");
    if (key == "config")
      throw ParameterError(where() + ": config files cannot nest");
    CLI::Option* option = sub->get_option_no_throw("--" + key);
    if (option == nullptr)
      throw ParameterError(where() + ": unknown key '" + key + "'");
    if (option->count() > 0) continue;  // the command-line flag wins
    option->add_result(value);
    try {
      option->run_callback();
    } catch (const CLI::ParseError& e) {
      throw ParameterError(where() + ": bad value for '" + key +
                           "': " + e.what());
    }
  }
}

void add_common_options(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_file,
                  "Flat key=value file with these option names (command-line "
                  "flags win)");
  sub->add_option("--system", o.system,
                  "example1|lure|chatala|pwa|extern:<command>");
  sub->add_option("--box-lower", o.box_lower,
                  "Comma-separated lower bounds (use --box-lower=-1,-1)");
  sub->add_option("--box-upper", o.box_upper, "Comma-separated upper bounds");
  sub->add_option("--epsilon", o.epsilon, "Escape-measure tolerance in (0,1]");
  sub->add_option("--beta", o.beta, "Phase-I confidence level in (0,1]");
  sub->add_option("--eps-tilde", o.eps_tilde,
                  "Phase-II violation tolerance in (0,1)");
  sub->add_option("--beta-tilde", o.beta_tilde,
                  "Phase-II confidence level in (0,1)");
  sub->add_option("--delta-bar", o.delta_bar,
                  "Phase-II target classification margin (> 0)");
  sub->add_option("--d", o.d, "Scenario problem dimension (>= 1)");
  sub->add_option("--seed", o.seed, "Master random seed");
  sub->add_option("--tbar", o.t_bar,
                  "Minimum horizon before recurrence retirement");
  sub->add_option("--delta-traj", o.delta_traj,
                  "Recurrence tolerance (0 = 1e-3 * box diameter)");
  sub->add_option("--grid", o.grid, "Verification grid resolution per axis");
  sub->add_option("--n-mc", o.n_mc, "Monte-Carlo sample count for verify");
  sub->add_option("--out", o.out, "Output directory for artifacts");
  sub->add_option("--n-delta", o.n_delta,
                  "Fresh points per phase-2 round (0 = smallest admissible)");
  sub->add_option("--max-rounds", o.max_rounds, "Phase-2 round cap");
  sub->add_option("--max-steps-hard", o.max_steps_hard,
                  "Absolute per-trajectory step cap");
  sub->add_option("--workers", o.workers,
                  "Worker threads (0 = hardware concurrency)");
  sub->add_option("--n-min", o.n_min, "bounds: smallest N");
  sub->add_option("--n-max", o.n_max, "bounds: largest N");
  sub->add_option("--n-step", o.n_step, "bounds: N stride (0 = ~200 rows)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "invariset — probabilistically guaranteed almost-invariant sets of "
      "black-box discrete-time systems"};
  app.require_subcommand(1);

  Options opt;
  std::string demo_system;

  CLI::App* size = app.add_subcommand(
      "size", "Print the sample sizes the probabilistic guarantees require");
  CLI::App* phase1 = app.add_subcommand(
      "phase1", "Estimate the invariance horizon from sampled trajectories");
  CLI::App* phase2 = app.add_subcommand(
      "phase2",
      "Identify the almost-invariant set via nearest-neighbor classifiers");
  CLI::App* verify = app.add_subcommand(
      "verify", "Grid and Monte-Carlo verification (built-in systems only)");
  CLI::App* bounds = app.add_subcommand(
      "bounds", "Tabulate failure-probability bounds over a range of N");
  CLI::App* demo = app.add_subcommand(
      "demo", "Run phase1, phase2, and verify with preset parameters");
  for (CLI::App* sub : {size, phase1, phase2, verify, bounds, demo})
    add_common_options(sub, opt);
  demo->add_option("example", demo_system, "example1|lure|chatala|pwa")
      ->required()
      ->check(CLI::IsMember({"example1", "lure", "chatala", "pwa"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!opt.config_file.empty())
      for (CLI::App* sub : {size, phase1, phase2, verify, bounds, demo})
        if (sub->parsed()) apply_config_file(sub, opt.config_file);
    if (size->parsed()) return run_size(opt);
    if (phase1->parsed()) return run_phase1(opt);
    if (phase2->parsed()) return run_phase2(opt);
    if (verify->parsed()) return run_verify(opt);
    if (bounds->parsed()) return run_bounds(opt);
    // demo: preset parameters for any knob not given explicitly.
    opt.system = demo_system;
    const auto preset = [&](const char* flag, auto apply) {
      if (demo->count(flag) == 0) apply();
    };
    preset("--epsilon", [&] { opt.epsilon = 1e-3; });
    preset("--beta", [&] { opt.beta = 0.05; });
    preset("--eps-tilde", [&] { opt.eps_tilde = 1e-3; });
    preset("--beta-tilde", [&] { opt.beta_tilde = 0.01; });
    preset("--d", [&] { opt.d = 1; });
    preset("--n-delta", [&] { opt.n_delta = 4800; });
    preset("--delta-bar", [&] { opt.delta_bar = demo_delta_bar(opt.system); });
    preset("--grid", [&] { opt.grid = 500; });
    preset("--n-mc", [&] { opt.n_mc = 100000; });
    preset("--out", [&] { opt.out = "demo_" + opt.system; });
    return run_demo(opt);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
