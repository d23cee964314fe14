// External simulator processes speaking the line protocol, exercised against
// the bundled reference process in all of its failure modes.

#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <invariset/dynamics.hpp>
#include <invariset/rng.hpp>
#include <invariset/sampling.hpp>
#include <invariset/subprocess.hpp>

using namespace invariset;

namespace {

std::string wire(const std::string& args) {
  return std::string(WIRE_EXAMPLE_BIN) + (args.empty() ? "" : " " + args);
}

}  // namespace

TEST_CASE("external process reproduces the built-in map bitwise") {
  const ExternalSystem ext(wire("example1"));
  CHECK(ext.dim() == 2);
  CHECK(ext.name() == "extern:" + wire("example1"));

  const auto builtin = make_builtin_system("example1");
  const auto box = builtin_default_box("example1");
  const auto sample = sample_uniform(box, 100, rng::derive(5, 1));

  State got(2);
  State want(2);
  for (std::size_t i = 0; i < sample.points.size(); ++i) {
    ext.step_into(sample.points[i], got);
    builtin->step_into(sample.points[i], want);
    CHECK(got[0] == want[0]);  // exact: shortest round-trip decimals
    CHECK(got[1] == want[1]);
  }
}

TEST_CASE("exit times agree between the process and the built-in") {
  const ExternalSystem ext(wire("example1"));
  const auto builtin = make_builtin_system("example1");
  const auto box = builtin_default_box("example1");
  const auto sample = sample_uniform(box, 20, rng::derive(6, 1));
  for (std::size_t i = 0; i < sample.points.size(); ++i) {
    CHECK(exit_time(ext, sample.points[i], box, 50) ==
          exit_time(*builtin, sample.points[i], box, 50));
  }
}

TEST_CASE("identity process echoes exact values at its declared dimension") {
  const ExternalSystem id3(wire("identity"));
  CHECK(id3.dim() == 3);
  const State x{0.1, 1.0 / 3.0, -7.25e-13};
  State out(3);
  id3.step_into(x, out);
  CHECK(out[0] == x[0]);
  CHECK(out[1] == x[1]);
  CHECK(out[2] == x[2]);

  const ExternalSystem id5(wire("identity 5"));
  CHECK(id5.dim() == 5);
}

TEST_CASE("protocol failures map to distinct errors") {
  SECTION("reply with too many values") {
    const ExternalSystem bad(wire("baddim"));
    CHECK(bad.dim() == 2);
    State out(2);
    CHECK_THROWS_AS(bad.step_into(State{0.0, 0.0}, out),
                    DimensionMismatchError);
  }

  SECTION("non-numeric reply") {
    const ExternalSystem garbage(wire("garbage"));
    State out(2);
    CHECK_THROWS_AS(garbage.step_into(State{0.0, 0.0}, out),
                    MalformedReplyError);
  }

  SECTION("process exits after the handshake") {
    const ExternalSystem dying(wire("die"));
    State out(2);
    CHECK_THROWS_AS(dying.step_into(State{0.0, 0.0}, out), ProcessDiedError);
  }

  SECTION("process exits before the handshake") {
    CHECK_THROWS_AS(ExternalSystem(wire("die-early")), ProcessDiedError);
  }

  SECTION("command that cannot run") {
    CHECK_THROWS_AS(ExternalSystem("/nonexistent-simulator-binary 2>/dev/null"),
                    ProcessDiedError);
  }
}

TEST_CASE("system specs dispatch between built-ins and processes") {
  CHECK(make_system("example1")->name() == "example1");
  CHECK(make_system("pwa")->name() == "pwa");
  CHECK_THROWS_AS(make_system("nope"), ParameterError);
  CHECK_THROWS_AS(make_system("extern:"), ParameterError);

  const auto ext = make_system("extern:" + wire("identity"));
  CHECK(ext->dim() == 3);

  CHECK(is_builtin_system("example1"));
  CHECK(is_builtin_system("lure"));
  CHECK(is_builtin_system("chatala"));
  CHECK(is_builtin_system("pwa"));
  CHECK_FALSE(is_builtin_system("extern:cat"));
  CHECK_FALSE(is_builtin_system("Example1"));
  CHECK_FALSE(is_builtin_system(""));
}

TEST_CASE("clones run as independent processes") {
  const auto a = std::make_shared<ExternalSystem>(wire("example1"));
  const auto b = a->clone();
  CHECK(b->dim() == 2);
  State out_a(2);
  State out_b(2);
  a->step_into(State{0.25, -0.5}, out_a);
  b->step_into(State{0.25, -0.5}, out_b);
  CHECK(out_a[0] == out_b[0]);
  CHECK(out_a[1] == out_b[1]);
}

TEST_CASE("queries through one process are serialized safely") {
  const ExternalSystem ext(wire("example1"));
  const auto builtin = make_builtin_system("example1");
  const auto box = builtin_default_box("example1");
  const auto sample = sample_uniform(box, 40, rng::derive(7, 1));

  std::vector<State> results(40, State(2));
  std::vector<std::thread> pool;
  for (int w = 0; w < 4; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = static_cast<std::size_t>(w); i < 40; i += 4)
        ext.step_into(sample.points[i], results[i]);
    });
  }
  for (auto& t : pool) t.join();

  State want(2);
  for (std::size_t i = 0; i < 40; ++i) {
    builtin->step_into(sample.points[i], want);
    CHECK(results[i][0] == want[0]);
    CHECK(results[i][1] == want[1]);
  }
}
