// A stand-alone external system speaking the line protocol the library's
// subprocess bridge expects:
//
//   host -> tool   "DIM?"                     (handshake)
//   tool -> host   "<n>"                      (state dimension)
//   host -> tool   "<x1> <x2> ... <xn>"       (one state per line)
//   tool -> host   "<y1> <y2> ... <yn>"       (its image under the map)
//
// This file deliberately does not include the library: its default mode
// re-implements the planar polynomial benchmark from scratch, so a
// subprocess round-trip checks both the pipe plumbing and the built-in
// implementation against an independent one.
//
// Modes (argv[1], default "example1"):
//   example1         the planar polynomial map, dim 2
//   identity [dim]   echoes the input state (default dim 3)
//   baddim           handshakes dim 2 but answers with 3 values
//   garbage          handshakes dim 2 but answers non-numeric text
//   die              handshakes dim 2, then exits at the first state line
//   die-early        exits immediately, before answering the handshake

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

namespace {

bool read_line(std::string& line) {
  line.clear();
  int c;
  while ((c = std::getchar()) != EOF) {
    if (c == '\n') {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    line.push_back(static_cast<char>(c));
  }
  return !line.empty();
}

std::vector<double> parse_state(const std::string& line) {
  std::vector<double> x;
  const char* p = line.c_str();
  char* end = nullptr;
  while (*p != '\0') {
    const double v = std::strtod(p, &end);
    if (end == p) {
      std::fprintf(stderr, "wire_example: cannot parse '%s'\n", line.c_str());
      std::exit(1);
    }
    x.push_back(v);
    p = end;
    while (*p == ' ' || *p == '\t') ++p;
  }
  return x;
}

void reply(const std::vector<double>& y) {
  for (std::size_t j = 0; j < y.size(); ++j)
    std::printf(j + 1 < y.size() ? "%.17g " : "%.17g", y[j]);
  std::printf("\n");
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "example1";
  if (mode == "die-early") return 0;

  std::size_t dim = 2;
  if (mode == "identity")
    dim = argc > 2 ? static_cast<std::size_t>(std::atoi(argv[2])) : 3;

  std::string line;
  while (read_line(line)) {
    if (line == "DIM?") {
      std::printf("%zu\n", dim);
      std::fflush(stdout);
      continue;
    }
    if (mode == "die") return 0;
    if (mode == "baddim") {
      std::printf("1 2 3\n");
      std::fflush(stdout);
      continue;
    }
    if (mode == "garbage") {
      std::printf("not a number\n");
      std::fflush(stdout);
      continue;
    }
    const std::vector<double> x = parse_state(line);
    if (x.size() != dim) {
      std::fprintf(stderr, "wire_example: expected %zu values, got %zu\n",
                   dim, x.size());
      return 1;
    }
    if (mode == "identity") {
      reply(x);
      continue;
    }
    // example1: the planar polynomial map.
    const double y1 = 2.0 * x[0] * x[0] + x[1];
    reply({y1, -2.0 * y1 * y1 - 0.8 * x[0]});
  }
  return 0;
}
