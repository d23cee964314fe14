#pragma once

// File formats for the command-line pipeline.  All floating-point values are
// written in shortest round-trip decimal form so that re-reading a file
// reproduces the exact binary64 values; integer fields are written exactly.
// This is what makes repeated runs with one seed byte-identical.
//
//   omega.csv       x1,...,xn,exit_step        (exit_step empty = no exit)
//   classifier.csv  line 1: n,t_star,delta_star
//                   line 2: the three values
//                   then:   x1,...,xn,label    (label I = inside, O = outside)
//   grid csv        x1,...,xn,in_O_k,in_inner,in_outer   (0/1 flags)
//   bounds csv      n,standard,conservative,hoeffding
//   *.json          reports; written pretty-printed with sorted keys

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "identify.hpp"
#include "oracle.hpp"

namespace invariset::io {

namespace detail {

inline void split_fields(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline std::int64_t parse_int(std::string_view text, const char* what) {
  const double v = parse_double(text);
  const auto i = static_cast<std::int64_t>(v);
  if (static_cast<double>(i) != v)
    throw ParameterError(std::string(what) + ": expected an integer, got '" +
                         std::string(text) + "'");
  return i;
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw ParameterError("cannot open '" + path.string() + "' for writing");
  return out;
}

inline std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open '" + path.string() + "'");
  return in;
}

inline void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw ParameterError("write to '" + path.string() + "' failed");
}

}  // namespace detail

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw ParameterError("cannot create directory '" + dir.string() +
                         "': " + ec.message());
}

// ---------------------------------------------------------------------------
// omega.csv — the Phase-I sample with each point's observed exit step.

struct OmegaData {
  PointBuffer points{0};
  std::vector<std::optional<std::int64_t>> exit_steps;
};

inline void write_omega_csv(
    const std::filesystem::path& path, const PointBuffer& points,
    const std::vector<std::optional<std::int64_t>>& exit_steps) {
  if (points.size() != exit_steps.size())
    throw ParameterError("omega: one exit record per point required");
  auto out = detail::open_for_write(path);
  std::string line;
  for (std::size_t j = 0; j < points.dim(); ++j) {
    line += 'x';
    line += std::to_string(j + 1);
    line += ',';
  }
  line += "exit_step\n";
  out << line;
  for (std::size_t i = 0; i < points.size(); ++i) {
    line.clear();
    for (const double c : points[i]) {
      append_double(line, c);
      line += ',';
    }
    if (exit_steps[i].has_value()) line += std::to_string(*exit_steps[i]);
    line += '\n';
    out << line;
  }
  detail::finish_write(out, path);
}

inline OmegaData read_omega_csv(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  std::string raw;
  if (!std::getline(in, raw))
    throw ParameterError("'" + path.string() + "' is empty");
  std::vector<std::string_view> fields;
  detail::split_fields(detail::strip_cr(raw), fields);
  if (fields.size() < 2 || fields.back() != "exit_step")
    throw ParameterError("'" + path.string() +
                         "': expected header x1,...,xn,exit_step");
  const std::size_t dim = fields.size() - 1;

  OmegaData data;
  data.points = PointBuffer(dim);
  State x(dim);
  while (std::getline(in, raw)) {
    const auto line = detail::strip_cr(raw);
    if (line.empty()) continue;
    detail::split_fields(line, fields);
    if (fields.size() != dim + 1)
      throw ParameterError("'" + path.string() + "': row with " +
                           std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(dim + 1));
    for (std::size_t j = 0; j < dim; ++j) x[j] = parse_double(fields[j]);
    data.points.push_back(x);
    if (fields[dim].empty())
      data.exit_steps.emplace_back(std::nullopt);
    else
      data.exit_steps.emplace_back(detail::parse_int(fields[dim], "exit_step"));
  }
  return data;
}

// ---------------------------------------------------------------------------
// classifier.csv — the labeled reference set plus the classifier radius.

struct ClassifierData {
  LabeledReference reference;
  double delta_star = 0.0;
};

inline void write_classifier_csv(const std::filesystem::path& path,
                                 const LabeledReference& reference,
                                 double delta_star) {
  auto out = detail::open_for_write(path);
  out << "n,t_star,delta_star\n";
  std::string line = std::to_string(reference.size());
  line += ',';
  line += std::to_string(reference.t_star);
  line += ',';
  append_double(line, delta_star);
  line += '\n';
  out << line;
  const auto emit = [&](const PointBuffer& pts, char label) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      line.clear();
      for (const double c : pts[i]) {
        append_double(line, c);
        line += ',';
      }
      line += label;
      line += '\n';
      out << line;
    }
  };
  emit(reference.inside, 'I');
  emit(reference.outside, 'O');
  detail::finish_write(out, path);
}

inline ClassifierData read_classifier_csv(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  std::string raw;
  if (!std::getline(in, raw) ||
      detail::strip_cr(raw) != "n,t_star,delta_star")
    throw ParameterError("'" + path.string() +
                         "': expected header n,t_star,delta_star");
  if (!std::getline(in, raw))
    throw ParameterError("'" + path.string() + "': missing header values");
  std::vector<std::string_view> fields;
  detail::split_fields(detail::strip_cr(raw), fields);
  if (fields.size() != 3)
    throw ParameterError("'" + path.string() + "': header values row needs 3 fields");
  const std::int64_t n = detail::parse_int(fields[0], "n");
  ClassifierData data;
  data.reference.t_star = detail::parse_int(fields[1], "t_star");
  data.delta_star = parse_double(fields[2]);

  bool first_row = true;
  std::size_t dim = 0;
  State x;
  while (std::getline(in, raw)) {
    const auto line = detail::strip_cr(raw);
    if (line.empty()) continue;
    detail::split_fields(line, fields);
    if (first_row) {
      if (fields.size() < 2)
        throw ParameterError("'" + path.string() + "': data row too short");
      dim = fields.size() - 1;
      data.reference.inside = PointBuffer(dim);
      data.reference.outside = PointBuffer(dim);
      x.resize(dim);
      first_row = false;
    }
    if (fields.size() != dim + 1)
      throw ParameterError("'" + path.string() + "': inconsistent column count");
    for (std::size_t j = 0; j < dim; ++j) x[j] = parse_double(fields[j]);
    const auto label = fields[dim];
    if (label == "I")
      data.reference.inside.push_back(x);
    else if (label == "O")
      data.reference.outside.push_back(x);
    else
      throw ParameterError("'" + path.string() + "': label must be I or O, got '" +
                           std::string(label) + "'");
  }
  if (static_cast<std::int64_t>(data.reference.size()) != n)
    throw ParameterError("'" + path.string() + "': header says " +
                         std::to_string(n) + " points, file has " +
                         std::to_string(data.reference.size()));
  return data;
}

// ---------------------------------------------------------------------------
// Grid export — cell centers with set / inner / outer membership flags.

inline void write_grid_csv(const std::filesystem::path& path,
                           const GridSet& grid, const SetClassifier& inner,
                           const SetClassifier& outer) {
  auto out = detail::open_for_write(path);
  std::string line;
  for (std::size_t j = 0; j < grid.box.dim(); ++j) {
    line += 'x';
    line += std::to_string(j + 1);
    line += ',';
  }
  line += "in_O_k,in_inner,in_outer\n";
  out << line;
  for (std::size_t i = 0; i < grid.cells(); ++i) {
    const State c = grid.center(i);
    line.clear();
    for (const double v : c) {
      append_double(line, v);
      line += ',';
    }
    line += grid.mask[i] ? '1' : '0';
    line += ',';
    line += inner.contains(c) ? '1' : '0';
    line += ',';
    line += outer.contains(c) ? '1' : '0';
    line += '\n';
    out << line;
  }
  detail::finish_write(out, path);
}

// ---------------------------------------------------------------------------
// Bounds export — failure-probability bounds over a range of sample sizes.

inline void write_bounds_csv(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::int64_t, BoundTable>>& rows) {
  auto out = detail::open_for_write(path);
  out << "n,standard,conservative,hoeffding\n";
  std::string line;
  for (const auto& [n, t] : rows) {
    line = std::to_string(n);
    line += ',';
    append_double(line, t.standard);
    line += ',';
    append_double(line, t.conservative);
    line += ',';
    append_double(line, t.hoeffding);
    line += '\n';
    out << line;
  }
  detail::finish_write(out, path);
}

// ---------------------------------------------------------------------------
// JSON reports.

inline void write_json(const std::filesystem::path& path,
                       const nlohmann::json& j) {
  auto out = detail::open_for_write(path);
  out << j.dump(2) << '\n';
  detail::finish_write(out, path);
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("'" + path.string() + "' is not valid JSON: " +
                         e.what());
  }
  return j;
}

}  // namespace invariset::io
