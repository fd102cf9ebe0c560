#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "compbf/curve.hpp"
#include "compbf/errors.hpp"
#include "compbf/geometry.hpp"
#include "compbf/version.hpp"

namespace compbf {

// Shortest decimal form that round-trips a double exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

// Write-to-temp-then-rename so readers never observe a partial file; the temp
// file is removed on failure.
inline void atomic_write_text(const std::filesystem::path& path,
                              const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("short write to " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ec2;
    fs::remove(tmp, ec2);
    throw std::runtime_error("cannot rename " + tmp.string() + ": " +
                             ec.message());
  }
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- CCDF curve CSV ----
// Layout: `# key: value` header lines (schema first), then a column header,
// then one row per grid point. Empirical curves carry confidence columns.

inline std::string curve_to_csv(const SirCcdfCurve& curve,
                                const std::vector<double>& ci_lo = {},
                                const std::vector<double>& ci_hi = {}) {
  validate_curve(curve);
  const bool with_ci = !ci_lo.empty();
  if (with_ci &&
      (ci_lo.size() != curve.value.size() || ci_hi.size() != curve.value.size()))
    throw InvariantError("confidence columns must match the grid");
  std::ostringstream out;
  out << "# schema: " << kCsvSchema << "\n";
  out << "# kind: " << curve.kind << "\n";
  for (const auto& [key, value] : curve.config)
    out << "# " << key << ": " << value << "\n";
  out << (with_ci ? "gamma_db,ccdf,ci_lo,ci_hi" : "gamma_db,ccdf") << "\n";
  for (std::size_t i = 0; i < curve.gamma_db.size(); ++i) {
    out << format_double(curve.gamma_db[i]) << ',' << format_double(curve.value[i]);
    if (with_ci)
      out << ',' << format_double(ci_lo[i]) << ',' << format_double(ci_hi[i]);
    out << "\n";
  }
  return out.str();
}

inline void write_curve_csv(const std::filesystem::path& path,
                            const SirCcdfCurve& curve,
                            const std::vector<double>& ci_lo = {},
                            const std::vector<double>& ci_hi = {}) {
  atomic_write_text(path, curve_to_csv(curve, ci_lo, ci_hi));
}

struct CurveFile {
  SirCcdfCurve curve;
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
  bool has_ci = false;
};

namespace detail {

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

inline double parse_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::runtime_error("malformed number: " + s);
  return v;
}

}  // namespace detail

inline CurveFile parse_curve_csv(const std::string& text) {
  CurveFile out;
  std::istringstream in(text);
  std::string line;
  bool schema_seen = false;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::size_t colon = line.find(": ");
      if (colon == std::string::npos)
        throw std::runtime_error("malformed header line: " + line);
      const std::string key = line.substr(2, colon - 2);
      const std::string value = line.substr(colon + 2);
      if (key == "schema") {
        if (value != kCsvSchema)
          throw std::runtime_error("unsupported csv schema: " + value);
        schema_seen = true;
      } else if (key == "kind") {
        out.curve.kind = value;
      } else {
        out.curve.config.emplace_back(key, value);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "gamma_db,ccdf" && line != "gamma_db,ccdf,ci_lo,ci_hi")
        throw std::runtime_error("unexpected column header: " + line);
      out.has_ci = line == "gamma_db,ccdf,ci_lo,ci_hi";
      header_seen = true;
      continue;
    }
    const auto fields = detail::split_csv_row(line);
    if (fields.size() != (out.has_ci ? 4u : 2u))
      throw std::runtime_error("wrong field count in row: " + line);
    out.curve.gamma_db.push_back(detail::parse_double(fields[0]));
    out.curve.value.push_back(detail::parse_double(fields[1]));
    if (out.has_ci) {
      out.ci_lo.push_back(detail::parse_double(fields[2]));
      out.ci_hi.push_back(detail::parse_double(fields[3]));
    }
  }
  if (!schema_seen) throw std::runtime_error("missing schema header");
  if (!header_seen) throw std::runtime_error("missing column header");
  validate_curve(out.curve);
  return out;
}

inline CurveFile read_curve_csv(const std::filesystem::path& path) {
  return parse_curve_csv(read_text(path));
}

// ---- Network realization CSV ----

inline std::string realization_to_csv(const NetworkRealization& net) {
  std::ostringstream out;
  out << "# schema: " << kCsvSchema << "\n";
  out << "# kind: realization\n";
  out << "# lambda: " << format_double(net.lambda) << "\n";
  out << "# window_radius: " << format_double(net.window_radius) << "\n";
  out << "# cluster_size: " << net.cluster_size << "\n";
  out << "# seed: " << net.seed << "\n";
  out << "# user_x: " << format_double(net.user_position[0]) << "\n";
  out << "# user_y: " << format_double(net.user_position[1]) << "\n";
  out << "x,y\n";
  for (const auto& p : net.bs_positions)
    out << format_double(p[0]) << ',' << format_double(p[1]) << "\n";
  return out.str();
}

inline void write_realization_csv(const std::filesystem::path& path,
                                  const NetworkRealization& net) {
  atomic_write_text(path, realization_to_csv(net));
}

inline NetworkRealization parse_realization_csv(const std::string& text) {
  NetworkRealization net;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::size_t colon = line.find(": ");
      if (colon == std::string::npos)
        throw std::runtime_error("malformed header line: " + line);
      const std::string key = line.substr(2, colon - 2);
      const std::string value = line.substr(colon + 2);
      if (key == "schema") {
        if (value != kCsvSchema)
          throw std::runtime_error("unsupported csv schema: " + value);
      } else if (key == "lambda") {
        net.lambda = detail::parse_double(value);
      } else if (key == "window_radius") {
        net.window_radius = detail::parse_double(value);
      } else if (key == "cluster_size") {
        net.cluster_size = std::stoi(value);
      } else if (key == "seed") {
        net.seed = std::stoull(value);
      } else if (key == "user_x") {
        net.user_position[0] = detail::parse_double(value);
      } else if (key == "user_y") {
        net.user_position[1] = detail::parse_double(value);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "x,y") throw std::runtime_error("unexpected column header");
      header_seen = true;
      continue;
    }
    const auto fields = detail::split_csv_row(line);
    if (fields.size() != 2) throw std::runtime_error("wrong field count");
    net.bs_positions.push_back({detail::parse_double(fields[0]),
                                detail::parse_double(fields[1])});
  }
  if (!header_seen) throw std::runtime_error("missing column header");
  net.sorted_distances.clear();
  for (const auto& p : net.bs_positions) {
    const double dx = p[0] - net.user_position[0];
    const double dy = p[1] - net.user_position[1];
    net.sorted_distances.push_back(std::sqrt(dx * dx + dy * dy));
  }
  std::sort(net.sorted_distances.begin(), net.sorted_distances.end());
  return net;
}

inline NetworkRealization read_realization_csv(
    const std::filesystem::path& path) {
  return parse_realization_csv(read_text(path));
}

// ---- Run manifest ----
// A JSON provenance record written next to every output file set.

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::vector<std::string> outputs;
};

inline std::string manifest_to_json(const RunManifest& m) {
  nlohmann::json j;
  j["schema"] = "compbf-manifest/1";
  j["command"] = m.command;
  j["version"] = m.version;
  j["seed"] = m.seed;
  j["parameters"] = nlohmann::json::object();
  for (const auto& [key, value] : m.parameters) j["parameters"][key] = value;
  j["outputs"] = m.outputs;
  return j.dump(2) + "\n";
}

inline void write_manifest(const std::filesystem::path& path,
                           const RunManifest& m) {
  atomic_write_text(path, manifest_to_json(m));
}

inline RunManifest parse_manifest_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("schema").get<std::string>() != "compbf-manifest/1")
    throw std::runtime_error("unsupported manifest schema");
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.version = j.at("version").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& [key, value] : j.at("parameters").items())
    m.parameters[key] = value.get<std::string>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  return m;
}

inline RunManifest read_manifest(const std::filesystem::path& path) {
  return parse_manifest_json(read_text(path));
}

}  // namespace compbf
