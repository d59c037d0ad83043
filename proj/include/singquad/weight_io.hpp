#pragma once

/**
 * @file weight_io.hpp
 * @brief JSON weight files.
 *
 * A single record:
 *   {format_version, n, gamma, p, kernel_id, kernel_params, stencil: [[ints]],
 *    alpha, omega, ladder: [{h, omega, rhs, residual_norm}], residual_norm,
 *    condition_number, cutoff: {a, b, profile_id}, angular_resolution,
 *    glue_points, L, h0, stability, converged, interpolated, near_tie,
 *    puncture, extrapolation}
 *
 * A table: {format_version, kind: "table", n, gamma, p, kernel_id,
 * kernel_params, grid: {resolution, nodes}, entries: [record | {alpha, error}]}.
 *
 * Reals are written in the shortest form that reads back bit-identically.
 */

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "singquad/weights.hpp"

namespace singquad {

inline constexpr int kWeightFormatVersion = 1;

namespace detail {

inline nlohmann::json stencil_json(const Stencil& stencil) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : stencil.points) {
    nlohmann::json point = nlohmann::json::array();
    for (int i = 0; i < stencil.n; ++i) point.push_back(c[static_cast<std::size_t>(i)]);
    out.push_back(point);
  }
  return out;
}

template <class T>
T field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::usage, std::string("weight record lacks field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::usage, std::string("weight record field '") + key + "' has the wrong type");
  }
}

template <class T>
T field_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? field<T>(j, key) : fallback;
}

}  // namespace detail

inline nlohmann::json to_json(const WeightSet& w) {
  const int n = w.n();
  nlohmann::json j;
  j["format_version"] = kWeightFormatVersion;
  j["n"] = n;
  j["gamma"] = w.gamma;
  j["p"] = w.order();
  j["kernel_id"] = w.kernel_id;
  j["kernel_params"] = w.kernel_params;
  j["stencil"] = detail::stencil_json(w.stencil);
  j["alpha"] = std::vector<double>(w.alpha.begin(), w.alpha.begin() + n);
  j["omega"] = w.omega;
  nlohmann::json ladder = nlohmann::json::array();
  for (const auto& level : w.ladder)
    ladder.push_back({{"h", level.h}, {"omega", level.omega}, {"rhs", level.rhs}, {"residual_norm", level.residual_norm}});
  j["ladder"] = ladder;
  j["residual_norm"] = w.residual_norm;
  j["condition_number"] = w.condition_number;
  j["cutoff"] = {{"a", w.cutoff.a}, {"b", w.cutoff.b}, {"profile_id", RadialCutoff::profile_id}};
  j["angular_resolution"] = w.angular_resolution;
  j["glue_points"] = w.glue_points;
  j["L"] = w.L;
  j["h0"] = w.h0;
  j["stability"] = w.stability;
  j["converged"] = w.converged;
  j["interpolated"] = w.interpolated;
  j["near_tie"] = w.near_tie;
  j["puncture"] = to_string(w.puncture);
  j["extrapolation"] = to_string(w.extrapolation);
  return j;
}

inline WeightSet weight_set_from_json(const nlohmann::json& j) {
  require(j.is_object(), ErrorKind::usage, "weight record must be a JSON object");
  const int version = detail::field<int>(j, "format_version");
  require(version == kWeightFormatVersion, ErrorKind::usage, "unsupported weight format version " + std::to_string(version));
  WeightSet w;
  const int n = detail::field<int>(j, "n");
  require(n >= 1 && n <= kMaxDimension, ErrorKind::usage, "weight record has invalid n");
  w.stencil.n = n;
  w.stencil.p = detail::field<int>(j, "p");
  for (const auto& point : detail::field<std::vector<std::vector<long>>>(j, "stencil")) {
    require(point.size() == static_cast<std::size_t>(n), ErrorKind::usage, "stencil point has wrong dimension");
    IntPoint c{};
    std::copy(point.begin(), point.end(), c.begin());
    w.stencil.points.push_back(c);
  }
  w.stencil.validate();
  w.gamma = detail::field<double>(j, "gamma");
  w.kernel_id = detail::field<std::string>(j, "kernel_id");
  w.kernel_params = detail::field_or<std::map<std::string, double>>(j, "kernel_params", {});
  const auto alpha = detail::field<std::vector<double>>(j, "alpha");
  require(alpha.size() == static_cast<std::size_t>(n), ErrorKind::usage, "alpha has wrong dimension");
  std::copy(alpha.begin(), alpha.end(), w.alpha.begin());
  w.omega = detail::field<std::vector<double>>(j, "omega");
  require(w.omega.size() == w.stencil.size(), ErrorKind::usage, "omega size differs from stencil size");
  for (const auto& level : detail::field_or<nlohmann::json>(j, "ladder", nlohmann::json::array())) {
    LadderLevel l;
    l.h = detail::field<double>(level, "h");
    l.omega = detail::field<std::vector<double>>(level, "omega");
    l.rhs = detail::field_or<std::vector<double>>(level, "rhs", {});
    l.residual_norm = detail::field_or<double>(level, "residual_norm", 0.0);
    w.ladder.push_back(std::move(l));
  }
  w.residual_norm = detail::field_or<double>(j, "residual_norm", 0.0);
  w.condition_number = detail::field_or<double>(j, "condition_number", 0.0);
  if (j.contains("cutoff")) {
    const auto& c = j.at("cutoff");
    w.cutoff = make_standard_cutoff(detail::field<double>(c, "a"), detail::field<double>(c, "b"));
    const auto profile = detail::field_or<std::string>(c, "profile_id", RadialCutoff::profile_id);
    require(profile == RadialCutoff::profile_id, ErrorKind::usage, "unknown cutoff profile '" + profile + "'");
  }
  w.angular_resolution = detail::field_or<int>(j, "angular_resolution", 0);
  w.glue_points = detail::field_or<int>(j, "glue_points", kDefaultGluePoints);
  w.L = detail::field_or<double>(j, "L", 0.0);
  w.h0 = detail::field_or<double>(j, "h0", 0.0);
  w.stability = detail::field_or<double>(j, "stability", 0.0);
  w.converged = detail::field_or<bool>(j, "converged", true);
  w.interpolated = detail::field_or<bool>(j, "interpolated", false);
  w.near_tie = detail::field_or<bool>(j, "near_tie", false);
  w.puncture = detail::field_or<std::string>(j, "puncture", "origin") == "stencil" ? PunctureMode::stencil : PunctureMode::origin;
  w.extrapolation =
      detail::field_or<std::string>(j, "extrapolation", "none") == "richardson" ? Extrapolation::richardson : Extrapolation::none;
  return w;
}

inline nlohmann::json to_json(const WeightTable& table, const std::map<std::string, double>& kernel_params = {}) {
  nlohmann::json j;
  j["format_version"] = kWeightFormatVersion;
  j["kind"] = "table";
  j["n"] = table.n;
  j["gamma"] = table.gamma;
  j["p"] = table.p;
  j["kernel_id"] = table.kernel_id;
  j["kernel_params"] = kernel_params;
  std::vector<double> nodes;
  for (std::size_t i = 0; i < table.nodes_per_axis(); ++i) nodes.push_back(table_node(table.resolution, i));
  j["grid"] = {{"resolution", table.resolution}, {"nodes", nodes}};
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t e = 0; e < table.entries.size(); ++e) {
    if (table.entries[e]) {
      auto record = to_json(*table.entries[e]);
      record["kernel_params"] = kernel_params;
      entries.push_back(record);
    } else {
      const auto& a = table.alphas[e];
      entries.push_back({{"alpha", std::vector<double>(a.begin(), a.begin() + table.n)}, {"error", table.failures[e]}});
    }
  }
  j["entries"] = entries;
  return j;
}

inline WeightTable weight_table_from_json(const nlohmann::json& j) {
  require(j.is_object() && j.value("kind", "") == "table", ErrorKind::usage, "not a weight table");
  const int version = detail::field<int>(j, "format_version");
  require(version == kWeightFormatVersion, ErrorKind::usage, "unsupported weight format version " + std::to_string(version));
  WeightTable table;
  table.n = detail::field<int>(j, "n");
  require(table.n >= 1 && table.n <= kMaxDimension, ErrorKind::usage, "weight table has invalid n");
  table.p = detail::field<int>(j, "p");
  table.gamma = detail::field<double>(j, "gamma");
  table.kernel_id = detail::field<std::string>(j, "kernel_id");
  table.resolution = detail::field<int>(detail::field<nlohmann::json>(j, "grid"), "resolution");
  require(table.resolution >= 2, ErrorKind::usage, "table resolution must be >= 2");
  const auto entries = detail::field<nlohmann::json>(j, "entries");
  std::size_t expected = 1;
  for (int d = 0; d < table.n; ++d) expected *= table.nodes_per_axis();
  require(entries.is_array() && entries.size() == expected, ErrorKind::usage, "table entry count does not match its grid");
  for (const auto& e : entries) {
    const auto alpha = detail::field<std::vector<double>>(e, "alpha");
    require(alpha.size() == static_cast<std::size_t>(table.n), ErrorKind::usage, "table alpha has wrong dimension");
    Point a{};
    std::copy(alpha.begin(), alpha.end(), a.begin());
    table.alphas.push_back(a);
    if (e.contains("error")) {
      table.entries.emplace_back(std::nullopt);
      table.failures.push_back(e.at("error").get<std::string>());
    } else {
      table.entries.emplace_back(weight_set_from_json(e));
      table.failures.emplace_back();
    }
  }
  return table;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::usage, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

inline nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::usage, "cannot read '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::usage, "'" + path + "': " + e.what());
  }
}

}  // namespace singquad
