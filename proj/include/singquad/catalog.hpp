#pragma once

/**
 * @file catalog.hpp
 * @brief Named kernels and smooth factors, built from JSON descriptors.
 *
 * Kernels ("kernel" field of a job):
 *   "const"                          l0 = 1, any n
 *   {"id": "cos_k", "k": K}          l0 = cos(K theta), n = 2
 *   {"id": "sin_k", "k": K}          l0 = sin(K theta), n = 2
 *   {"id": "harmonic", "cos": [a0, a1, ...], "sin": [b1, b2, ...]}
 *                                    l0 = sum a_k cos(k theta) + sum b_k sin(k theta), n = 2
 *   {"id": "exp_r", "lambda": c}     l(r, u) = exp(c r), phi_k = c^k / k!, any n
 *
 * Smooth factors ("v" field):
 *   "zero"
 *   {"id": "window", "center": [...], "R": R}
 *   {"id": "window_poly", "center": [...], "R": R, "terms": [{"c": c, "e": [e1, ...]}, ...]}
 *   {"id": "window_exp", "center": [...], "R": R, "k": [k1, ...]}
 *
 * Windows use the standard cutoff, so the support radius is |center| + R.
 */

#include <charconv>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "singquad/core.hpp"
#include "singquad/cutoff.hpp"

namespace singquad {

inline constexpr int kExpansionTerms = 12;

/// Shortest decimal string that reads back to the same double.
inline std::string shortest_repr(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// A catalog kernel together with the parameters that identify it.
struct CatalogKernel {
  SingularKernel kernel;
  std::string name;
  std::map<std::string, double> params;
};

namespace detail {

inline std::string canonical_id(const std::string& name, const std::map<std::string, double>& params) {
  if (params.empty()) return name;
  std::string id = name + "(";
  bool first = true;
  for (const auto& [key, value] : params) {
    if (!first) id += ",";
    id += key + "=" + shortest_repr(value);
    first = false;
  }
  return id + ")";
}

inline double theta_of(std::span<const double> u) { return std::atan2(u[1], u[0]); }

inline double number_field(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  require(j.at(key).is_number(), ErrorKind::usage, std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

inline std::vector<double> vector_field(const nlohmann::json& j, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  require(j.at(key).is_array(), ErrorKind::usage, std::string("field '") + key + "' must be an array of numbers");
  for (const auto& e : j.at(key)) {
    require(e.is_number(), ErrorKind::usage, std::string("field '") + key + "' must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline int integer_param(const nlohmann::json& j, const char* key) {
  require(j.contains(key) && j.at(key).is_number_integer(), ErrorKind::usage,
          std::string("kernel needs integer field '") + key + "'");
  return j.at(key).get<int>();
}

}  // namespace detail

/// Builds a catalog kernel from a name or a descriptor object.
inline CatalogKernel make_catalog_kernel(int n, double gamma, const nlohmann::json& spec) {
  std::string name;
  if (spec.is_string()) {
    name = spec.get<std::string>();
  } else {
    require(spec.is_object() && spec.contains("id") && spec.at("id").is_string(), ErrorKind::usage,
            "kernel must be a name or an object with string field 'id'");
    name = spec.at("id").get<std::string>();
  }
  const nlohmann::json params = spec.is_object() ? spec : nlohmann::json::object();

  CatalogKernel out;
  out.name = name;
  auto need_plane = [&] {
    require(n == 2, ErrorKind::invalid_parameters, "kernel '" + name + "' is defined for n = 2 only");
  };

  if (name == "const") {
    out.kernel = make_kernel(n, gamma, [](std::span<const double>) { return 1.0; }, name);
  } else if (name == "cos_k" || name == "sin_k") {
    need_plane();
    const int k = detail::integer_param(params, "k");
    require(k >= 0, ErrorKind::invalid_parameters, "harmonic index k must be non-negative");
    out.params["k"] = k;
    AngularFn f;
    if (name == "cos_k")
      f = [k](std::span<const double> u) { return std::cos(k * detail::theta_of(u)); };
    else
      f = [k](std::span<const double> u) { return std::sin(k * detail::theta_of(u)); };
    out.kernel = make_kernel(n, gamma, std::move(f), detail::canonical_id(name, out.params));
  } else if (name == "harmonic") {
    need_plane();
    const auto a = detail::vector_field(params, "cos");
    const auto b = detail::vector_field(params, "sin");
    require(!a.empty() || !b.empty(), ErrorKind::usage, "harmonic kernel needs 'cos' and/or 'sin' coefficients");
    for (std::size_t k = 0; k < a.size(); ++k) out.params["a" + std::to_string(k)] = a[k];
    for (std::size_t k = 0; k < b.size(); ++k) out.params["b" + std::to_string(k + 1)] = b[k];
    auto f = [a, b](std::span<const double> u) {
      const double t = detail::theta_of(u);
      double s = 0;
      for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * std::cos(static_cast<double>(k) * t);
      for (std::size_t k = 0; k < b.size(); ++k) s += b[k] * std::sin(static_cast<double>(k + 1) * t);
      return s;
    };
    out.kernel = make_kernel(n, gamma, f, detail::canonical_id(name, out.params));
  } else if (name == "exp_r") {
    const double c = detail::number_field(params, "lambda", 1.0);
    out.params["lambda"] = c;
    std::vector<AngularFn> terms;
    double coefficient = 1;
    for (int k = 0; k < kExpansionTerms; ++k) {
      terms.push_back([coefficient](std::span<const double>) { return coefficient; });
      coefficient *= c / (k + 1);
    }
    auto full = [c](double r, std::span<const double>) { return std::exp(c * r); };
    out.kernel = make_expanded_kernel(n, gamma, full, std::move(terms), detail::canonical_id(name, out.params));
  } else {
    throw Error(ErrorKind::usage, "unknown kernel '" + name + "'");
  }
  return out;
}

/// Builds a catalog smooth factor in dimension n.
inline SmoothFactor make_catalog_factor(int n, const nlohmann::json& spec) {
  std::string name;
  if (spec.is_string()) {
    name = spec.get<std::string>();
  } else {
    require(spec.is_object() && spec.contains("id") && spec.at("id").is_string(), ErrorKind::usage,
            "v must be a name or an object with string field 'id'");
    name = spec.at("id").get<std::string>();
  }
  const nlohmann::json params = spec.is_object() ? spec : nlohmann::json::object();

  if (name == "zero") return SmoothFactor{[](std::span<const double>) { return 0.0; }, 1.0, "zero"};

  auto center = detail::vector_field(params, "center");
  if (center.empty()) center.assign(static_cast<std::size_t>(n), 0.0);
  require(center.size() == static_cast<std::size_t>(n), ErrorKind::usage, "v.center must have n components");
  const double R = detail::number_field(params, "R", 1.0);
  require(R > 0, ErrorKind::invalid_parameters, "v.R must be positive");
  const RadialCutoff cutoff = make_standard_cutoff();
  const double support = norm(center) + R * cutoff.b;

  auto window = [center, R, cutoff, n](std::span<const double> x, Point& shifted) {
    double r2 = 0;
    for (int i = 0; i < n; ++i) {
      shifted[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] - center[static_cast<std::size_t>(i)];
      r2 += shifted[static_cast<std::size_t>(i)] * shifted[static_cast<std::size_t>(i)];
    }
    return cutoff(std::sqrt(r2) / R);
  };

  if (name == "window") {
    return SmoothFactor{[window](std::span<const double> x) {
                          Point s{};
                          return window(x, s);
                        },
                        support, "window"};
  }
  if (name == "window_poly") {
    require(params.contains("terms") && params.at("terms").is_array(), ErrorKind::usage,
            "window_poly needs an array 'terms' of {c, e}");
    std::vector<std::pair<double, std::vector<int>>> terms;
    for (const auto& t : params.at("terms")) {
      require(t.is_object() && t.contains("c") && t.contains("e"), ErrorKind::usage, "each term needs 'c' and 'e'");
      auto e = t.at("e").get<std::vector<int>>();
      require(e.size() == static_cast<std::size_t>(n), ErrorKind::usage, "term exponent must have n entries");
      for (int ei : e) require(ei >= 0, ErrorKind::usage, "term exponents must be non-negative");
      terms.emplace_back(t.at("c").get<double>(), std::move(e));
    }
    return SmoothFactor{[window, terms, n](std::span<const double> x) {
                          Point s{};
                          const double w = window(x, s);
                          if (w == 0) return 0.0;
                          double poly = 0;
                          for (const auto& [c, e] : terms) {
                            double m = c;
                            for (int i = 0; i < n; ++i) m *= std::pow(x[static_cast<std::size_t>(i)], e[static_cast<std::size_t>(i)]);
                            poly += m;
                          }
                          return w * poly;
                        },
                        support, "window_poly"};
  }
  if (name == "window_exp") {
    const auto k = detail::vector_field(params, "k");
    require(k.size() == static_cast<std::size_t>(n), ErrorKind::usage, "window_exp needs 'k' with n entries");
    return SmoothFactor{[window, k, n](std::span<const double> x) {
                          Point s{};
                          const double w = window(x, s);
                          if (w == 0) return 0.0;
                          double dot = 0;
                          for (int i = 0; i < n; ++i) dot += k[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
                          return w * std::exp(dot);
                        },
                        support, "window_exp"};
  }
  throw Error(ErrorKind::usage, "unknown v '" + name + "'");
}

}  // namespace singquad
