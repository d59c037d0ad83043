#include "cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

namespace singquad::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage:
    case ErrorKind::invalid_parameters:
    case ErrorKind::out_of_range:
      return kUsage;
    default:
      return kNumerical;
  }
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::usage, "cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

[[noreturn]] void bad_field(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::usage, "field '" + field + "': " + what);
}

int int_field(const json& j, const std::string& key) {
  if (!j.at(key).is_number_integer()) bad_field(key, "must be an integer");
  return j.at(key).get<int>();
}

double number_field(const json& j, const std::string& key) {
  if (!j.at(key).is_number()) bad_field(key, "must be a number");
  return j.at(key).get<double>();
}

Point point_field(const json& j, const std::string& key, int n) {
  const auto& a = j.at(key);
  if (n == 1 && a.is_number()) return Point{a.get<double>(), 0, 0};
  if (!a.is_array() || a.size() != static_cast<std::size_t>(n)) bad_field(key, "must be an array of n numbers");
  Point out{};
  for (int i = 0; i < n; ++i) {
    if (!a[static_cast<std::size_t>(i)].is_number()) bad_field(key, "must be an array of n numbers");
    out[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)].get<double>();
  }
  return out;
}

std::vector<double> h_values(const json& j) {
  std::vector<double> h;
  if (j.contains("h")) {
    const auto& v = j.at("h");
    if (v.is_number()) {
      h.push_back(v.get<double>());
    } else if (v.is_array()) {
      for (const auto& e : v) {
        if (!e.is_number()) bad_field("h", "must be a number or an array of numbers");
        h.push_back(e.get<double>());
      }
    } else {
      bad_field("h", "must be a number or an array of numbers");
    }
  }
  if (j.contains("h_sweep")) {
    if (j.contains("h")) bad_field("h_sweep", "give either 'h' or 'h_sweep', not both");
    const auto& s = j.at("h_sweep");
    if (!s.is_object() || !s.contains("start") || !s.contains("count")) bad_field("h_sweep", "needs 'start' and 'count'");
    const double start = number_field(s, "start");
    const double ratio = s.contains("ratio") ? number_field(s, "ratio") : 2.0;
    const int count = int_field(s, "count");
    if (count < 0 || !(ratio > 1)) bad_field("h_sweep", "needs count >= 0 and ratio > 1");
    double value = start;
    for (int i = 0; i < count; ++i, value /= ratio) h.push_back(value);
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0 && h[i] < 1)) bad_field("h", "spacings must lie in (0, 1)");
    if (i > 0 && !(h[i] < h[i - 1])) bad_field("h", "spacings must be strictly decreasing");
  }
  return h;
}

WeightOptions weight_options(const json& j, int n) {
  WeightOptions w;
  if (!j.is_object()) bad_field("weights", "must be an object");
  static const std::set<std::string> known = {"ladder", "tol", "L", "h0", "angular_resolution", "glue_points",
                                              "puncture", "extrapolation", "cutoff", "levels"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) bad_field("weights." + key, "unknown field");
  if (j.contains("ladder")) {
    if (!j.at("ladder").is_array()) bad_field("weights.ladder", "must be an array of spacings");
    for (const auto& e : j.at("ladder")) {
      if (!e.is_number()) bad_field("weights.ladder", "must be an array of spacings");
      w.ladder.push_back(e.get<double>());
    }
  } else if (j.contains("levels")) {
    w.ladder = default_ladder(n, int_field(j, "levels"));
  }
  if (j.contains("tol")) w.tol = number_field(j, "tol");
  if (j.contains("L")) w.L = number_field(j, "L");
  if (j.contains("h0")) w.h0 = number_field(j, "h0");
  if (j.contains("angular_resolution")) w.angular_resolution = int_field(j, "angular_resolution");
  if (j.contains("glue_points")) w.glue_points = int_field(j, "glue_points");
  if (j.contains("puncture")) {
    const auto mode = j.at("puncture").get<std::string>();
    if (mode != "origin" && mode != "stencil") bad_field("weights.puncture", "must be 'origin' or 'stencil'");
    w.puncture = mode == "origin" ? PunctureMode::origin : PunctureMode::stencil;
  }
  if (j.contains("extrapolation")) {
    const auto mode = j.at("extrapolation").get<std::string>();
    if (mode != "none" && mode != "richardson") bad_field("weights.extrapolation", "must be 'none' or 'richardson'");
    w.extrapolation = mode == "none" ? Extrapolation::none : Extrapolation::richardson;
  }
  if (j.contains("cutoff")) {
    const auto& c = j.at("cutoff");
    if (!c.is_object()) bad_field("weights.cutoff", "must be an object {a, b}");
    w.cutoff = make_standard_cutoff(c.contains("a") ? number_field(c, "a") : 0.75, c.contains("b") ? number_field(c, "b") : 1.0);
  }
  if (!(w.tol > 0)) bad_field("weights.tol", "must be positive");
  if (w.glue_points < 1) bad_field("weights.glue_points", "must be positive");
  return w;
}

}  // namespace

Job parse_job(const std::string& text, const std::string& origin) {
  Job job;
  job.config_text = text;
  try {
    job.config = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::usage, origin + ": " + e.what());
  }
  const json& j = job.config;
  if (!j.is_object()) throw Error(ErrorKind::usage, origin + ": a job must be a JSON object");

  static const std::set<std::string> known = {"description", "n", "gamma", "kernel", "p", "rule", "weights",
                                              "stencil", "v", "x0", "alpha", "alpha_grid", "h", "h_sweep",
                                              "oracle_tol", "weight_file", "output"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) bad_field(key, "unknown field");

  try {
    if (!j.contains("n")) bad_field("n", "required");
    job.n = int_field(j, "n");
    if (job.n < 1 || job.n > 3) bad_field("n", "must be 1, 2 or 3");
    if (!j.contains("gamma")) bad_field("gamma", "required");
    job.gamma = number_field(j, "gamma");
    if (!(job.gamma > -job.n)) bad_field("gamma", "must exceed -n");
    if (j.contains("p")) job.p = int_field(j, "p");
    if (job.p < 0) bad_field("p", "must be a non-negative integer");

    job.kernel = make_catalog_kernel(job.n, job.gamma, j.contains("kernel") ? j.at("kernel") : json("const"));

    const std::string rule = j.contains("rule") ? j.at("rule").get<std::string>() : "corrected";
    if (rule == "punctured") job.rule = Rule::punctured;
    else if (rule == "corrected") job.rule = Rule::corrected;
    else if (rule == "composite") job.rule = Rule::composite;
    else bad_field("rule", "must be 'punctured', 'corrected' or 'composite'");
    if (job.rule == Rule::corrected && !job.kernel.kernel.r_independent())
      bad_field("rule", "the corrected rule needs an r-independent kernel; use 'composite'");

    if (j.contains("weights")) job.weight_options = weight_options(j.at("weights"), job.n);
    if (j.contains("stencil")) {
      NodeSet points;
      for (const auto& c : j.at("stencil")) {
        const auto v = c.get<std::vector<long>>();
        if (v.size() != static_cast<std::size_t>(job.n)) bad_field("stencil", "points must have n components");
        IntPoint ip{};
        std::copy(v.begin(), v.end(), ip.begin());
        points.push_back(ip);
      }
      try {
        job.stencil = make_stencil(job.n, job.p, std::move(points));
      } catch (const Error& e) {
        bad_field("stencil", e.what());
      }
    }

    if (j.contains("v")) job.v = make_catalog_factor(job.n, j.at("v"));
    if (j.contains("x0") && j.contains("alpha")) bad_field("alpha", "give either 'x0' or 'alpha', not both");
    if (j.contains("x0")) job.x0 = point_field(j, "x0", job.n);
    if (j.contains("alpha")) {
      job.alpha = point_field(j, "alpha", job.n);
      for (int i = 0; i < job.n; ++i)
        if (!(std::abs((*job.alpha)[static_cast<std::size_t>(i)]) <= 0.5)) bad_field("alpha", "components must lie in [-1/2, 1/2]");
    }
    if (j.contains("alpha_grid")) {
      const auto& g = j.at("alpha_grid");
      if (!g.is_object() || !g.contains("resolution")) bad_field("alpha_grid", "needs 'resolution'");
      job.alpha_grid_resolution = int_field(g, "resolution");
      if (*job.alpha_grid_resolution < 2) bad_field("alpha_grid.resolution", "must be >= 2");
    }
    job.h = h_values(j);
    if (j.contains("oracle_tol")) job.oracle_tol = number_field(j, "oracle_tol");
    if (!(job.oracle_tol > 0)) bad_field("oracle_tol", "must be positive");
    if (j.contains("weight_file")) {
      fs::path p = j.at("weight_file").get<std::string>();
      if (p.is_relative() && !origin.empty()) p = fs::path(origin).parent_path() / p;
      job.weight_file = p.string();
    }
    if (j.contains("output")) job.output = j.at("output").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::usage, origin + ": " + e.what());
  }
  return job;
}

Job load_job(const std::string& path) { return parse_job(read_file(path), path); }

double theoretical_order(const Job& job) {
  const double base = job.gamma + job.n;
  return job.rule == Rule::punctured ? base : base + job.p + 1;
}

WeightSource::WeightSource(const Job& job) {
  if (job.rule == Rule::punctured) {
    provenance_ = "none";
    return;
  }
  if (job.weight_file.empty()) {
    memo_ = std::make_shared<MemoizingWeightProvider>(job.weight_options);
    return;
  }
  const std::string bytes = read_file(job.weight_file);
  hashes_.emplace_back(job.weight_file, hex64(fnv1a(bytes)));
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::usage, job.weight_file + ": " + e.what());
  }
  if (j.is_object() && j.value("kind", "") == "table") {
    table_ = weight_table_from_json(j);
    provenance_ = "interpolated";
  } else {
    record_ = weight_set_from_json(j);
    provenance_ = "file";
  }
}

WeightProvider WeightSource::provider() {
  if (memo_) return memo_->as_provider();
  if (record_) {
    return [this](const SingularKernel& kernel, int order, std::span<const double>) {
      if (record_->order() != order || record_->kernel_id != kernel.id)
        throw Error(ErrorKind::incompatible_weights, "weight file holds order " + std::to_string(record_->order()) +
                                                         " weights for '" + record_->kernel_id + "', job needs order " +
                                                         std::to_string(order) + " for '" + kernel.id + "'");
      return *record_;
    };
  }
  if (table_) {
    return [this](const SingularKernel& kernel, int order, std::span<const double> alpha) {
      if (table_->p != order || table_->kernel_id != kernel.id)
        throw Error(ErrorKind::incompatible_weights, "weight table holds order " + std::to_string(table_->p) +
                                                         " weights for '" + table_->kernel_id + "', job needs order " +
                                                         std::to_string(order) + " for '" + kernel.id + "'");
      return interpolate_weights(*table_, alpha);
    };
  }
  return [](const SingularKernel&, int, std::span<const double>) -> WeightSet {
    throw Error(ErrorKind::invalid_parameters, "the punctured rule uses no weights");
  };
}

Evaluation evaluate(const Job& job, double h, WeightSource& weights, unsigned lattice_workers) {
  require(job.v.has_value(), ErrorKind::usage, "field 'v': required");
  require(job.x0.has_value() != job.alpha.has_value(), ErrorKind::usage, "field 'x0' or 'alpha': exactly one is required");
  const int n = job.n;
  const SmoothFactor& v = *job.v;
  const SingularKernel& kernel = job.kernel.kernel;
  GridContext grid;
  if (job.alpha) {
    grid = GridContext::centered(n, h, std::span<const double>(job.alpha->data(), static_cast<std::size_t>(n)), 1.0,
                                 v.support_radius, kernel.validity_radius);
  } else {
    const auto split = split_singularity(std::span<const double>(job.x0->data(), static_cast<std::size_t>(n)), h);
    grid = GridContext::make(n, h, std::span<const double>(split.alpha.data(), static_cast<std::size_t>(n)),
                             std::span<const long>(split.m.data(), static_cast<std::size_t>(n)), 1.0, v.support_radius,
                             kernel.validity_radius);
  }
  Evaluation out;
  out.h = h;
  out.alpha = grid.alpha;
  out.m = grid.m;
  out.x0 = grid.singular_point();
  out.provenance = weights.provenance();
  const LatticeOptions lattice{lattice_workers};
  switch (job.rule) {
    case Rule::punctured:
      out.value = punctured_rule(kernel, v, grid, lattice);
      break;
    case Rule::corrected: {
      auto provider = weights.provider();
      WeightSet w = provider(kernel, job.p, grid.alpha_span());
      out.value = corrected_rule(kernel, v, grid, w, lattice);
      break;
    }
    case Rule::composite:
      out.value = composite_rule(kernel, v, grid, weights.provider(), job.p, lattice);
      break;
  }
  return out;
}

namespace {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::punctured:
      return "punctured";
    case Rule::corrected:
      return "corrected";
    default:
      return "composite";
  }
}

std::string point_string(const Point& p, int n) {
  std::string s = "[";
  for (int i = 0; i < n; ++i) s += (i ? ", " : "") + fmt17(p[static_cast<std::size_t>(i)]);
  return s + "]";
}

std::string int_point_string(const IntPoint& p, int n) {
  std::string s = "[";
  for (int i = 0; i < n; ++i) s += (i ? ", " : "") + std::to_string(p[static_cast<std::size_t>(i)]);
  return s + "]";
}

fs::path output_path(const Options& options, const std::string& name) {
  fs::create_directories(options.out_dir);
  return fs::path(options.out_dir) / name;
}

/// Runs f(i) for i in [0, count) on up to `workers` threads; results are
/// written by index so the outcome does not depend on scheduling.
template <class F>
void parallel_for(std::size_t count, unsigned workers, F&& f) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::vector<std::exception_ptr> errors(count);
  auto body = [&](std::size_t i) {
    try {
      f(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) body(i);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

int cmd_weights(const Options& options, std::ostream& out, std::ostream& err) {
  const Job job = load_job(options.config);
  if (job.rule == Rule::composite && !job.kernel.kernel.r_independent())
    throw Error(ErrorKind::usage, "field 'kernel': weights are synthesised per expansion term by 'converge'/'integrate'");
  if (job.alpha.has_value() == job.alpha_grid_resolution.has_value())
    throw Error(ErrorKind::usage, "field 'alpha' or 'alpha_grid': exactly one is required");
  WeightOptions wo = job.weight_options;
  wo.workers = options.workers;
  const Stencil stencil = job.stencil ? *job.stencil : default_stencil(job.p, job.n);
  const auto& kernel = job.kernel.kernel;
  const std::string name = job.output.empty() ? "weights.json" : job.output;
  const fs::path path = output_path(options, name);

  if (job.alpha) {
    WeightSet w;
    try {
      w = solve_weights(kernel, stencil, std::span<const double>(job.alpha->data(), static_cast<std::size_t>(job.n)), wo);
    } catch (const Error& e) {
      err << "singquad: alpha " << point_string(*job.alpha, job.n) << ": " << e.what() << '\n';
      return exit_code_for(e.kind());
    }
    w.kernel_params = job.kernel.params;
    write_json(path.string(), to_json(w));
    out << "wrote " << path.string() << " (" << w.omega.size() << " weights, stability " << format_number(w.stability)
        << ")\n";
    return kSuccess;
  }

  const WeightTable table = tabulate_weights(kernel, job.p, *job.alpha_grid_resolution, wo, stencil);
  std::size_t failed = 0;
  for (std::size_t e = 0; e < table.entries.size(); ++e) {
    if (table.entries[e]) continue;
    ++failed;
    err << "singquad: alpha " << point_string(table.alphas[e], job.n) << ": " << table.failures[e] << '\n';
  }
  write_json(path.string(), to_json(table, job.kernel.params));
  out << "wrote " << path.string() << " (" << table.entries.size() - failed << " of " << table.entries.size()
      << " entries)\n";
  return failed ? kNumerical : kSuccess;
}

int cmd_integrate(const Options& options, std::ostream& out, std::ostream& err) {
  (void)err;
  const Job job = load_job(options.config);
  if (job.h.size() != 1) throw Error(ErrorKind::usage, "field 'h': integrate needs exactly one spacing");
  WeightSource weights(job);
  const Evaluation e = evaluate(job, job.h.front(), weights, options.workers);
  out << "value: " << fmt17(e.value) << '\n';
  out << "rule: " << rule_name(job.rule) << '\n';
  out << "kernel: " << job.kernel.kernel.id << '\n';
  out << "gamma: " << fmt17(job.gamma) << '\n';
  out << "n: " << job.n << '\n';
  out << "h: " << fmt17(e.h) << '\n';
  out << "alpha: " << point_string(e.alpha, job.n) << '\n';
  out << "m: " << int_point_string(e.m, job.n) << '\n';
  out << "p: " << job.p << '\n';
  out << "weights: " << e.provenance << '\n';
  for (const auto& [file, hash] : weights.file_hashes()) out << "weight_file: " << file << " fnv1a=" << hash << '\n';
  return kSuccess;
}

int cmd_converge(const Options& options, std::ostream& out, std::ostream& err) {
  const Job job = load_job(options.config);
  if (job.h.empty()) throw Error(ErrorKind::usage, "field 'h': converge needs a non-empty h sweep");
  if (job.h.size() < 2) throw Error(ErrorKind::usage, "field 'h': converge needs at least two spacings");
  if (!job.v) throw Error(ErrorKind::usage, "field 'v': required");
  if (job.x0.has_value() == job.alpha.has_value()) throw Error(ErrorKind::usage, "field 'x0' or 'alpha': exactly one is required");

  WeightSource weights(job);
  const std::size_t count = job.h.size();
  std::vector<Evaluation> evals(count);
  std::vector<double> references(count);
  std::vector<std::string> oracle_notes(count);
  bool verified = true;

  // Parallel over h points; each point runs its lattice sums single-threaded.
  const unsigned lattice_workers = count >= options.workers ? 1 : options.workers;
  parallel_for(count, options.workers, [&](std::size_t i) { evals[i] = evaluate(job, job.h[i], weights, lattice_workers); });

  // Reference values: one per distinct singular point.
  std::vector<char> is_failed(count, 0);
  parallel_for(count, options.workers, [&](std::size_t i) {
    if (job.x0 && i > 0) return;
    const auto& x0 = evals[i].x0;
    try {
      const auto ref =
          reference_integral(job.kernel.kernel, *job.v, std::span<const double>(x0.data(), static_cast<std::size_t>(job.n)), job.oracle_tol);
      references[i] = ref.value;
    } catch (const NoConvergence& e) {
      references[i] = e.best_estimate();
      is_failed[i] = 1;
      oracle_notes[i] = e.what();
    }
  });
  if (job.x0)
    for (std::size_t i = 1; i < count; ++i) {
      references[i] = references[0];
      is_failed[i] = is_failed[0];
    }
  for (std::size_t i = 0; i < count; ++i) verified = verified && !is_failed[i];

  std::vector<std::pair<double, double>> errors;
  for (std::size_t i = 0; i < count; ++i) errors.emplace_back(job.h[i], evals[i].value - references[i]);
  const auto orders = estimate_order(errors);
  const auto median = median_of_last(orders, 3);

  const std::string stem = job.output.empty() ? "converge" : job.output;
  const fs::path csv_path = output_path(options, stem + ".csv");
  const fs::path md_path = output_path(options, stem + ".md");

  {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw Error(ErrorKind::usage, "cannot write '" + csv_path.string() + "'");
    csv << "h,value,reference,abs_error,observed_order\n";
    for (std::size_t i = 0; i < count; ++i) {
      csv << fmt17(job.h[i]) << ',' << fmt17(evals[i].value) << ',' << fmt17(references[i]) << ','
          << fmt17(std::abs(errors[i].second)) << ',';
      if (i > 0 && orders[i - 1]) csv << fmt17(*orders[i - 1]);
      csv << '\n';
    }
  }

  const double expected = theoretical_order(job);
  {
    std::ofstream md(md_path, std::ios::binary);
    if (!md) throw Error(ErrorKind::usage, "cannot write '" + md_path.string() + "'");
    md << "# Convergence report\n\n";
    if (!verified) md << "**NOT-VERIFIED**: the reference integral did not reach its tolerance.\n\n";
    md << "| field | value |\n|---|---|\n";
    md << "| rule | " << rule_name(job.rule) << " |\n";
    md << "| n | " << job.n << " |\n";
    md << "| gamma | " << fmt17(job.gamma) << " |\n";
    md << "| kernel | " << job.kernel.kernel.id << " |\n";
    md << "| p | " << (job.rule == Rule::punctured ? std::string("-") : std::to_string(job.p)) << " |\n";
    md << "| v | " << job.v->id << " |\n";
    if (job.x0) md << "| x0 | " << point_string(*job.x0, job.n) << " |\n";
    if (job.alpha) md << "| alpha (x0 = h alpha) | " << point_string(*job.alpha, job.n) << " |\n";
    md << "| theoretical order | " << fmt17(expected) << " |\n";
    md << "| median observed order (last 3 pairs) | " << (median ? fmt17(*median) : std::string("undefined")) << " |\n";
    md << "| oracle tolerance | " << fmt17(job.oracle_tol) << " |\n";
    md << "| verified | " << (verified ? "yes" : "NOT-VERIFIED") << " |\n";
    md << "| weights | " << weights.provenance() << " |\n";
    md << "| config hash (fnv1a) | " << hex64(fnv1a(job.config_text)) << " |\n";
    md << "| library version | " << kVersion << " |\n";
    for (const auto& [file, hash] : weights.file_hashes()) md << "| weight file " << file << " (fnv1a) | " << hash << " |\n";
    md << "\n| h | value | reference | abs_error | observed_order |\n|---|---|---|---|---|\n";
    for (std::size_t i = 0; i < count; ++i) {
      md << "| " << fmt17(job.h[i]) << " | " << fmt17(evals[i].value) << " | " << fmt17(references[i]) << " | "
         << fmt17(std::abs(errors[i].second)) << " | " << (i > 0 && orders[i - 1] ? fmt17(*orders[i - 1]) : std::string("-"))
         << " |\n";
    }
    for (std::size_t i = 0; i < count; ++i)
      if (!oracle_notes[i].empty()) md << "\nOracle note (h = " << fmt17(job.h[i]) << "): " << oracle_notes[i] << '\n';
  }

  out << "wrote " << csv_path.string() << " and " << md_path.string() << '\n';
  out << "theoretical order " << format_number(expected) << ", median observed "
      << (median ? format_number(*median) : std::string("undefined")) << (verified ? "" : " (NOT-VERIFIED)") << '\n';
  (void)err;
  return kSuccess;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quadrature for integrands with a point singularity on uniform grids", "singquad"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  Options options;
  for (const char* name : {"weights", "converge", "integrate"}) {
    auto* sub = app.add_subcommand(name, std::string(name) == "weights"     ? "precompute correction weights"
                                         : std::string(name) == "converge" ? "convergence study against the oracle"
                                                                           : "evaluate one rule");
    sub->add_option("--config", options.config, "job file (JSON)")->required();
    sub->add_option("--workers", options.workers, "worker threads (1 = deterministic)")->check(CLI::PositiveNumber);
    sub->add_option("--out", options.out_dir, "output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, r;
    const int code = app.exit(e, o, r);
    out << o.str();
    err << r.str();
    return code == 0 ? kSuccess : kUsage;
  }
  options.command = app.get_subcommands().front()->get_name();
  try {
    if (options.command == "weights") return cmd_weights(options, out, err);
    if (options.command == "converge") return cmd_converge(options, out, err);
    return cmd_integrate(options, out, err);
  } catch (const Error& e) {
    err << "singquad: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "singquad: usage: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace singquad::cli
