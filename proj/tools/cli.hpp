#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "singquad/singquad.hpp"

namespace singquad::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kNumerical = 2 };

/// Exit code for a library error: configuration problems are usage errors,
/// everything else is a numerical failure.
int exit_code_for(ErrorKind kind);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);

enum class Rule { punctured, corrected, composite };

/// One job file, parsed and validated.
struct Job {
  std::string config_text;
  nlohmann::json config;

  int n = 1;
  double gamma = 0;
  CatalogKernel kernel;
  int p = 0;
  Rule rule = Rule::corrected;
  WeightOptions weight_options;
  std::optional<Stencil> stencil;

  std::optional<SmoothFactor> v;
  std::optional<Point> x0;     ///< fixed singular point
  std::optional<Point> alpha;  ///< fixed offset, singular point at h alpha
  std::optional<int> alpha_grid_resolution;
  std::vector<double> h;
  double oracle_tol = 1e-13;

  std::string weight_file;  ///< optional precomputed weights (record or table)
  std::string output;
};

/// Parses a job. Field errors name the offending field; syntax errors carry
/// the line and column reported by the JSON parser.
Job parse_job(const std::string& text, const std::string& origin);
Job load_job(const std::string& path);

/// Theoretical order: gamma + n (punctured) or gamma + n + p + 1.
double theoretical_order(const Job& job);

struct Evaluation {
  double h = 0;
  double value = 0;
  Point alpha{};
  IntPoint m{};
  Point x0{};
  std::string provenance;  ///< synthesized | file | interpolated | none
};

/// Weight sources shared across an h sweep.
class WeightSource {
 public:
  explicit WeightSource(const Job& job);

  WeightProvider provider();
  const std::string& provenance() const { return provenance_; }
  /// (path, FNV-1a hex) of every weight file read.
  const std::vector<std::pair<std::string, std::string>>& file_hashes() const { return hashes_; }

 private:
  std::string provenance_ = "synthesized";
  std::optional<WeightSet> record_;
  std::optional<WeightTable> table_;
  std::shared_ptr<MemoizingWeightProvider> memo_;
  std::vector<std::pair<std::string, std::string>> hashes_;
};

Evaluation evaluate(const Job& job, double h, WeightSource& weights, unsigned lattice_workers);

struct Options {
  std::string command;
  std::string config;
  std::string out_dir = ".";
  unsigned workers = 1;
};

int cmd_weights(const Options& options, std::ostream& out, std::ostream& err);
int cmd_converge(const Options& options, std::ostream& out, std::ostream& err);
int cmd_integrate(const Options& options, std::ostream& out, std::ostream& err);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace singquad::cli
