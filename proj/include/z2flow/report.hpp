#pragma once

// Run configuration, structured reports and the four commands behind the
// CLI. The machine format is the JSON form of Report; the human format is
// rendered from it.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "z2flow/bulk.hpp"
#include "z2flow/suspension.hpp"

namespace z2flow {

enum class ReportFormat { Human, Machine };

struct RunConfig {
  std::string command;                 // validate | sf-tau | suspension-check | bec
  std::optional<std::string> model_path;
  std::optional<std::string> fixture;  // bhz | atomic
  double mass = 1.0;
  std::optional<double> fermi;         // overrides the model's Fermi level
  std::optional<std::string> path;     // builtin path name or path file
  int sites = 30;
  std::optional<int> t_points;         // edge t grid (400) or path grid (401)
  int bulk_t_points = 40;
  int s_points = 100;
  std::optional<int> modes;            // first resolution of the suspension schedule
  double kernel_tol = 1e-8;
  double loc_threshold = 0.9;
  bool localization_filter = true;
  double half_width = 10.0;
  ReportFormat format = ReportFormat::Human;
  std::optional<std::string> out;
  std::optional<std::string> edge_csv;
  std::optional<std::string> wannier_csv;
  bool timing = false;

  /// Throws InvalidArgument on non-positive tolerances or grids below
  /// their minima.
  void validate() const;
  /// Numerical parameters and inputs as JSON (output paths excluded).
  nlohmann::json to_json() const;
};

struct Report {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::string inputs_digest;
  std::string status = "ok";  // ok | error
  int exit_code = 0;
  nlohmann::json result = nlohmann::json::object();
  std::vector<std::string> warnings;
  std::optional<double> timing_ms;

  bool operator==(const Report&) const = default;
};

nlohmann::json report_to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);
std::string render_machine(const Report& r);
std::string render_human(const Report& r);

/// 64-bit FNV-1a, lower-case hex.
std::string fnv1a_hex(std::string_view bytes);

/// 0 success, 1 I/O, 2 invalid input, 3 numerical refusal.
int exit_code_for(ErrorKind kind);

/// Line/circle path from a JSON path-definition document:
/// { "domain": "line" | "circle", "t_min", "t_max" (line only), "dim",
///   "tau": matrix (optional), "grid_points" (optional),
///   "terms": [ { "f": "const" | "cos" | "sin" | "atan" | "tanh" | "sech",
///                "freq": number (default 1), "shift": number (default 0),
///                "matrix": matrix } ] }
/// A(t) = sum_terms f(freq * (t - shift)) * matrix. Throws ParseError.
OperatorPath load_path(const nlohmann::json& doc, std::optional<int> grid_points = std::nullopt);
OperatorPath load_path_file(const std::string& path, std::optional<int> grid_points = std::nullopt);

/// The model selected by --model / --fixture, with --fermi applied.
TightBindingModel resolve_model(const RunConfig& cfg);
/// The path selected by --path (builtin name first, then file).
OperatorPath resolve_path(const RunConfig& cfg);

Report cmd_validate(const RunConfig& cfg);
Report cmd_sf_tau(const RunConfig& cfg);
Report cmd_suspension_check(const RunConfig& cfg);
Report cmd_bec(const RunConfig& cfg);

/// Dispatches on cfg.command. Errors become a report with status "error"
/// and the mapped exit code; nothing is thrown.
Report run_command(const RunConfig& cfg);

}  // namespace z2flow
