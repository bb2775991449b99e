// z2flow command-line front end: validate, sf-tau, suspension-check, bec.

#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "z2flow/report.hpp"

namespace {

void add_common(CLI::App* sub, z2flow::RunConfig& cfg, std::string& format) {
  sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"human", "machine"}));
  sub->add_option("--out", cfg.out, "Write the report to this file instead of stdout");
  sub->add_option("--kernel-tol", cfg.kernel_tol, "Kernel threshold for eigenvalues");
  sub->add_option("--t-points", cfg.t_points, "Samples of the t grid");
  sub->add_flag("--timing", cfg.timing, "Include wall time in machine reports");
}

void add_model(CLI::App* sub, z2flow::RunConfig& cfg) {
  auto* model = sub->add_option("--model", cfg.model_path, "Model JSON file");
  auto* fixture = sub->add_option("--fixture", cfg.fixture, "Builtin model: bhz or atomic");
  model->excludes(fixture);
  sub->add_option("--mass", cfg.mass, "BHZ mass parameter M");
  sub->add_option("--fermi", cfg.fermi, "Fermi level override");
}

void add_path(CLI::App* sub, z2flow::RunConfig& cfg) {
  sub->add_option("--path", cfg.path, "Builtin path name or path JSON file")->required();
  sub->add_option("--half-width", cfg.half_width, "Half width of builtin line domains");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Z2 half-spectral flow, suspension indices and bulk-edge checks"};
  app.require_subcommand(1);
  z2flow::RunConfig cfg;
  std::string format = "human";

  auto* validate = app.add_subcommand("validate", "Validate a tight-binding model");
  add_model(validate, cfg);
  add_common(validate, cfg, format);

  auto* sf = app.add_subcommand("sf-tau", "Half-spectral flow of a tau-invariant path");
  add_path(sf, cfg);
  add_common(sf, cfg, format);

  auto* susp = app.add_subcommand("suspension-check", "Compare sf_tau with the suspension tau-index");
  add_path(susp, cfg);
  add_common(susp, cfg, format);
  susp->add_option("--modes", cfg.modes, "First resolution of the schedule (modes or grid points)");

  auto* bec = app.add_subcommand("bec", "Bulk and edge Z2 indices of a lattice model");
  add_model(bec, cfg);
  add_common(bec, cfg, format);
  bec->add_option("--sites", cfg.sites, "Truncation size N");
  bec->add_option("--s-points", cfg.s_points, "Wilson-loop s grid");
  bec->add_option("--bulk-t-points", cfg.bulk_t_points, "Wannier tracking points on [0, pi]");
  bec->add_option("--loc-threshold", cfg.loc_threshold, "Left-localization weight threshold");
  bec->add_flag("!--no-filter", cfg.localization_filter, "Count crossings on both edges");
  bec->add_option("--edge-csv", cfg.edge_csv, "Write the edge spectrum CSV");
  bec->add_option("--wannier-csv", cfg.wannier_csv, "Write the Wannier flow CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
  cfg.format = format == "machine" ? z2flow::ReportFormat::Machine : z2flow::ReportFormat::Human;

  const z2flow::Report report = z2flow::run_command(cfg);
  const std::string text =
      cfg.format == z2flow::ReportFormat::Machine ? z2flow::render_machine(report) : z2flow::render_human(report);
  if (cfg.out) {
    std::ofstream out(*cfg.out);
    if (!out || !(out << text)) {
      std::cerr << "cannot write report to " << *cfg.out << '\n';
      return 1;
    }
  } else {
    std::cout << text;
  }
  if (report.exit_code != 0 && !cfg.out) std::cerr << report.result.value("message", "") << '\n';
  return report.exit_code;
}
