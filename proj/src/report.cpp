#include "z2flow/report.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ios>
#include <sstream>

#include "z2flow/builtin_paths.hpp"

namespace z2flow {
namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  out << text;
  if (!out) throw std::ios_base::failure("write failed for " + path);
}

json crossings_json(const std::vector<CrossingRecord>& recs) {
  json arr = json::array();
  for (const auto& r : recs) {
    json c = {{"t", r.t}, {"kernel_rank", r.kernel_rank}, {"symmetric_point", r.symmetric_point}};
    if (r.crossing_signature) c["signature"] = *r.crossing_signature;
    arr.push_back(std::move(c));
  }
  return arr;
}

json index_json(const IndexReport& r) {
  json j = {{"kernel_dim", r.kernel_dim},
            {"cokernel_dim", r.cokernel_dim},
            {"z_index", r.z_index},
            {"singular_value_gap", r.singular_value_gap},
            {"threshold", r.threshold},
            {"smallest_singular_value", r.smallest_singular_value}};
  j["tau_index"] = r.tau_index ? json(r.tau_index->value()) : json(nullptr);
  return j;
}

json gap_json(const GapReport& g) {
  return {{"min_gap", g.min_gap}, {"argmin_t", g.argmin_t}, {"argmin_s", g.argmin_s},
          {"t_density", g.t_density}, {"s_density", g.s_density}};
}

std::string model_source(const RunConfig& cfg) {
  if (cfg.model_path) return read_file(*cfg.model_path);
  return "fixture:" + cfg.fixture.value_or("");
}

Report start_report(const RunConfig& cfg, const std::string& inputs) {
  Report r;
  r.command = cfg.command;
  r.config = cfg.to_json();
  r.inputs_digest = fnv1a_hex(r.config.dump() + '\n' + inputs);
  return r;
}

void render_value(std::ostringstream& os, const json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (v.is_object()) {
    for (const auto& [key, val] : v.items()) {
      if (val.is_structured() && !val.empty()) {
        os << pad << key << ":\n";
        render_value(os, val, indent + 1);
      } else {
        os << pad << key << ": " << val.dump() << '\n';
      }
    }
  } else if (v.is_array()) {
    for (const auto& el : v) {
      if (el.is_object()) {
        os << pad << "-";
        std::string sep = " ";
        for (const auto& [key, val] : el.items()) {
          os << sep << key << "=" << val.dump();
          sep = ", ";
        }
        os << '\n';
      } else {
        os << pad << "- " << el.dump() << '\n';
      }
    }
  } else {
    os << pad << v.dump() << '\n';
  }
}

double term_value(const std::string& f, double x) {
  if (f == "const") return 1.0;
  if (f == "cos") return std::cos(x);
  if (f == "sin") return std::sin(x);
  if (f == "atan") return std::atan(x);
  if (f == "tanh") return std::tanh(x);
  if (f == "sech") return 1.0 / std::cosh(x);
  throw Error(ErrorKind::ParseError, "unknown path term function '" + f + "'");
}

}  // namespace

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::InvalidArgument, what);
  };
  require(kernel_tol > 0.0, "--kernel-tol must be positive");
  require(loc_threshold > 0.5 && loc_threshold < 1.0, "--loc-threshold must lie in (0.5, 1)");
  require(sites >= 2, "--sites must be at least 2");
  require(!t_points || *t_points >= 8, "--t-points must be at least 8");
  require(bulk_t_points >= 2, "--bulk-t-points must be at least 2");
  require(s_points >= 3, "--s-points must be at least 3");
  require(!modes || *modes >= 1, "--modes must be at least 1");
  require(half_width > 0.0, "--half-width must be positive");
  require(!(model_path && fixture), "--model and --fixture are exclusive");
}

json RunConfig::to_json() const {
  json j = {{"command", command},
            {"mass", mass},
            {"sites", sites},
            {"bulk_t_points", bulk_t_points},
            {"s_points", s_points},
            {"kernel_tol", kernel_tol},
            {"loc_threshold", loc_threshold},
            {"localization_filter", localization_filter},
            {"half_width", half_width}};
  j["model"] = model_path ? json(*model_path) : json(nullptr);
  j["fixture"] = fixture ? json(*fixture) : json(nullptr);
  j["fermi"] = fermi ? json(*fermi) : json(nullptr);
  j["path"] = path ? json(*path) : json(nullptr);
  j["t_points"] = t_points ? json(*t_points) : json(nullptr);
  j["modes"] = modes ? json(*modes) : json(nullptr);
  return j;
}

json report_to_json(const Report& r) {
  json j = {{"command", r.command},       {"config", r.config}, {"inputs_digest", r.inputs_digest},
            {"status", r.status},         {"exit_code", r.exit_code}, {"result", r.result},
            {"warnings", r.warnings}};
  if (r.timing_ms) j["timing_ms"] = *r.timing_ms;
  return j;
}

Report report_from_json(const json& j) {
  Report r;
  try {
    r.command = j.at("command").get<std::string>();
    r.config = j.at("config");
    r.inputs_digest = j.at("inputs_digest").get<std::string>();
    r.status = j.at("status").get<std::string>();
    r.exit_code = j.at("exit_code").get<int>();
    r.result = j.at("result");
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (j.contains("timing_ms")) r.timing_ms = j.at("timing_ms").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string render_machine(const Report& r) { return report_to_json(r).dump(2) + '\n'; }

std::string render_human(const Report& r) {
  std::ostringstream os;
  os << "command: " << r.command << '\n'
     << "status: " << r.status << " (exit " << r.exit_code << ")\n"
     << "inputs digest: " << r.inputs_digest << '\n'
     << "result:\n";
  render_value(os, r.result, 1);
  if (!r.warnings.empty()) {
    os << "warnings:\n";
    for (const auto& w : r.warnings) os << "  - " << w << '\n';
  }
  if (r.timing_ms) os << "time: " << *r.timing_ms << " ms\n";
  return os.str();
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

int exit_code_for(ErrorKind kind) { return is_numerical_refusal(kind) ? 3 : 2; }

OperatorPath load_path(const json& doc, std::optional<int> grid_points) {
  try {
    const std::string kind = doc.at("domain").get<std::string>();
    const int dim = doc.at("dim").get<int>();
    if (dim < 1) throw Error(ErrorKind::ParseError, "path 'dim' must be positive");
    Domain domain = Domain::circle();
    if (kind == "line") {
      domain = Domain::line(doc.at("t_min").get<double>(), doc.at("t_max").get<double>());
    } else if (kind != "circle") {
      throw Error(ErrorKind::ParseError, "path 'domain' must be 'line' or 'circle'");
    }
    struct Term {
      std::string f;
      double freq, shift;
      ComplexMatrix m;
    };
    std::vector<Term> terms;
    const auto& arr = doc.at("terms");
    if (!arr.is_array() || arr.empty()) throw Error(ErrorKind::ParseError, "path 'terms' must be a nonempty array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto& t = arr[i];
      const std::string where = "terms[" + std::to_string(i) + "]";
      Term term{t.at("f").get<std::string>(), t.value("freq", 1.0), t.value("shift", 0.0),
                parse_complex_matrix(t.at("matrix"), dim, where)};
      term_value(term.f, 0.0);  // rejects unknown names
      if (domain.is_circle()) {
        const bool periodic = term.f == "const" || ((term.f == "cos" || term.f == "sin") &&
                                                     term.freq == std::round(term.freq));
        if (!periodic)
          throw Error(ErrorKind::ParseError, where + ": circle paths take const, cos or sin with integer freq");
      }
      terms.push_back(std::move(term));
    }
    std::optional<AntiUnitary> tau;
    if (doc.contains("tau")) tau = make_anti_unitary(parse_complex_matrix(doc.at("tau"), dim, "tau"));
    const int points = grid_points.value_or(doc.value("grid_points", 401));
    auto eval = [terms, dim](double t) {
      ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
      for (const auto& term : terms) a += term_value(term.f, term.freq * (t - term.shift)) * term.m;
      return a;
    };
    return OperatorPath(domain, dim, eval, uniform_grid(domain, points), tau);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("path document: ") + e.what());
  }
}

OperatorPath load_path_file(const std::string& path, std::optional<int> grid_points) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  return load_path(doc, grid_points);
}

TightBindingModel resolve_model(const RunConfig& cfg) {
  std::optional<TightBindingModel> model;
  if (cfg.model_path) {
    model = load_model_file(*cfg.model_path);
  } else if (cfg.fixture == "bhz") {
    model = bhz_model(cfg.mass);
  } else if (cfg.fixture == "atomic") {
    model = atomic_model();
  } else if (cfg.fixture) {
    throw Error(ErrorKind::InvalidArgument, "unknown fixture '" + *cfg.fixture + "' (expected bhz or atomic)");
  } else {
    throw Error(ErrorKind::InvalidArgument, "one of --model or --fixture is required");
  }
  if (cfg.fermi) return model->with_fermi_level(*cfg.fermi);
  return *model;
}

OperatorPath resolve_path(const RunConfig& cfg) {
  if (!cfg.path) throw Error(ErrorKind::InvalidArgument, "--path is required");
  for (const auto& name : builtin_path_names())
    if (name == *cfg.path)
      return builtin_path(name, BuiltinPathOptions{cfg.half_width, cfg.t_points.value_or(401)});
  return load_path_file(*cfg.path, cfg.t_points);
}

Report cmd_validate(const RunConfig& cfg) {
  Report r = start_report(cfg, model_source(cfg));
  const TightBindingModel m = resolve_model(cfg);
  r.result = {{"valid", true},
              {"k", m.k()},
              {"fermi_level", m.fermi_level()},
              {"hoppings", m.hoppings().size()},
              {"max_p", m.max_p()},
              {"max_q", m.max_q()},
              {"checks",
               {{"even_internal_dimension", "pass"}, {"self_adjoint", "pass"}, {"time_reversal", "pass"}}}};
  return r;
}

Report cmd_sf_tau(const RunConfig& cfg) {
  const OperatorPath path = resolve_path(cfg);
  Report r = start_report(cfg, *cfg.path);
  FlowOptions flow;
  flow.kernel_tol = cfg.kernel_tol;
  HalfFlowResult hf = path.domain().is_circle() ? half_flow_circle(path, EpsPolicy::ShiftIfSingular, flow)
                                                : half_flow_line(path, flow);
  try {
    annotate_signatures(path, hf.crossings, flow);
    int total = 0;
    for (const auto& c : hf.crossings) total += c.crossing_signature.value_or(0);
    r.result["sf_z"] = total;
  } catch (const Error& e) {
    r.warnings.push_back(std::string("crossing signatures unavailable: ") + e.what());
  }
  r.result["domain"] = path.domain().is_circle() ? "circle" : "line";
  r.result["t_min"] = path.domain().t_min;
  r.result["t_max"] = path.domain().t_max;
  r.result["dim"] = path.dim();
  r.result["sf_tau"] = hf.value.value();
  r.result["eps_applied"] = hf.eps_applied;
  r.result["eps"] = hf.eps;
  r.result["crossings"] = crossings_json(hf.crossings);
  if (hf.eps_applied) r.warnings.push_back("A(pi) singular: evaluated on A + eps with eps = " + std::to_string(hf.eps));
  return r;
}

Report cmd_suspension_check(const RunConfig& cfg) {
  const OperatorPath path = resolve_path(cfg);
  Report r = start_report(cfg, *cfg.path);
  RobbinSalamonOptions opts;
  opts.flow.kernel_tol = cfg.kernel_tol;
  if (cfg.modes) opts.schedule = {*cfg.modes, 2 * *cfg.modes, 4 * *cfg.modes};
  const RobbinSalamonReport rs = robbin_salamon_z2_check(path, opts);

  json steps = json::array();
  for (const auto& s : rs.steps) {
    json step = {{"resolution", s.resolution}};
    if (s.report) step["index"] = index_json(*s.report);
    if (!s.refusal.empty()) step["refusal"] = s.refusal;
    steps.push_back(std::move(step));
  }
  r.result = {{"boundary", rs.boundary == BoundaryKind::APS ? "aps" : "periodic"},
              {"sf_tau", rs.sf_tau.value()},
              {"equal", rs.equal},
              {"stabilized", rs.stabilized},
              {"eps_applied", rs.eps_applied},
              {"eps", rs.eps},
              {"crossings", crossings_json(rs.crossings)},
              {"resolutions", steps}};
  r.result["ind_tau"] = rs.ind_tau ? json(rs.ind_tau->value()) : json(nullptr);
  if (!rs.ind_tau)
    throw Error(ErrorKind::NoSpectralGap, "no spectral gap in the suspension at any resolution of the schedule");
  if (!rs.stabilized) r.warnings.push_back("index did not stabilize across two consecutive resolutions");
  if (rs.eps_applied) r.warnings.push_back("eps shift applied: eps = " + std::to_string(rs.eps));
  return r;
}

Report cmd_bec(const RunConfig& cfg) {
  Report r = start_report(cfg, model_source(cfg));
  const TightBindingModel model = resolve_model(cfg);

  BecOptions opts;
  opts.edge.sites = cfg.sites;
  opts.edge.t_points = cfg.t_points.value_or(400);
  opts.edge.loc_threshold = cfg.loc_threshold;
  opts.edge.localization_filter = cfg.localization_filter;
  opts.edge.flow.kernel_tol = cfg.kernel_tol;
  opts.bulk.t_points = cfg.bulk_t_points;
  opts.bulk.s_points = cfg.s_points;
  const BecReport bec = bec_verify(model, opts);

  json edge_cross = json::array();
  for (const auto& c : bec.edge.crossings)
    edge_cross.push_back({{"t", c.t}, {"kernel_rank", c.kernel_rank}, {"left_rank", c.left_rank},
                          {"right_rank", c.right_rank}, {"left_weights", c.left_weights}});
  r.result = {
      {"bulk_index", bec.bulk.value.value()},
      {"edge_index", bec.edge.value.value()},
      {"equal", bec.equal},
      {"bulk",
       {{"n_bands", bec.bulk.n_bands},
        {"reference_line", bec.bulk.reference_line},
        {"line_replaced", bec.bulk.line_replaced},
        {"crossing_count", bec.bulk.crossing_count},
        {"t_points", cfg.bulk_t_points},
        {"s_points", cfg.s_points}}},
      {"edge",
       {{"sites", bec.edge.sites},
        {"t_points", bec.edge.t_points},
        {"filtered", bec.edge.filtered},
        {"max_cross_edge_weight", bec.edge.max_cross_edge_weight},
        {"min_localization_margin", bec.edge.min_loc_margin},
        {"bulk_gap", gap_json(bec.edge.gap)},
        {"crossings", edge_cross}}}};
  if (!bec.edge.crossings.empty() && bec.edge.min_loc_margin < 0.9)
    r.warnings.push_back("edge-state localization margin " + std::to_string(bec.edge.min_loc_margin));
  if (!bec.equal) r.warnings.push_back("bulk and edge indices disagree");

  if (cfg.edge_csv)
    write_file(*cfg.edge_csv, edge_spectrum_csv(edge_spectrum(model, cfg.sites, opts.edge.t_points)));
  if (cfg.wannier_csv) write_file(*cfg.wannier_csv, wannier_flow_csv(bec.bulk.flow));
  return r;
}

Report run_command(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Report r;
  auto fail = [&](int code, const std::string& kind, const std::string& message) {
    Report e;
    e.command = cfg.command;
    e.config = cfg.to_json();
    e.inputs_digest = fnv1a_hex(e.config.dump());
    e.status = "error";
    e.exit_code = code;
    e.result = {{"error", kind}, {"message", message}};
    return e;
  };
  try {
    cfg.validate();
    if (cfg.command == "validate") r = cmd_validate(cfg);
    else if (cfg.command == "sf-tau") r = cmd_sf_tau(cfg);
    else if (cfg.command == "suspension-check") r = cmd_suspension_check(cfg);
    else if (cfg.command == "bec") r = cmd_bec(cfg);
    else throw Error(ErrorKind::InvalidArgument, "unknown command '" + cfg.command + "'");
  } catch (const Error& e) {
    r = fail(exit_code_for(e.kind()), std::string(to_string(e.kind())), e.what());
  } catch (const std::ios_base::failure& e) {
    r = fail(1, "IoError", e.what());
  } catch (const std::exception& e) {
    r = fail(2, "InvalidInput", e.what());
  }
  if (cfg.timing || cfg.format == ReportFormat::Human)
    r.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace z2flow
