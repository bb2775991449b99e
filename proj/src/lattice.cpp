#include "z2flow/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace z2flow {
namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

std::string key_name(const HoppingKey& key) {
  std::ostringstream os;
  os << "(" << key.first << "," << key.second << ")";
  return os.str();
}

ComplexMatrix parse_matrix(const nlohmann::json& j, int rows, const std::string& where) {
  if (!j.is_object() || !j.contains("re"))
    throw Error(ErrorKind::ParseError, where + ": matrix must be an object with 're' (and optional 'im')");
  auto read_part = [&](const char* name) {
    Eigen::MatrixXd part = Eigen::MatrixXd::Zero(rows, rows);
    if (!j.contains(name)) return part;
    const auto& arr = j.at(name);
    if (!arr.is_array() || static_cast<int>(arr.size()) != rows)
      throw Error(ErrorKind::ParseError, where + ": '" + name + "' must have " + std::to_string(rows) + " rows");
    for (int r = 0; r < rows; ++r) {
      const auto& row = arr[r];
      if (!row.is_array() || static_cast<int>(row.size()) != rows)
        throw Error(ErrorKind::ParseError, where + ": '" + name + "' rows must have " + std::to_string(rows) + " entries");
      for (int c = 0; c < rows; ++c) {
        if (!row[c].is_number()) throw Error(ErrorKind::ParseError, where + ": non-numeric entry");
        part(r, c) = row[c].get<double>();
      }
    }
    return part;
  };
  ComplexMatrix m(rows, rows);
  m.real() = read_part("re");
  m.imag() = read_part("im");
  return m;
}

nlohmann::json matrix_json(const ComplexMatrix& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json rr = nlohmann::json::array(), ri = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"re", re}, {"im", im}};
}

ComplexMatrix pauli(int which) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  switch (which) {
    case 1: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case 2: m(0, 1) = -kI; m(1, 0) = kI; break;
    case 3: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    default: m.setIdentity();
  }
  return m;
}

}  // namespace

TightBindingModel TightBindingModel::create(int k, double fermi_level, const ComplexMatrix& trs_unitary,
                                            const HoppingMap& hoppings, double tol) {
  if (k <= 0) throw Error(ErrorKind::InvalidArgument, "internal dimension must be positive");
  if (k % 2 != 0)
    throw Error(ErrorKind::OddInternalDimension, "k = " + std::to_string(k) + " is odd");
  if (!std::isfinite(fermi_level)) throw Error(ErrorKind::InvalidArgument, "Fermi level must be finite");
  if (trs_unitary.rows() != k || trs_unitary.cols() != k)
    throw Error(ErrorKind::DimensionMismatch, "time-reversal matrix must be k x k");

  TightBindingModel model;
  model.k_ = k;
  model.fermi_level_ = fermi_level;
  model.trs_ = make_anti_unitary(trs_unitary, tol);

  for (const auto& [key, m] : hoppings) {
    if (m.rows() != k || m.cols() != k)
      throw Error(ErrorKind::DimensionMismatch, "hopping " + key_name(key) + " is not k x k");
    if (!all_finite(m)) throw Error(ErrorKind::InvalidArgument, "hopping " + key_name(key) + " is not finite");
  }
  for (const auto& [key, m] : hoppings) {
    const HoppingKey partner{-key.first, -key.second};
    auto it = hoppings.find(partner);
    if (it != hoppings.end() && max_abs(it->second - m.adjoint()) > tol)
      throw Error(ErrorKind::NotSelfAdjoint,
                  "A" + key_name(partner) + " != A" + key_name(key) + "^dagger");
    if (max_abs(conjugate_by(model.trs_, m) - m) > tol)
      throw Error(ErrorKind::NotTimeReversalSymmetric,
                  "theta A" + key_name(key) + " theta^-1 != A" + key_name(key));
    model.hoppings_[key] = m;
    if (it == hoppings.end()) model.hoppings_[partner] = m.adjoint();
  }
  for (const auto& [key, m] : model.hoppings_) {
    (void)m;
    model.max_p_ = std::max(model.max_p_, std::abs(key.first));
    model.max_q_ = std::max(model.max_q_, std::abs(key.second));
  }
  return model;
}

TightBindingModel TightBindingModel::with_fermi_level(double mu) const {
  TightBindingModel out = *this;
  out.fermi_level_ = mu;
  return out;
}

TightBindingModel load_model(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "model document must be a JSON object");
  for (const char* field : {"k", "fermi_level", "trs", "hoppings"})
    if (!doc.contains(field)) throw Error(ErrorKind::ParseError, std::string("missing field '") + field + "'");
  if (!doc.at("k").is_number_integer()) throw Error(ErrorKind::ParseError, "'k' must be an integer");
  if (!doc.at("fermi_level").is_number()) throw Error(ErrorKind::ParseError, "'fermi_level' must be a number");
  const int k = doc.at("k").get<int>();
  if (k <= 0) throw Error(ErrorKind::ParseError, "'k' must be positive");
  if (k % 2 != 0) throw Error(ErrorKind::OddInternalDimension, "k = " + std::to_string(k) + " is odd");

  const ComplexMatrix trs = parse_matrix(doc.at("trs"), k, "trs");
  const auto& hops = doc.at("hoppings");
  if (!hops.is_array()) throw Error(ErrorKind::ParseError, "'hoppings' must be an array");
  HoppingMap map;
  for (std::size_t i = 0; i < hops.size(); ++i) {
    const auto& h = hops[i];
    const std::string where = "hoppings[" + std::to_string(i) + "]";
    if (!h.is_object() || !h.contains("p") || !h.contains("q") || !h.contains("matrix") ||
        !h.at("p").is_number_integer() || !h.at("q").is_number_integer())
      throw Error(ErrorKind::ParseError, where + ": needs integer 'p', 'q' and a 'matrix'");
    const HoppingKey key{h.at("p").get<int>(), h.at("q").get<int>()};
    if (map.count(key)) throw Error(ErrorKind::ParseError, where + ": duplicate entry for " + key_name(key));
    map.emplace(key, parse_matrix(h.at("matrix"), k, where));
  }
  return TightBindingModel::create(k, doc.at("fermi_level").get<double>(), trs, map);
}

TightBindingModel load_model_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  return load_model(doc);
}

TightBindingModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open model file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_model_text(buffer.str());
}

nlohmann::json model_to_json(const TightBindingModel& model) {
  nlohmann::json hops = nlohmann::json::array();
  for (const auto& [key, m] : model.hoppings())
    hops.push_back({{"p", key.first}, {"q", key.second}, {"matrix", matrix_json(m)}});
  return {{"k", model.k()},
          {"fermi_level", model.fermi_level()},
          {"trs", matrix_json(model.trs().unitary())},
          {"hoppings", hops}};
}

ComplexMatrix parse_complex_matrix(const nlohmann::json& j, int rows, const std::string& where) {
  return parse_matrix(j, rows, where);
}

nlohmann::json complex_matrix_json(const ComplexMatrix& m) { return matrix_json(m); }

TightBindingModel bhz_model(double mass, double fermi_level) {
  // sin x = (e^{ix} - e^{-ix}) / 2i, cos x = (e^{ix} + e^{-ix}) / 2.
  HoppingMap upper;
  upper[{0, 0}] = mass * pauli(3);
  upper[{1, 0}] = pauli(1) / (2.0 * kI) + 0.5 * pauli(3);
  upper[{0, 1}] = pauli(2) / (2.0 * kI) + 0.5 * pauli(3);

  HoppingMap full;
  for (const auto& [key, h] : upper) {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m.topLeftCorner(2, 2) = h;
    m.bottomRightCorner(2, 2) = h.conjugate();
    full[key] = m;
  }
  ComplexMatrix trs = ComplexMatrix::Zero(4, 4);
  trs.topRightCorner(2, 2).setIdentity();
  trs.bottomLeftCorner(2, 2) = -ComplexMatrix::Identity(2, 2);
  return TightBindingModel::create(4, fermi_level, trs, full);
}

TightBindingModel atomic_model(double fermi_level) {
  HoppingMap map;
  ComplexMatrix onsite = ComplexMatrix::Zero(4, 4);
  onsite.diagonal() << -1.0, -1.0, 1.0, 1.0;
  map[{0, 0}] = onsite;
  ComplexMatrix trs = ComplexMatrix::Zero(4, 4);
  trs(0, 1) = 1.0;
  trs(1, 0) = -1.0;
  trs(2, 3) = 1.0;
  trs(3, 2) = -1.0;
  return TightBindingModel::create(4, fermi_level, trs, map);
}

HermitianOp bulk_hamiltonian(const TightBindingModel& model, double t, double s) {
  ComplexMatrix h = ComplexMatrix::Zero(model.k(), model.k());
  for (const auto& [key, m] : model.hoppings()) h += m * std::exp(kI * (key.first * t + key.second * s));
  return HermitianOp(std::move(h), 1e-9);
}

ComplexMatrix edge_symbol(const TightBindingModel& model, int q, double t) {
  ComplexMatrix h = ComplexMatrix::Zero(model.k(), model.k());
  for (const auto& [key, m] : model.hoppings())
    if (key.second == q) h += m * std::exp(kI * (key.first * t));
  return h;
}

GapReport measure_bulk_gap(const TightBindingModel& model, int t_density, int s_density) {
  if (t_density < 1 || s_density < 1) throw Error(ErrorKind::InvalidArgument, "grid densities must be positive");
  GapReport rep;
  rep.t_density = t_density;
  rep.s_density = s_density;
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < t_density; ++i) {
    const double t = -kPi + 2.0 * kPi * i / t_density;
    for (int j = 0; j < s_density; ++j) {
      const double s = -kPi + 2.0 * kPi * j / s_density;
      const RealVector ev = hermitian_eigenvalues(bulk_hamiltonian(model, t, s));
      const double gap = (ev.array() - model.fermi_level()).abs().minCoeff();
      if (gap < rep.min_gap) {
        rep.min_gap = gap;
        rep.argmin_t = t;
        rep.argmin_s = s;
      }
    }
  }
  return rep;
}

GapReport bulk_gap(const TightBindingModel& model, int t_density, int s_density, double gap_threshold) {
  GapReport rep = measure_bulk_gap(model, t_density, s_density);
  if (rep.min_gap < gap_threshold) {
    std::ostringstream os;
    os << "bulk gap " << rep.min_gap << " at (t, s) = (" << rep.argmin_t << ", " << rep.argmin_s
       << ") below " << gap_threshold;
    throw Error(ErrorKind::GapClosed, os.str());
  }
  return rep;
}

EdgeTruncation edge_truncation(const TightBindingModel& model, int sites, int t_points,
                               const std::optional<EdgePerturbation>& perturbation) {
  if (sites <= 4 * model.max_q())
    throw Error(ErrorKind::TruncationTooSmall,
                "need more than 4 * max|q| = " + std::to_string(4 * model.max_q()) + " sites");
  const int k = model.k();
  if (perturbation) {
    const auto& p = *perturbation;
    if (p.sites <= 0 || p.sites > sites || p.matrix.rows() != p.sites * k || p.matrix.cols() != p.sites * k)
      throw Error(ErrorKind::DimensionMismatch, "edge perturbation does not fit the truncation");
    if (max_abs(p.matrix - p.matrix.adjoint()) > 1e-10)
      throw Error(ErrorKind::NotHermitian, "edge perturbation is not Hermitian");
  }

  const int max_q = model.max_q();
  std::vector<int> qs;
  for (int q = -max_q; q <= max_q; ++q) qs.push_back(q);
  PathEvaluator eval = [model, sites, k, qs, perturbation](double t) -> ComplexMatrix {
    ComplexMatrix h = ComplexMatrix::Zero(sites * k, sites * k);
    for (int q : qs) {
      const ComplexMatrix block = edge_symbol(model, q, t);
      if (max_abs(block) == 0.0) continue;
      for (int n = std::max(0, q); n < sites && n - q < sites; ++n) h.block(n * k, (n - q) * k, k, k) = block;
    }
    if (perturbation) {
      const int m = perturbation->sites * k;
      h.topLeftCorner(m, m) += perturbation->matrix;
    }
    return h;
  };
  EdgeTruncation out{sites, k,
                     OperatorPath(Domain::circle(), sites * k, std::move(eval),
                                  uniform_grid(Domain::circle(), t_points), block_lift(model.trs(), sites))};
  return out;
}

EdgeIndexResult edge_index(const TightBindingModel& model, const EdgeOptions& opts) {
  if (!(opts.loc_threshold > 0.5 && opts.loc_threshold < 1.0))
    throw Error(ErrorKind::InvalidArgument, "loc_threshold must lie in (0.5, 1)");

  EdgeIndexResult out;
  out.sites = opts.sites;
  out.t_points = opts.t_points;
  out.filtered = opts.localization_filter;
  out.gap = bulk_gap(model, opts.gap_density, opts.gap_density, opts.gap_threshold);

  const EdgeTruncation trunc = edge_truncation(model, opts.sites, opts.t_points, opts.perturbation);
  const OperatorPath path = trunc.path.shifted(-model.fermi_level());
  const auto records = find_crossings(path, opts.flow);

  const int k = model.k();
  const int left_sites = (opts.sites + 1) / 2;
  std::vector<CountedCrossing> counted;
  for (const auto& rec : records) {
    EdgeCrossing c;
    c.t = rec.t;
    c.kernel_rank = rec.kernel_rank;
    const ComplexMatrix& v = rec.kernel_basis;
    const ComplexMatrix left = v.topRows(left_sites * k);
    const RealVector w = hermitian_eigenvalues(HermitianOp(left.adjoint() * left, 1e-9));
    for (double x : w) {
      const double weight = std::clamp(x, 0.0, 1.0);
      c.left_weights.push_back(weight);
      out.max_cross_edge_weight = std::max(out.max_cross_edge_weight, std::min(weight, 1.0 - weight));
      out.min_loc_margin = std::min(out.min_loc_margin, std::abs(2.0 * weight - 1.0));
      if (weight >= opts.loc_threshold) {
        ++c.left_rank;
      } else if (weight <= 1.0 - opts.loc_threshold) {
        ++c.right_rank;
      } else if (opts.localization_filter) {
        std::ostringstream os;
        os << "crossing at t = " << rec.t << " has left-half weight " << weight;
        throw Error(ErrorKind::AmbiguousLocalization, os.str());
      }
    }
    counted.push_back({rec.t, opts.localization_filter ? c.left_rank : c.kernel_rank});
    out.crossings.push_back(std::move(c));
  }
  if (opts.localization_filter && out.max_cross_edge_weight > opts.decoupling_tol) {
    std::ostringstream os;
    os << "edges not decoupled at N = " << opts.sites << ": cross-edge weight "
       << out.max_cross_edge_weight << " above " << opts.decoupling_tol;
    throw Error(ErrorKind::TruncationTooSmall, os.str());
  }
  out.value = half_flow_sum(counted, path.domain(), 10.0 * opts.flow.resolved_bisect_tol(path.domain()));
  return out;
}

std::vector<EdgeSpectrumRow> edge_spectrum(const TightBindingModel& model, int sites, int t_points) {
  const EdgeTruncation trunc = edge_truncation(model, sites, t_points);
  const int left_rows = (sites + 1) / 2 * model.k();
  std::vector<EdgeSpectrumRow> rows;
  for (double t : trunc.path.sample_grid()) {
    const EigDecomposition eig = hermitian_eig(trunc.path.at(t));
    for (Eigen::Index b = 0; b < eig.eigenvalues.size(); ++b) {
      const double w = eig.eigenvectors.col(b).head(left_rows).squaredNorm();
      rows.push_back({t, static_cast<int>(b), eig.eigenvalues(b), w});
    }
  }
  return rows;
}

std::string edge_spectrum_csv(const std::vector<EdgeSpectrumRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "t,branch,eigenvalue,left_weight\n";
  for (const auto& r : rows) os << r.t << ',' << r.branch << ',' << r.eigenvalue << ',' << r.left_weight << '\n';
  return os.str();
}

}  // namespace z2flow
