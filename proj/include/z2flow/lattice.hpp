#pragma once

// Tight-binding models on Z x Z with internal dimension k: validation,
// Bloch symbols, bulk gap scans, half-lattice truncation and the Z2 edge
// index.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "z2flow/spectral_flow.hpp"

namespace z2flow {

using HoppingKey = std::pair<int, int>;  // (p, q)
using HoppingMap = std::map<HoppingKey, ComplexMatrix>;

/// H(t, s) = sum_{p,q} A_{p,q} e^{ipt} e^{iqs} with A_{-p,-q} = A_{p,q}^dagger
/// and theta A_{p,q} theta^{-1} = A_{p,q}.
class TightBindingModel {
 public:
  /// Validates and completes the hopping table: a missing (-p,-q) partner
  /// is synthesized as the adjoint. `trs_unitary` is the unitary part of theta.
  static TightBindingModel create(int k, double fermi_level, const ComplexMatrix& trs_unitary,
                                  const HoppingMap& hoppings, double tol = 1e-10);

  int k() const { return k_; }
  double fermi_level() const { return fermi_level_; }
  const AntiUnitary& trs() const { return trs_; }
  const HoppingMap& hoppings() const { return hoppings_; }
  int max_p() const { return max_p_; }
  int max_q() const { return max_q_; }

  TightBindingModel with_fermi_level(double mu) const;

 private:
  TightBindingModel() = default;

  int k_ = 0;
  double fermi_level_ = 0.0;
  AntiUnitary trs_;
  HoppingMap hoppings_;
  int max_p_ = 0;
  int max_q_ = 0;
};

/// Parses the JSON model document; throws ParseError, NotSelfAdjoint,
/// NotTimeReversalSymmetric or OddInternalDimension.
TightBindingModel load_model(const nlohmann::json& document);
TightBindingModel load_model_text(std::string_view text);
TightBindingModel load_model_file(const std::filesystem::path& path);
nlohmann::json model_to_json(const TightBindingModel& model);

/// `{re: [[..]], im: [[..]]}` with `im` optional; throws ParseError.
ComplexMatrix parse_complex_matrix(const nlohmann::json& j, int rows, const std::string& where);
nlohmann::json complex_matrix_json(const ComplexMatrix& m);

/// BHZ-type fixture: blockdiag(h(t,s), conj h(-t,-s)) with
/// h = sin t sx + sin s sy + (M + cos t + cos s) sz and theta = block swap.
TightBindingModel bhz_model(double mass, double fermi_level = 0.0);
/// Only A_{0,0} = diag(-1, -1, 1, 1).
TightBindingModel atomic_model(double fermi_level = 0.0);

HermitianOp bulk_hamiltonian(const TightBindingModel& model, double t, double s);
/// H_q(t) = sum_p A_{p,q} e^{ipt}.
ComplexMatrix edge_symbol(const TightBindingModel& model, int q, double t);

struct GapReport {
  double min_gap = 0.0;
  double argmin_t = 0.0;
  double argmin_s = 0.0;
  int t_density = 0;
  int s_density = 0;
};

/// min over a periodic t_density x s_density grid of min_i |lambda_i - mu|.
GapReport measure_bulk_gap(const TightBindingModel& model, int t_density, int s_density);
/// As measure_bulk_gap, throwing GapClosed below gap_threshold.
GapReport bulk_gap(const TightBindingModel& model, int t_density, int s_density,
                   double gap_threshold = 1e-6);

/// Hermitian, theta-symmetric matrix acting on the first `sites` sites.
struct EdgePerturbation {
  int sites = 0;
  ComplexMatrix matrix;  // (sites * k) x (sites * k)
};

struct EdgeTruncation {
  int sites = 0;
  int k = 0;
  OperatorPath path;  // t -> H#(t), dimension sites * k, tau = sitewise theta
};

/// Block (n, n') of H#(t) is H_{n-n'}(t), n, n' = 0..sites-1.
/// Throws TruncationTooSmall unless sites > 4 * max_q.
EdgeTruncation edge_truncation(const TightBindingModel& model, int sites, int t_points,
                               const std::optional<EdgePerturbation>& perturbation = std::nullopt);

struct EdgeOptions {
  int sites = 30;
  int t_points = 400;
  double loc_threshold = 0.9;
  bool localization_filter = true;
  double decoupling_tol = 1e-6;
  int gap_density = 100;
  double gap_threshold = 1e-6;
  FlowOptions flow;
  std::optional<EdgePerturbation> perturbation;
};

struct EdgeCrossing {
  double t = 0.0;
  int kernel_rank = 0;
  int left_rank = 0;
  int right_rank = 0;
  std::vector<double> left_weights;  // eigenvalues of V^dagger P_left V
};

struct EdgeIndexResult {
  Z2 value;
  int sites = 0;
  int t_points = 0;
  bool filtered = true;
  double max_cross_edge_weight = 0.0;  // max min(w, 1 - w) over crossing states
  double min_loc_margin = 1.0;         // min over crossings of |w - 1/2| * 2
  GapReport gap;
  std::vector<EdgeCrossing> crossings;
};

/// sf_tau of t -> H#(t) - mu on the circle, counting only crossings
/// localized on the left half (sites < ceil(N/2)) when filtering is on.
EdgeIndexResult edge_index(const TightBindingModel& model, const EdgeOptions& opts = {});

struct EdgeSpectrumRow {
  double t;
  int branch;
  double eigenvalue;
  double left_weight;
};

std::vector<EdgeSpectrumRow> edge_spectrum(const TightBindingModel& model, int sites, int t_points);
std::string edge_spectrum_csv(const std::vector<EdgeSpectrumRow>& rows);

}  // namespace z2flow
