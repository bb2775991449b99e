#pragma once

// Discretized suspension operators d/dt + A(t): Fourier-spectral with
// periodic boundary conditions, midpoint finite differences with APS
// boundary conditions, and their Z / Z2 kernel indices.

#include <optional>
#include <string>
#include <vector>

#include "z2flow/spectral_flow.hpp"

namespace z2flow {

enum class BoundaryKind { Periodic, APS };

struct SuspensionMatrix {
  BoundaryKind boundary = BoundaryKind::Periodic;
  int n_modes = 0;            // periodic: modes m in [-n_modes, n_modes]
  int n_grid = 0;             // APS: grid points
  double t_min = 0.0, t_max = 0.0;
  Eigen::Index block_dim = 0;
  ComplexMatrix matrix;
  std::optional<AntiUnitary> induced_tau;
  /// Periodic: ||T conj(S) T^dagger - S^dagger||_max.
  /// APS: the path's tau residual on the difference grid and its midpoints.
  double symmetry_residual = 0.0;
  double aliasing_ratio = 0.0;  // periodic only: tail/total Fourier norm
};

struct SuspensionOptions {
  double alias_tol = 1e-8;
  double symmetry_tol = 1e-8;
};

/// Fourier-spectral discretization in the basis e^{imt} (x) e_j. A(t) is
/// sampled at 2(2 n_modes + 1) equispaced points.
SuspensionMatrix build_periodic(const OperatorPath& path, int n_modes, const SuspensionOptions& opts = {});

/// Midpoint finite differences on n_grid points plus APS constraint rows:
/// the nonnegative spectral projector of A(t_min) annihilates the first
/// value and the nonpositive projector of A(t_max) the last.
SuspensionMatrix build_aps(const OperatorPath& path, int n_grid, const SuspensionOptions& opts = {});

struct IndexReport {
  int kernel_dim = 0;
  int cokernel_dim = 0;
  int z_index = 0;
  std::optional<Z2> tau_index;
  double singular_value_gap = 0.0;
  double threshold = 0.0;  // absolute singular-value cutoff used
  double smallest_singular_value = 0.0;
};

/// Kernel and cokernel dimensions by singular-value thresholding at
/// sigma_tol * sigma_max. Throws NoSpectralGap unless the retained/rejected
/// ratio is at least gap_factor (or, with an empty kernel, sigma_min is at
/// least gap_factor times the cutoff).
IndexReport index_of(const SuspensionMatrix& s, double sigma_tol = 1e-8, double gap_factor = 100.0,
                     double symmetry_tol = 1e-8);

struct ResolutionStep {
  int resolution = 0;
  std::optional<IndexReport> report;
  std::string refusal;  // set when this resolution had no spectral gap
};

struct RobbinSalamonReport {
  BoundaryKind boundary = BoundaryKind::Periodic;
  Z2 sf_tau;
  std::optional<Z2> ind_tau;
  bool equal = false;
  bool stabilized = false;
  bool eps_applied = false;  // eps shift used for the flow side
  double eps = 0.0;
  std::vector<CrossingRecord> crossings;
  std::vector<ResolutionStep> steps;
};

struct RobbinSalamonOptions {
  std::vector<int> schedule;  // empty: {16, 32, 64} modes or {200, 400, 800} grid points
  double sigma_tol = 1e-8;
  double gap_factor = 100.0;
  FlowOptions flow;
  SuspensionOptions suspension;
};

/// Computes sf_tau (line or circle) and the tau-index of the matching
/// suspension discretization, walking the resolution schedule until two
/// consecutive gapped resolutions agree.
RobbinSalamonReport robbin_salamon_z2_check(const OperatorPath& path,
                                            const RobbinSalamonOptions& opts = {});

}  // namespace z2flow
