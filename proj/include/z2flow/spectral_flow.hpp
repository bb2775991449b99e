#pragma once

// Crossing detection on Hermitian paths, the integer spectral flow and the
// Z2-valued half-spectral flow of tau-invariant paths on a line or circle.

#include <optional>
#include <vector>

#include "z2flow/operator_path.hpp"

namespace z2flow {

class Z2 {
 public:
  constexpr Z2() = default;
  constexpr explicit Z2(long long v) : value_(static_cast<int>(((v % 2) + 2) % 2)) {}

  constexpr int value() const { return value_; }
  constexpr Z2 operator+(Z2 other) const { return Z2(value_ + other.value_); }
  constexpr bool operator==(const Z2&) const = default;

 private:
  int value_ = 0;
};

struct CrossingRecord {
  double t = 0.0;
  int kernel_rank = 0;
  ComplexMatrix kernel_basis;               // columns span ker A(t)
  std::optional<int> crossing_signature;    // filled by annotate_signatures
  double refinement_width = 0.0;            // 0 for direct probes
  bool symmetric_point = false;             // t in {0, -pi} probed directly
};

struct FlowOptions {
  double kernel_tol = 1e-8;
  double gap_factor = kDefaultGuardFactor;
  double bisect_tol = 0.0;      // <= 0 selects 1e-10 * domain length
  double fd_step = 0.0;         // <= 0 selects 1e-5 * domain length
  double regularity_tol = 1e-6;

  double resolved_bisect_tol(const Domain& d) const {
    return bisect_tol > 0.0 ? bisect_tol : 1e-10 * d.length();
  }
  double resolved_fd_step(const Domain& d) const {
    return fd_step > 0.0 ? fd_step : 1e-5 * d.length();
  }
};

/// All crossings of the path, sorted by t. Sign changes of the negative
/// eigenvalue count are bisected; local minima of min |lambda| that show no
/// count change are refined by golden-section search; for tau-invariant
/// paths the symmetric points (0, and -pi on circles) are probed directly,
/// since Kramers partners cross in opposite directions there. On circles a
/// crossing at +-pi is reported once, at t = -pi.
std::vector<CrossingRecord> find_crossings(const OperatorPath& path, const FlowOptions& opts = {});

/// V^dagger dA/dt V on the kernel basis V, by central differences.
/// Throws DegenerateCrossing if an eigenvalue has |lambda| < regularity_tol.
HermitianOp crossing_operator(const OperatorPath& path, const CrossingRecord& rec,
                              double fd_step);

/// #positive - #negative eigenvalues of the crossing operator.
int crossing_signature(const OperatorPath& path, const CrossingRecord& rec,
                       const FlowOptions& opts = {});

/// Fills crossing_signature on every record.
void annotate_signatures(const OperatorPath& path, std::vector<CrossingRecord>& records,
                         const FlowOptions& opts = {});

/// Integer spectral flow: sum of crossing signatures.
int sf_z(const OperatorPath& path, const FlowOptions& opts = {});

/// Half of an even kernel rank at a symmetric point; odd ranks throw
/// OddKernelAtSymmetricPoint.
int half_rank(int rank, double t);

/// One crossing as it enters the half-flow sum: location and counted rank.
struct CountedCrossing {
  double t;
  int rank;
};

/// sum_{t<0} rank + rank(0)/2 (line), plus rank(-pi)/2 on circles, mod 2.
Z2 half_flow_sum(const std::vector<CountedCrossing>& crossings, const Domain& domain,
                 double symmetric_radius);

struct HalfFlowResult {
  Z2 value;
  std::vector<CrossingRecord> crossings;
  bool eps_applied = false;
  double eps = 0.0;
};

HalfFlowResult half_flow_line(const OperatorPath& path, const FlowOptions& opts = {});
Z2 sf_tau_line(const OperatorPath& path, const FlowOptions& opts = {});

enum class EpsPolicy {
  ShiftIfSingular,  // A(+-pi) singular: evaluate on A + eps
  Direct,           // always use the half-rank at -pi
};

HalfFlowResult half_flow_circle(const OperatorPath& path, EpsPolicy policy = EpsPolicy::ShiftIfSingular,
                                const FlowOptions& opts = {});
Z2 sf_tau_circle(const OperatorPath& path, EpsPolicy policy = EpsPolicy::ShiftIfSingular,
                 const FlowOptions& opts = {});

/// eps = half the smallest |lambda| >= kernel_tol of A(pi), or 0 when A(pi)
/// is invertible. Falls back to 0.5 when every eigenvalue of A(pi) vanishes.
double circle_eps_shift(const OperatorPath& path, const FlowOptions& opts = {});

struct GammaPair {
  double t = 0.0;            // the crossing with t <= 0
  int signature_here = 0;
  int signature_mirror = 0;  // at -t (or the point itself when self-mirrored)
  double residual = 0.0;     // ||G(t) + T G(-t) T^-1||_max in the ambient space
  bool self_mirrored = false;
  bool ok = false;
};

struct GammaSymmetryReport {
  bool pass = true;
  double tol = 0.0;
  std::vector<GammaPair> pairs;
};

/// Checks Gamma(A,t) = -alpha Gamma(A,-t) alpha^{-1} at mirrored crossings.
/// Crossing operators are compared as P(t) dA/dt P(t) in the ambient space,
/// which removes the kernel-basis gauge.
GammaSymmetryReport gamma_symmetry_report(const OperatorPath& path, const FlowOptions& opts = {},
                                          double tol = 1e-6);

}  // namespace z2flow
