#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "z2flow/linalg.hpp"

namespace z2flow {

enum class DomainKind { Line, Circle };

/// Parameter domain. Circle paths are parametrized by t in [-pi, pi] with
/// the endpoints identified.
struct Domain {
  DomainKind kind = DomainKind::Line;
  double t_min = 0.0;
  double t_max = 0.0;

  static Domain line(double t_min, double t_max);
  static Domain circle();

  double length() const { return t_max - t_min; }
  bool is_circle() const { return kind == DomainKind::Circle; }
};

using PathEvaluator = std::function<ComplexMatrix(double)>;

struct PathTolerances {
  double herm_tol = kDefaultHermTol;
  double path_tol = 1e-10;      // tau-invariance and circle periodicity
  double endpoint_tol = 1e-8;   // line endpoints must have min |lambda| above this
};

/// A family t -> A(t) of Hermitian matrices over a line segment or circle.
/// The sample grid is only the scan skeleton; operations evaluate lazily.
class OperatorPath {
 public:
  OperatorPath(Domain domain, Eigen::Index dim, PathEvaluator evaluator,
               std::vector<double> sample_grid, std::optional<AntiUnitary> tau = std::nullopt,
               PathTolerances tolerances = {});

  const Domain& domain() const { return domain_; }
  Eigen::Index dim() const { return dim_; }
  const std::vector<double>& sample_grid() const { return grid_; }
  const std::optional<AntiUnitary>& tau() const { return tau_; }
  const PathTolerances& tolerances() const { return tol_; }
  const PathEvaluator& evaluator() const { return eval_; }

  HermitianOp at(double t) const;
  ComplexMatrix matrix_at(double t) const { return at(t).matrix(); }

  /// max over the grid of ||A(t) - T A(-t) T^{-1}||_max (0 without tau).
  double tau_residual() const;

  /// A(t) + shift * I on the same grid.
  OperatorPath shifted(double shift) const;
  /// -A(t).
  OperatorPath negated() const;
  /// A(t) + scale * C(t); tau is kept, so C must be tau-invariant for the
  /// result to validate.
  OperatorPath perturbed(const PathEvaluator& c, double scale) const;
  /// Path restricted to a new sample grid.
  OperatorPath with_grid(std::vector<double> grid) const;
  /// A circle path read as a line path on [-pi, pi]; A(+-pi) must be invertible.
  OperatorPath as_line() const;

 private:
  Domain domain_;
  Eigen::Index dim_;
  PathEvaluator eval_;
  std::vector<double> grid_;
  std::optional<AntiUnitary> tau_;
  PathTolerances tol_;
};

/// `points` equispaced samples covering the domain, endpoints included.
/// When the domain is symmetric about 0 and `points` is odd, 0 is a sample.
std::vector<double> uniform_grid(const Domain& domain, int points);

/// A1 (+) A2 with block-diagonal tau. Domains must agree; the grid is the
/// union of both grids.
OperatorPath direct_sum(const OperatorPath& a, const OperatorPath& b);

/// Smallest T >= t0 (doubling) with ||A(+-T) - A(+-2T)||_max < plateau_tol,
/// capped at t_cap. Returns t_cap when no plateau is found before it.
double plateau_truncation(const PathEvaluator& evaluator, double t0, double plateau_tol = 1e-6,
                          double t_cap = 1e6);

}  // namespace z2flow
