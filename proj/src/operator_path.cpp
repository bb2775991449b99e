#include "z2flow/operator_path.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace z2flow {

Domain Domain::line(double t_min, double t_max) {
  if (!(t_min < t_max) || !std::isfinite(t_min) || !std::isfinite(t_max))
    throw Error(ErrorKind::InvalidArgument, "line domain needs finite t_min < t_max");
  return {DomainKind::Line, t_min, t_max};
}

Domain Domain::circle() {
  return {DomainKind::Circle, -std::numbers::pi, std::numbers::pi};
}

std::vector<double> uniform_grid(const Domain& domain, int points) {
  if (points < 2) throw Error(ErrorKind::InvalidArgument, "grid needs at least 2 points");
  std::vector<double> grid(points);
  const double h = domain.length() / (points - 1);
  for (int i = 0; i < points; ++i) grid[i] = domain.t_min + h * i;
  grid.back() = domain.t_max;
  // Snap the midpoint exactly onto 0 for symmetric domains.
  if (points % 2 == 1 && std::abs(domain.t_min + domain.t_max) < 1e-14 * domain.length())
    grid[points / 2] = 0.0;
  return grid;
}

OperatorPath::OperatorPath(Domain domain, Eigen::Index dim, PathEvaluator evaluator,
                           std::vector<double> sample_grid, std::optional<AntiUnitary> tau,
                           PathTolerances tolerances)
    : domain_(domain),
      dim_(dim),
      eval_(std::move(evaluator)),
      grid_(std::move(sample_grid)),
      tau_(std::move(tau)),
      tol_(tolerances) {
  if (dim_ <= 0) throw Error(ErrorKind::InvalidArgument, "path dimension must be positive");
  if (!eval_) throw Error(ErrorKind::InvalidArgument, "path evaluator is empty");
  if (grid_.size() < 2) throw Error(ErrorKind::InvalidArgument, "sample grid needs >= 2 points");
  for (std::size_t i = 1; i < grid_.size(); ++i)
    if (!(grid_[i] > grid_[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "sample grid must be strictly increasing");
  const double slack = 1e-12 * domain_.length();
  if (std::abs(grid_.front() - domain_.t_min) > slack || std::abs(grid_.back() - domain_.t_max) > slack)
    throw Error(ErrorKind::InvalidArgument, "sample grid must cover the domain endpoints");
  grid_.front() = domain_.t_min;
  grid_.back() = domain_.t_max;

  if (tau_) {
    if (tau_->dim() != dim_)
      throw Error(ErrorKind::DimensionMismatch, "tau dimension differs from path dimension");
    if (std::abs(domain_.t_min + domain_.t_max) > slack)
      throw Error(ErrorKind::InvalidArgument, "tau-invariant paths need a domain symmetric about 0");
    const double residual = tau_residual();
    if (residual > tol_.path_tol) {
      std::ostringstream os;
      os << "max_t ||A(t) - T A(-t) T^-1||_max = " << residual;
      throw Error(ErrorKind::NotTauInvariant, os.str());
    }
  }

  if (domain_.is_circle()) {
    const double mismatch = max_abs(matrix_at(-std::numbers::pi) - matrix_at(std::numbers::pi));
    if (mismatch > tol_.path_tol)
      throw Error(ErrorKind::InvalidArgument, "circle path: A(-pi) != A(pi)");
  } else {
    for (double t : {domain_.t_min, domain_.t_max}) {
      const RealVector ev = hermitian_eigenvalues(at(t));
      if (ev.cwiseAbs().minCoeff() <= tol_.endpoint_tol) {
        std::ostringstream os;
        os << "A(" << t << ") is not invertible";
        throw Error(ErrorKind::SingularEndpoint, os.str());
      }
    }
  }
}

HermitianOp OperatorPath::at(double t) const {
  ComplexMatrix m = eval_(t);
  if (m.rows() != dim_ || m.cols() != dim_)
    throw Error(ErrorKind::DimensionMismatch, "path evaluator returned a matrix of the wrong size");
  return HermitianOp(std::move(m), tol_.herm_tol);
}

double OperatorPath::tau_residual() const {
  if (!tau_) return 0.0;
  double worst = 0.0;
  for (double t : grid_)
    worst = std::max(worst, max_abs(matrix_at(t) - conjugate_by(*tau_, matrix_at(-t))));
  return worst;
}

OperatorPath OperatorPath::shifted(double shift) const {
  auto base = eval_;
  const auto n = dim_;
  return OperatorPath(
      domain_, dim_,
      [base, n, shift](double t) -> ComplexMatrix {
        return base(t) + shift * ComplexMatrix::Identity(n, n);
      },
      grid_, tau_, tol_);
}

OperatorPath OperatorPath::negated() const {
  auto base = eval_;
  return OperatorPath(
      domain_, dim_, [base](double t) -> ComplexMatrix { return -base(t); }, grid_, tau_, tol_);
}

OperatorPath OperatorPath::perturbed(const PathEvaluator& c, double scale) const {
  auto base = eval_;
  return OperatorPath(
      domain_, dim_,
      [base, c, scale](double t) -> ComplexMatrix { return base(t) + scale * c(t); }, grid_, tau_,
      tol_);
}

OperatorPath OperatorPath::with_grid(std::vector<double> grid) const {
  return OperatorPath(domain_, dim_, eval_, std::move(grid), tau_, tol_);
}

OperatorPath OperatorPath::as_line() const {
  if (!domain_.is_circle()) return *this;
  return OperatorPath(Domain::line(domain_.t_min, domain_.t_max), dim_, eval_, grid_, tau_, tol_);
}

OperatorPath direct_sum(const OperatorPath& a, const OperatorPath& b) {
  if (a.domain().kind != b.domain().kind ||
      std::abs(a.domain().t_min - b.domain().t_min) > 1e-12 ||
      std::abs(a.domain().t_max - b.domain().t_max) > 1e-12)
    throw Error(ErrorKind::InvalidArgument, "direct_sum: domains differ");
  if (a.tau().has_value() != b.tau().has_value())
    throw Error(ErrorKind::InvalidArgument, "direct_sum: both or neither path must carry tau");

  std::vector<double> grid = a.sample_grid();
  grid.insert(grid.end(), b.sample_grid().begin(), b.sample_grid().end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double x, double y) { return std::abs(x - y) < 1e-14; }),
             grid.end());

  const auto n = a.dim(), m = b.dim();
  PathEvaluator eval = [a, b, n, m](double t) -> ComplexMatrix {
    ComplexMatrix out = ComplexMatrix::Zero(n + m, n + m);
    out.topLeftCorner(n, n) = a.matrix_at(t);
    out.bottomRightCorner(m, m) = b.matrix_at(t);
    return out;
  };
  std::optional<AntiUnitary> tau;
  if (a.tau()) tau = direct_sum(*a.tau(), *b.tau());
  PathTolerances tol = a.tolerances();
  tol.path_tol = std::max(a.tolerances().path_tol, b.tolerances().path_tol);
  return OperatorPath(a.domain(), n + m, std::move(eval), std::move(grid), std::move(tau), tol);
}

double plateau_truncation(const PathEvaluator& evaluator, double t0, double plateau_tol,
                          double t_cap) {
  if (!(t0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "plateau_truncation needs t0 > 0");
  for (double t = t0; t <= t_cap; t *= 2.0) {
    const double right = max_abs(evaluator(t) - evaluator(2.0 * t));
    const double left = max_abs(evaluator(-t) - evaluator(-2.0 * t));
    if (std::max(left, right) < plateau_tol) return t;
  }
  return t_cap;
}

}  // namespace z2flow
