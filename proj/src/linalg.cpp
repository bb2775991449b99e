#include "z2flow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace z2flow {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NotAntiInvolution: return "NotAntiInvolution";
    case ErrorKind::OddDimension: return "OddDimension";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::AmbiguousKernel: return "AmbiguousKernel";
    case ErrorKind::NotTauInvariant: return "NotTauInvariant";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::DegenerateCrossing: return "DegenerateCrossing";
    case ErrorKind::OddKernelAtSymmetricPoint: return "OddKernelAtSymmetricPoint";
    case ErrorKind::AliasingDetected: return "AliasingDetected";
    case ErrorKind::SingularEndpoint: return "SingularEndpoint";
    case ErrorKind::NoSpectralGap: return "NoSpectralGap";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NotSelfAdjoint: return "NotSelfAdjoint";
    case ErrorKind::NotTimeReversalSymmetric: return "NotTimeReversalSymmetric";
    case ErrorKind::OddInternalDimension: return "OddInternalDimension";
    case ErrorKind::GapClosed: return "GapClosed";
    case ErrorKind::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorKind::AmbiguousLocalization: return "AmbiguousLocalization";
    case ErrorKind::RankDrop: return "RankDrop";
    case ErrorKind::TrackingLost: return "TrackingLost";
  }
  return "Unknown";
}

bool is_numerical_refusal(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConvergenceFailure:
    case ErrorKind::AmbiguousKernel:
    case ErrorKind::GridTooCoarse:
    case ErrorKind::DegenerateCrossing:
    case ErrorKind::OddKernelAtSymmetricPoint:
    case ErrorKind::AliasingDetected:
    case ErrorKind::NoSpectralGap:
    case ErrorKind::GapClosed:
    case ErrorKind::TruncationTooSmall:
    case ErrorKind::AmbiguousLocalization:
    case ErrorKind::RankDrop:
    case ErrorKind::TrackingLost:
      return true;
    default:
      return false;
  }
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

HermitianOp::HermitianOp(ComplexMatrix m, double herm_tol) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(ErrorKind::DimensionMismatch, "Hermitian operator must be square and non-empty");
  if (!all_finite(m)) throw Error(ErrorKind::InvalidArgument, "matrix has non-finite entries");
  const double asym = max_abs(m - m.adjoint());
  if (asym > herm_tol) {
    std::ostringstream os;
    os << "||M - M^dagger||_max = " << asym << " exceeds " << herm_tol;
    throw Error(ErrorKind::NotHermitian, os.str());
  }
  matrix_ = (m + m.adjoint()) * 0.5;
}

AntiUnitary make_anti_unitary(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols() || u.rows() == 0)
    throw Error(ErrorKind::DimensionMismatch, "anti-unitary needs a square unitary part");
  if (!all_finite(u)) throw Error(ErrorKind::InvalidArgument, "unitary part has non-finite entries");
  const auto n = u.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  if (max_abs(u.adjoint() * u - id) > tol)
    throw Error(ErrorKind::NotUnitary, "u^dagger u != I");
  if (n % 2 != 0) throw Error(ErrorKind::OddDimension, "anti-involutions need even dimension");
  // T^2 v = u conj(u conj(v)) = u conj(u) v, so T^2 = -1 iff u conj(u) = -I.
  if (max_abs(u * u.conjugate() + id) > tol)
    throw Error(ErrorKind::NotAntiInvolution, "u conj(u) != -I");
  return AntiUnitary(u);
}

AntiUnitary standard_anti_unitary() {
  ComplexMatrix u(2, 2);
  u << 0.0, 1.0, -1.0, 0.0;
  return make_anti_unitary(u);
}

AntiUnitary direct_sum(const AntiUnitary& a, const AntiUnitary& b) {
  const auto n = a.dim(), m = b.dim();
  ComplexMatrix u = ComplexMatrix::Zero(n + m, n + m);
  u.topLeftCorner(n, n) = a.unitary();
  u.bottomRightCorner(m, m) = b.unitary();
  return AntiUnitary(std::move(u));  // blocks are already validated
}

AntiUnitary block_lift(const AntiUnitary& t, Eigen::Index copies) {
  if (copies <= 0) throw Error(ErrorKind::InvalidArgument, "block_lift needs copies > 0");
  const auto k = t.dim();
  ComplexMatrix u = ComplexMatrix::Zero(k * copies, k * copies);
  for (Eigen::Index c = 0; c < copies; ++c) u.block(c * k, c * k, k, k) = t.unitary();
  return AntiUnitary(std::move(u));
}

ComplexMatrix conjugate_by(const AntiUnitary& t, const ComplexMatrix& m) {
  if (m.rows() != t.dim() || m.cols() != t.dim())
    throw Error(ErrorKind::DimensionMismatch, "conjugate_by: matrix and anti-unitary dims differ");
  return t.unitary() * m.conjugate() * t.unitary().adjoint();
}

EigDecomposition hermitian_eig(const HermitianOp& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m.matrix());
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::ConvergenceFailure, "Hermitian eigensolver did not converge");
  EigDecomposition out{solver.eigenvalues(), solver.eigenvectors()};

  const double scale = std::max(1.0, m.matrix().operatorNorm());
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) {
    const double residual =
        (m.matrix() * out.eigenvectors.col(i) - out.eigenvalues(i) * out.eigenvectors.col(i)).norm();
    if (residual > 1e-9 * scale)
      throw Error(ErrorKind::ConvergenceFailure, "eigenpair residual above 1e-9 * ||M||");
  }
  return out;
}

RealVector hermitian_eigenvalues(const HermitianOp& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::ConvergenceFailure, "Hermitian eigensolver did not converge");
  return solver.eigenvalues();
}

int kernel_rank(const RealVector& eigenvalues, double kernel_tol, double gap_factor) {
  if (!(kernel_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "kernel_tol must be positive");
  if (!(gap_factor >= 1.0)) throw Error(ErrorKind::InvalidArgument, "gap_factor must be >= 1");
  int rank = 0;
  for (double lambda : eigenvalues) {
    const double a = std::abs(lambda);
    if (a < kernel_tol) {
      ++rank;
    } else if (a < gap_factor * kernel_tol) {
      std::ostringstream os;
      os << "eigenvalue " << lambda << " inside guard band [" << kernel_tol << ", "
         << gap_factor * kernel_tol << ")";
      throw Error(ErrorKind::AmbiguousKernel, os.str());
    }
  }
  return rank;
}

int kernel_rank(const HermitianOp& m, double kernel_tol, double gap_factor) {
  return kernel_rank(hermitian_eigenvalues(m), kernel_tol, gap_factor);
}

std::vector<int> cluster_multiplicities(const RealVector& ascending, double resolution) {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < ascending.size(); ++i) {
    if (i == 0 || ascending(i) - ascending(i - 1) > resolution)
      out.push_back(1);
    else
      ++out.back();
  }
  return out;
}

KramersReport kramers_check(const HermitianOp& m, const AntiUnitary& t, double tol) {
  KramersReport report;
  const double norm = m.matrix().operatorNorm();
  report.resolution = tol * std::max(1.0, norm);
  report.invariance_residual = max_abs(conjugate_by(t, m.matrix()) - m.matrix());
  if (report.invariance_residual > report.resolution) {
    std::ostringstream os;
    os << "||T M T^-1 - M||_max = " << report.invariance_residual;
    throw Error(ErrorKind::NotTauInvariant, os.str());
  }
  const RealVector values = hermitian_eigenvalues(m);
  report.multiplicities = cluster_multiplicities(values, report.resolution);
  Eigen::Index pos = 0;
  report.pass = true;
  for (int mult : report.multiplicities) {
    report.cluster_values.push_back(values.segment(pos, mult).mean());
    pos += mult;
    if (mult % 2 != 0) report.pass = false;
  }
  return report;
}

}  // namespace z2flow
