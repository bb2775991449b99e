#pragma once

// Finite-dimensional operator substrate: Hermitian operators, anti-unitary
// maps v -> u * conj(v), eigen decompositions and Kramers checks.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "z2flow/error.hpp"

namespace z2flow {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultHermTol = 1e-10;
inline constexpr double kDefaultGuardFactor = 10.0;

double max_abs(const ComplexMatrix& m);
bool all_finite(const ComplexMatrix& m);

/// Hermitian matrix. Construction checks ||M - M^dagger||_max <= herm_tol
/// and stores the exactly symmetrized matrix.
class HermitianOp {
 public:
  HermitianOp() = default;
  explicit HermitianOp(ComplexMatrix m, double herm_tol = kDefaultHermTol);

  Eigen::Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  ComplexMatrix matrix_;
};

/// Anti-unitary map T v = u * conj(v) with T^2 = -1. Only the unitary part
/// is stored; conjugation is always entrywise.
class AntiUnitary {
 public:
  AntiUnitary() = default;

  Eigen::Index dim() const { return u_.rows(); }
  const ComplexMatrix& unitary() const { return u_; }

  ComplexVector apply(const ComplexVector& v) const { return u_ * v.conjugate(); }
  ComplexMatrix apply(const ComplexMatrix& columns) const { return u_ * columns.conjugate(); }

 private:
  friend AntiUnitary make_anti_unitary(const ComplexMatrix& u, double tol);
  friend AntiUnitary direct_sum(const AntiUnitary& a, const AntiUnitary& b);
  friend AntiUnitary block_lift(const AntiUnitary& t, Eigen::Index copies);
  explicit AntiUnitary(ComplexMatrix u) : u_(std::move(u)) {}

  ComplexMatrix u_;
};

AntiUnitary make_anti_unitary(const ComplexMatrix& u, double tol = kDefaultHermTol);

/// (z1, z2) -> (conj z2, -conj z1), i.e. u = [[0, 1], [-1, 0]].
AntiUnitary standard_anti_unitary();

/// Block-diagonal direct sum.
AntiUnitary direct_sum(const AntiUnitary& a, const AntiUnitary& b);

/// `copies` copies of `t` along the diagonal (sitewise lift).
AntiUnitary block_lift(const AntiUnitary& t, Eigen::Index copies);

/// Matrix of T M T^{-1}, i.e. u * conj(M) * u^dagger.
ComplexMatrix conjugate_by(const AntiUnitary& t, const ComplexMatrix& m);

struct EigDecomposition {
  RealVector eigenvalues;  // ascending
  ComplexMatrix eigenvectors;  // orthonormal columns
};

EigDecomposition hermitian_eig(const HermitianOp& m);
RealVector hermitian_eigenvalues(const HermitianOp& m);

/// Number of eigenvalues with |lambda| < kernel_tol. Throws AmbiguousKernel
/// when some |lambda| falls in the guard band [kernel_tol, gap_factor * kernel_tol).
int kernel_rank(const RealVector& eigenvalues, double kernel_tol,
                double gap_factor = kDefaultGuardFactor);
int kernel_rank(const HermitianOp& m, double kernel_tol,
                double gap_factor = kDefaultGuardFactor);

/// Groups ascending values into clusters whose consecutive gaps are <= resolution.
std::vector<int> cluster_multiplicities(const RealVector& ascending, double resolution);

struct KramersReport {
  bool pass = false;
  double invariance_residual = 0.0;  // ||T M T^{-1} - M||_max
  double resolution = 0.0;
  std::vector<double> cluster_values;
  std::vector<int> multiplicities;
};

/// Every eigenvalue cluster of a T-invariant Hermitian M has even
/// multiplicity. Clusters are formed at resolution tol * max(1, ||M||).
KramersReport kramers_check(const HermitianOp& m, const AntiUnitary& t, double tol);

}  // namespace z2flow
