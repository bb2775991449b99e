#include <doctest.h>

#include "test_support.hpp"

using namespace z2flow;

namespace {

ComplexMatrix diag(std::initializer_list<double> d) {
  ComplexMatrix m = ComplexMatrix::Zero(d.size(), d.size());
  int i = 0;
  for (double x : d) m(i, i) = x, ++i;
  return m;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("make_anti_unitary accepts the standard structure and its direct sums") {
  ComplexMatrix u(2, 2);
  u << 0.0, 1.0, -1.0, 0.0;
  const AntiUnitary t = make_anti_unitary(u);
  ComplexVector z(2);
  z << Complex(1.0, 2.0), Complex(3.0, -1.0);
  const ComplexVector tz = t.apply(z);
  CHECK(std::abs(tz(0) - std::conj(z(1))) < 1e-15);
  CHECK(std::abs(tz(1) + std::conj(z(0))) < 1e-15);

  ComplexMatrix u4 = ComplexMatrix::Zero(4, 4);
  u4.topLeftCorner(2, 2) = u;
  u4.bottomRightCorner(2, 2) = u;
  CHECK_NOTHROW(make_anti_unitary(u4));
  CHECK(max_abs(direct_sum(t, t).unitary() - u4) == 0.0);
}

TEST_CASE("make_anti_unitary rejects invalid unitary parts") {
  CHECK(kind_of([] { make_anti_unitary(ComplexMatrix::Identity(2, 2)); }) == ErrorKind::NotAntiInvolution);
  CHECK(kind_of([] { make_anti_unitary(ComplexMatrix::Identity(3, 3)); }) == ErrorKind::OddDimension);
  CHECK(kind_of([] { make_anti_unitary(2.0 * ComplexMatrix::Identity(2, 2)); }) == ErrorKind::NotUnitary);
  CHECK(kind_of([] { make_anti_unitary(ComplexMatrix::Identity(2, 3)); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("conjugate_by follows the swap rule") {
  const AntiUnitary t = standard_anti_unitary();
  CHECK(max_abs(conjugate_by(t, diag({2.0, -5.0})) - diag({-5.0, 2.0})) < 1e-15);
  CHECK(max_abs(conjugate_by(t, ComplexMatrix::Identity(2, 2)) - ComplexMatrix::Identity(2, 2)) < 1e-15);
  const ComplexMatrix ii = Complex(0.0, 1.0) * ComplexMatrix::Identity(2, 2);
  CHECK(max_abs(conjugate_by(t, ii) + ii) < 1e-15);
}

TEST_CASE("conjugate_by is an involution on matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 * (1 + trial % 4);
    const AntiUnitary t = z2test::random_anti_unitary(n, rng);
    const ComplexMatrix m = z2test::random_complex(n, n, rng);
    CHECK(max_abs(conjugate_by(t, conjugate_by(t, m)) - m) < 2e-12);
  }
}

TEST_CASE("hermitian_eig") {
  const auto e = hermitian_eigenvalues(HermitianOp(diag({3.0, 1.0, 2.0})));
  CHECK(e(0) == doctest::Approx(1.0));
  CHECK(e(1) == doctest::Approx(2.0));
  CHECK(e(2) == doctest::Approx(3.0));

  ComplexMatrix sx(2, 2);
  sx << 0.0, 1.0, 1.0, 0.0;
  const auto ex = hermitian_eigenvalues(HermitianOp(sx));
  CHECK(ex(0) == doctest::Approx(-1.0));
  CHECK(ex(1) == doctest::Approx(1.0));

  std::mt19937_64 rng(5);
  const ComplexMatrix h = z2test::random_hermitian(8, rng);
  const auto d = hermitian_eig(HermitianOp(h));
  const ComplexMatrix residual = h * d.eigenvectors - d.eigenvectors * d.eigenvalues.asDiagonal();
  CHECK(max_abs(residual) < 1e-12);
}

TEST_CASE("HermitianOp rejects non-Hermitian and non-finite input") {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 2.0, 0.0;
  CHECK(kind_of([&] { HermitianOp h(m); }) == ErrorKind::NotHermitian);
  m << 0.0, std::nan(""), std::nan(""), 0.0;
  CHECK(kind_of([&] { HermitianOp h(m); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("kernel_rank with guard band") {
  CHECK(kernel_rank(HermitianOp(diag({0.0, 0.0, 1.0})), 1e-8) == 2);
  CHECK(kernel_rank(HermitianOp(diag({1e-12, 0.5})), 1e-8) == 1);
  CHECK(kind_of([] { kernel_rank(HermitianOp(diag({0.5e-8, 2e-8})), 1e-8, 10.0); }) == ErrorKind::AmbiguousKernel);
}

TEST_CASE("kramers_check") {
  const AntiUnitary t = standard_anti_unitary();
  CHECK(kramers_check(HermitianOp(diag({0.7, 0.7})), t, 1e-8).pass);
  CHECK(kind_of([&] { kramers_check(HermitianOp(diag({0.3, -0.3})), t, 1e-8); }) == ErrorKind::NotTauInvariant);

  std::mt19937_64 rng(2024);
  for (int n : {2, 4, 6, 10}) {
    const AntiUnitary tn = z2test::random_anti_unitary(n, rng);
    const auto rep = kramers_check(HermitianOp(z2test::tau_graded(tn, rng)), tn, 1e-8);
    CHECK(rep.pass);
    for (int mult : rep.multiplicities) CHECK(mult % 2 == 0);
  }
}

TEST_CASE("cluster_multiplicities") {
  RealVector v(5);
  v << 0.0, 1e-10, 1.0, 2.0, 2.0 + 5e-11;
  const auto m = cluster_multiplicities(v, 1e-9);
  REQUIRE(m.size() == 3);
  CHECK(m[0] == 2);
  CHECK(m[1] == 1);
  CHECK(m[2] == 2);
}
