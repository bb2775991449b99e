#include <doctest.h>

#include <numbers>

#include "test_support.hpp"
#include "z2flow/builtin_paths.hpp"

using namespace z2flow;

namespace {

constexpr double kPi = std::numbers::pi;

OperatorPath scalar_arctan_path() {
  const auto d = Domain::line(-10.0, 10.0);
  return OperatorPath(
      d, 1, [](double t) { return ComplexMatrix::Constant(1, 1, std::atan(t)); }, uniform_grid(d, 401));
}

}  // namespace

TEST_CASE("find_crossings on the arctan pair: one rank-2 record at t = 0") {
  const auto recs = find_crossings(arctan_pair_path());
  REQUIRE(recs.size() == 1);
  CHECK(std::abs(recs[0].t) < 1e-8);
  CHECK(recs[0].kernel_rank == 2);
}

TEST_CASE("find_crossings on a constant path is empty") {
  CHECK(find_crossings(constant_line_path()).empty());
}

TEST_CASE("find_crossings on the shifted pair: rank-1 records at -1 and +1") {
  // Zeros of arctan(t - 1) and -arctan(t + 1).
  const auto recs = find_crossings(shifted_arctan_pair_path());
  REQUIRE(recs.size() == 2);
  CHECK(std::abs(recs[0].t + 1.0) < 1e-8);
  CHECK(std::abs(recs[1].t - 1.0) < 1e-8);
  CHECK(recs[0].kernel_rank == 1);
  CHECK(recs[1].kernel_rank == 1);
}

TEST_CASE("crossing operators and signatures") {
  const auto pair = arctan_pair_path();
  const auto rec0 = find_crossings(pair).at(0);
  const auto gamma0 = hermitian_eigenvalues(crossing_operator(pair, rec0, 1e-4));
  CHECK(gamma0(0) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(gamma0(1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(crossing_signature(pair, rec0) == 0);

  const auto b = shifted_arctan_pair_path();
  const auto recs = find_crossings(b);
  const auto g1 = crossing_operator(b, recs.at(1), 1e-4);
  REQUIRE(g1.dim() == 1);
  CHECK(g1.matrix()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(crossing_signature(b, recs.at(1)) == 1);
  CHECK(crossing_signature(b.negated(), find_crossings(b.negated()).at(1)) == -1);
}

TEST_CASE("sf_z") {
  CHECK(sf_z(scalar_arctan_path()) == 1);
  CHECK(sf_z(arctan_pair_path()) == 0);
  CHECK(sf_z(shifted_arctan_pair_path()) == 0);
  CHECK(sf_z(constant_line_path()) == 0);
}

TEST_CASE("sf_tau_line") {
  CHECK(sf_tau_line(arctan_pair_path()) == Z2(1));
  CHECK(sf_tau_line(constant_line_path()) == Z2(0));
  CHECK(sf_tau_line(shifted_arctan_pair_path()) == Z2(1));
  CHECK_THROWS_AS(sf_tau_line(scalar_arctan_path()), Error);
}

TEST_CASE("sf_tau_circle") {
  const auto cs = cos_sin_circle_path(1.0);
  const auto res = half_flow_circle(cs);
  CHECK(res.value == Z2(0));
  // Zeros of cos t +- sin t in (-pi, 0).
  std::vector<double> negative;
  for (const auto& c : res.crossings)
    if (c.t < -1e-6 && c.t > -kPi + 1e-6) negative.push_back(c.t);
  REQUIRE(negative.size() == 2);
  CHECK(std::abs(negative[0] + 3.0 * kPi / 4.0) < 1e-8);
  CHECK(std::abs(negative[1] + kPi / 4.0) < 1e-8);

  CHECK(sf_tau_circle(constant_circle_path()) == Z2(0));
  CHECK(sf_tau_circle(sin_circle_path(0.5), EpsPolicy::Direct) == Z2(0));
  CHECK(sf_tau_circle(sin_circle_path(0.5)) == Z2(0));
}

TEST_CASE("odd kernel at a symmetric point is refused") {
  CHECK_THROWS_AS(half_rank(1, 0.0), Error);
  CHECK(half_rank(2, 0.0) == 1);
}

TEST_CASE("gamma symmetry") {
  const auto b = gamma_symmetry_report(shifted_arctan_pair_path());
  CHECK(b.pass);
  REQUIRE(b.pairs.size() == 1);
  CHECK(b.pairs[0].signature_here == -b.pairs[0].signature_mirror);

  const auto a = gamma_symmetry_report(arctan_pair_path());
  CHECK(a.pass);
  REQUIRE(a.pairs.size() == 1);
  CHECK(a.pairs[0].self_mirrored);
  CHECK(a.pairs[0].signature_here == 0);

  const auto c = gamma_symmetry_report(constant_line_path());
  CHECK(c.pass);
  CHECK(c.pairs.empty());
}

TEST_CASE("random tau-invariant line paths: zero Z-flow and Gamma symmetry") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const AntiUnitary t = z2test::random_anti_unitary(2 + 2 * (trial % 3), rng);
    const auto path = z2test::random_tau_line_path(t, rng);
    CHECK(sf_z(path) == 0);
    CHECK(gamma_symmetry_report(path).pass);
  }
}

TEST_CASE("path validation") {
  const auto d = Domain::line(-1.0, 1.0);
  // Not tau-invariant: T A(-t) T^-1 = diag(1 - 2t, 1 - t).
  auto eval = [](double t) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 1.0 + t;
    m(1, 1) = 1.0 + 2.0 * t;
    return m;
  };
  CHECK_THROWS_AS(OperatorPath(d, 2, eval, uniform_grid(d, 21), standard_anti_unitary()), Error);
  // Singular endpoint.
  auto sing = [](double t) { return ComplexMatrix::Constant(1, 1, t - 1.0); };
  CHECK_THROWS_AS(OperatorPath(d, 1, sing, uniform_grid(d, 21)), Error);
}

TEST_CASE("direct sums add mod 2") {
  const auto sum = direct_sum(arctan_pair_path(), shifted_arctan_pair_path());
  CHECK(sf_tau_line(sum) == Z2(0));
  CHECK(sf_tau_line(direct_sum(arctan_pair_path(), constant_line_path())) == Z2(1));
}

TEST_CASE("opposite-direction crossings inside one grid cell are both found") {
  // Grid spacing 0.05: crossings at -0.13 and -0.11 share the cell (-0.15, -0.10)
  // and cancel in the negative-eigenvalue count.
  const auto d = Domain::line(-10.0, 10.0);
  auto pair = [](double c, double sign) {
    return [c, sign](double t) {
      ComplexMatrix m = ComplexMatrix::Zero(2, 2);
      m(0, 0) = sign * std::atan(t - c);
      m(1, 1) = -sign * std::atan(t + c);
      return m;
    };
  };
  const OperatorPath a(d, 2, pair(0.13, 1.0), uniform_grid(d, 401), standard_anti_unitary());
  const OperatorPath b(d, 2, pair(0.11, -1.0), uniform_grid(d, 401), standard_anti_unitary());
  const auto sum = direct_sum(a, b);
  const auto recs = find_crossings(sum);
  REQUIRE(recs.size() == 4);
  CHECK(std::abs(recs[0].t + 0.13) < 1e-8);
  CHECK(std::abs(recs[1].t + 0.11) < 1e-8);
  CHECK(sf_tau_line(a) == Z2(1));
  CHECK(sf_tau_line(b) == Z2(1));
  CHECK(sf_tau_line(sum) == Z2(0));
  CHECK(sf_z(sum) == 0);
}
