#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"

using namespace z2flow;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind load_error(const json& doc) {
  try {
    load_model(doc);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidArgument;
}

json standard_trs_json() {
  return {{"re", {{0, 1, 0, 0}, {-1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}}}};
}

}  // namespace

TEST_CASE("BHZ fixture is a valid model and round-trips through JSON") {
  const auto m = bhz_model(1.0);
  CHECK(m.k() == 4);
  CHECK(m.max_p() == 1);
  CHECK(m.max_q() == 1);
  const auto back = load_model(model_to_json(m));
  for (double t : {0.3, -1.2})
    for (double s : {2.0, -0.4})
      CHECK(max_abs(bulk_hamiltonian(back, t, s).matrix() - bulk_hamiltonian(m, t, s).matrix()) < 1e-15);
}

TEST_CASE("load_model rejects invariant violations") {
  json doc = {{"k", 4},
              {"fermi_level", 0.0},
              {"trs", standard_trs_json()},
              {"hoppings",
               {{{"p", 1}, {"q", 0}, {"matrix", {{"re", {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}}}}},
                {{"p", -1}, {"q", 0}, {"matrix", {{"re", {{2, 0, 0, 0}, {0, 2, 0, 0}, {0, 0, 2, 0}, {0, 0, 0, 2}}}}}}}}};
  CHECK(load_error(doc) == ErrorKind::NotSelfAdjoint);
  try {
    load_model(doc);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("(1,0)") != std::string::npos);
  }

  json odd = {{"k", 3}, {"fermi_level", 0.0}, {"trs", {{"re", {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}}}, {"hoppings", json::array()}};
  CHECK(load_error(odd) == ErrorKind::OddInternalDimension);

  // diag(1, -1, 0, 0) is not invariant under the block swap theta.
  json trs_break = {{"k", 4},
                    {"fermi_level", 0.0},
                    {"trs", standard_trs_json()},
                    {"hoppings", {{{"p", 0}, {"q", 0}, {"matrix", {{"re", {{1, 0, 0, 0}, {0, -1, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}}}}}}}};
  CHECK(load_error(trs_break) == ErrorKind::NotTimeReversalSymmetric);

  CHECK(load_error(json{{"k", 4}}) == ErrorKind::ParseError);
  CHECK_THROWS_AS(load_model_text("{not json"), Error);
  CHECK_THROWS_AS(load_model_file("/nonexistent/model.json"), std::ios_base::failure);
}

TEST_CASE("bulk Hamiltonian") {
  const auto atomic = atomic_model();
  CHECK(max_abs(bulk_hamiltonian(atomic, 0.7, -2.1).matrix() - atomic.hoppings().at({0, 0})) < 1e-15);

  // d = (sin t, sin s, M + cos t + cos s) at the origin: diagonal M + 2.
  const auto h = bulk_hamiltonian(bhz_model(1.0), 0.0, 0.0).matrix();
  CHECK(std::abs(h(0, 0) - 3.0) < 1e-14);
  CHECK(std::abs(h(1, 1) + 3.0) < 1e-14);
  CHECK(std::abs(h(0, 1)) < 1e-14);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  const auto m = bhz_model(-1.0);
  for (int i = 0; i < 10; ++i) {
    const double t = u(rng), s = u(rng);
    const ComplexMatrix a = bulk_hamiltonian(m, t, s).matrix();
    const ComplexMatrix b = bulk_hamiltonian(m, -t, -s).matrix();
    CHECK(max_abs(conjugate_by(m.trs(), b) - a) < 1e-12);
    ComplexMatrix sum = ComplexMatrix::Zero(4, 4);
    for (int q = -1; q <= 1; ++q) sum += edge_symbol(m, q, t) * std::exp(Complex(0.0, q * s));
    CHECK(max_abs(sum - a) < 1e-12);
  }
}

TEST_CASE("bulk gap") {
  CHECK(bulk_gap(bhz_model(1.0), 50, 50).min_gap > 0.1);
  CHECK_THROWS_AS(bulk_gap(bhz_model(2.0), 50, 50), Error);
  HoppingMap id{{{0, 0}, ComplexMatrix::Identity(2, 2)}};
  const auto one = TightBindingModel::create(2, 0.0, standard_anti_unitary().unitary(), id);
  CHECK(measure_bulk_gap(one, 10, 10).min_gap == doctest::Approx(1.0));
}

TEST_CASE("edge truncation structure") {
  const auto atomic = atomic_model();
  const auto tr = edge_truncation(atomic, 5, 40);
  const ComplexMatrix h = tr.path.matrix_at(0.3);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      const ComplexMatrix blk = h.block(4 * a, 4 * b, 4, 4);
      CHECK(max_abs(blk - (a == b ? atomic.hoppings().at({0, 0}) : ComplexMatrix::Zero(4, 4))) < 1e-15);
    }

  // Nearest-neighbour chain: off-diagonal blocks B and B^dagger.
  ComplexMatrix bmat = ComplexMatrix::Zero(2, 2);
  bmat(0, 0) = 0.5;
  bmat(1, 1) = 0.5;
  bmat(0, 1) = Complex(0.0, 0.1);
  bmat(1, 0) = Complex(0.0, 0.1);
  const auto chain = TightBindingModel::create(2, 0.0, standard_anti_unitary().unitary(),
                                               {{{0, 0}, ComplexMatrix::Zero(2, 2)}, {{0, 1}, bmat}});
  const ComplexMatrix hc = edge_truncation(chain, 6, 20).path.matrix_at(0.0);
  CHECK(max_abs(hc.block(2, 0, 2, 2) - bmat) < 1e-15);
  CHECK(max_abs(hc.block(0, 2, 2, 2) - bmat.adjoint()) < 1e-15);
  CHECK(max_abs(hc.block(4, 0, 2, 2)) < 1e-15);

  CHECK(edge_truncation(bhz_model(1.0), 30, 400).path.tau_residual() < 1e-10);
  CHECK_THROWS_AS(edge_truncation(bhz_model(1.0), 4, 40), Error);
}

TEST_CASE("edge index on fixtures") {
  CHECK(edge_index(bhz_model(1.0)).value == Z2(1));
  CHECK(edge_index(bhz_model(3.0)).value == Z2(0));
  CHECK(edge_index(atomic_model()).value == Z2(0));
}

TEST_CASE("edge spectrum CSV") {
  const auto rows = edge_spectrum(bhz_model(1.0), 6, 5);
  CHECK(rows.size() == 5u * 24u);
  const std::string csv = edge_spectrum_csv(rows);
  CHECK(csv.rfind("t,branch,eigenvalue,left_weight\n", 0) == 0);
}
