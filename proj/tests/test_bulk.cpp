#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"
#include "z2flow/bulk.hpp"

using namespace z2flow;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("occupied frames") {
  const auto f = occupied_frame(atomic_model(), 0.4, 1.1);
  REQUIRE(f.frame.cols() == 2);
  // Spans the first two coordinate vectors.
  CHECK(f.frame.bottomRows(2).norm() < 1e-14);
  CHECK((f.frame.adjoint() * f.frame - ComplexMatrix::Identity(2, 2)).norm() < 1e-14);

  CHECK(occupied_frame(bhz_model(1.0), 0.0, 0.0).frame.cols() == 2);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int i = 0; i < 25; ++i) CHECK(occupied_frame(bhz_model(1.0), u(rng), u(rng)).frame.cols() == 2);
  CHECK_THROWS_AS(occupied_frame(bhz_model(2.0), kPi, kPi), Error);
}

TEST_CASE("Wilson loops") {
  for (double p : wilson_loop(atomic_model(), 0.5, 50).phases) CHECK(std::abs(p) < 1e-12);

  const auto w0 = wilson_loop(bhz_model(1.0), 0.0, 100);
  REQUIRE(w0.phases.size() == 2);
  CHECK(std::abs(w0.phases[0] - w0.phases[1]) < 1e-8);

  WilsonOptions regauge;
  regauge.regauge_seed = 1234;
  for (double t : {0.3, 1.7}) {
    const auto a = wilson_loop(bhz_model(-1.0), t, 100);
    const auto b = wilson_loop(bhz_model(-1.0), t, 100, regauge);
    REQUIRE(a.phases.size() == b.phases.size());
    for (std::size_t i = 0; i < a.phases.size(); ++i) CHECK(std::abs(a.phases[i] - b.phases[i]) < 1e-6);
  }
}

TEST_CASE("bulk index against the sign-product oracle") {
  for (double m : {-3.0, -1.0, 1.0, 3.0}) {
    CAPTURE(m);
    CHECK(bulk_index(bhz_model(m)).value == Z2(z2test::trim_sign_product_z2(m)));
  }
  CHECK(bulk_index(atomic_model()).value == Z2(0));
}

TEST_CASE("trim_oracle_bhz") {
  CHECK(trim_oracle_bhz(1.0) == Z2(1));
  CHECK(trim_oracle_bhz(3.0) == Z2(0));
  CHECK(trim_oracle_bhz(-1.0) == Z2(1));
  CHECK(trim_oracle_bhz(-3.0) == Z2(0));
  CHECK_THROWS_AS(trim_oracle_bhz(2.0), Error);
  CHECK_THROWS_AS(trim_oracle_bhz(0.0), Error);
}

TEST_CASE("bec_verify") {
  const auto r1 = bec_verify(bhz_model(1.0));
  CHECK(r1.equal);
  CHECK(r1.bulk.value == Z2(1));
  const auto r3 = bec_verify(bhz_model(3.0));
  CHECK(r3.equal);
  CHECK(r3.edge.value == Z2(0));
  CHECK(bec_verify(atomic_model()).equal);
}

TEST_CASE("Wannier flow CSV") {
  BulkOptions opts;
  opts.t_points = 12;
  opts.s_points = 40;
  const auto r = bulk_index(bhz_model(1.0), opts);
  const std::string csv = wannier_flow_csv(r.flow);
  CHECK(csv.rfind("t,phase_index,phase\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 12 * 2);
}
