#include <doctest.h>

#include "z2flow/report.hpp"

using namespace z2flow;

namespace {

RunConfig config(const std::string& command) {
  RunConfig c;
  c.command = command;
  c.format = ReportFormat::Machine;
  return c;
}

}  // namespace

TEST_CASE("FNV-1a digest") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("machine reports round-trip") {
  auto c = config("sf-tau");
  c.path = "shifted-arctan-pair";
  const Report r = run_command(c);
  CHECK(r.exit_code == 0);
  CHECK(!r.timing_ms);
  const Report back = report_from_json(nlohmann::json::parse(render_machine(r)));
  CHECK(back == r);
  CHECK(render_machine(back) == render_machine(r));
}

TEST_CASE("identical configs give identical machine reports") {
  auto c = config("bec");
  c.fixture = "bhz";
  c.mass = 3.0;
  CHECK(render_machine(run_command(c)) == render_machine(run_command(c)));
}

TEST_CASE("command results") {
  auto c = config("sf-tau");
  for (auto [name, value] : {std::pair{"arctan-pair", 1}, {"constant", 0}, {"shifted-arctan-pair", 1}}) {
    c.path = name;
    CHECK(run_command(c).result.at("sf_tau") == value);
  }

  auto b = config("bec");
  b.fixture = "bhz";
  b.mass = 1.0;
  const Report r = run_command(b);
  CHECK(r.result.at("equal") == true);
  CHECK(r.result.at("bulk_index") == 1);
  CHECK(r.result.at("edge_index") == 1);
}

TEST_CASE("exit codes") {
  auto c = config("validate");
  c.model_path = "/nonexistent/model.json";
  CHECK(run_command(c).exit_code == 1);

  auto bad = config("bec");
  bad.fixture = "bhz";
  bad.kernel_tol = -1.0;
  CHECK(run_command(bad).exit_code == 2);

  auto gapless = config("bec");
  gapless.fixture = "bhz";
  gapless.mass = 2.0;
  const Report r = run_command(gapless);
  CHECK(r.exit_code == 3);
  CHECK(r.result.at("error") == "GapClosed");

  CHECK(exit_code_for(ErrorKind::AmbiguousKernel) == 3);
  CHECK(exit_code_for(ErrorKind::OddKernelAtSymmetricPoint) == 3);
  CHECK(exit_code_for(ErrorKind::NotSelfAdjoint) == 2);
}

TEST_CASE("path documents") {
  const auto doc = nlohmann::json::parse(R"({
    "domain": "line", "t_min": -10, "t_max": 10, "dim": 2,
    "tau": {"re": [[0, 1], [-1, 0]]},
    "terms": [
      {"f": "atan", "matrix": {"re": [[1, 0], [0, 0]]}},
      {"f": "atan", "matrix": {"re": [[0, 0], [0, -1]]}}
    ]
  })");
  CHECK(sf_tau_line(load_path(doc)) == Z2(1));

  auto bad = doc;
  bad["terms"][0]["f"] = "exp";
  CHECK_THROWS_AS(load_path(bad), Error);
  auto circ = doc;
  circ["domain"] = "circle";
  CHECK_THROWS_AS(load_path(circ), Error);
}
