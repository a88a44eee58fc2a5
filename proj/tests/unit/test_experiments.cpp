#include <doctest.h>

#include <cmath>
#include <sstream>

#include "holelab/config.hpp"
#include "holelab/errors.hpp"
#include "holelab/experiments.hpp"

using namespace holelab;

namespace {

Config parse(const std::string& text) {
  std::istringstream in(text);
  return Config::parse(in);
}

ExperimentPlan plan_of(const std::string& text) { return plan_from_config(parse(text)); }

std::string csv_of(const ExperimentPlan& plan) {
  std::ostringstream out;
  write_csv(run_plan(plan), plan.timing, out);
  return out.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const Config c = parse("# comment\nmap = tent-e2\n\nsigma = 0.02  # trailing\nsigma = 0.03\nbranch = 0,1,2,0\n");
  CHECK(c.get("map") == "tent-e2");
  CHECK(c.get("sigma") == "0.03");
  CHECK(c.get_all("sigma").size() == 2);
  CHECK_FALSE(c.has("delta"));
  CHECK_THROWS_WITH_AS(parse("map tent"), doctest::Contains("PlanInvalid"), Error);
  CHECK_THROWS_AS(parse(" = 3"), Error);
  CHECK_THROWS_AS(Config::load("/nonexistent/plan.cfg"), Error);

  CHECK(parse_number("x", " 1e-3 ") == 1e-3);
  CHECK_THROWS_AS(parse_number("x", "1e-3x"), Error);
  CHECK(parse_integer("n", "4096") == 4096);
  CHECK_THROWS_AS(parse_integer("n", "4.5"), Error);
  CHECK(parse_bool("t", "yes"));
  CHECK_FALSE(parse_bool("t", "off"));
  CHECK(split_list(" a, b ,,c ") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("geometric ranges") {
  const auto r = parse_geometric_range("delta_range", "0.02:0.00125:5");
  REQUIRE(r.size() == 5);
  CHECK(r[0] == 0.02);
  CHECK(r[1] == doctest::Approx(0.01));
  CHECK(r[2] == doctest::Approx(0.005));
  CHECK(r[4] == 0.00125);
  CHECK(parse_geometric_range("s", "1e-4:1e-1:12").size() == 12);
  CHECK_THROWS_AS(parse_geometric_range("s", "0:1:3"), Error);
  CHECK_THROWS_AS(parse_geometric_range("s", "1:2"), Error);
}

TEST_CASE("plan construction") {
  auto plan = plan_of("map = doubling-e1\nsigmas = 0.02, 0.04\ndeltas = 0.01, 0.005\ngrids = 1024, auto\nseeds = 1,2\n");
  REQUIRE(plan.points.size() == 4);
  CHECK(plan.points[0] == std::pair{0.02, 0.01});
  CHECK(plan.points[1] == std::pair{0.02, 0.005});
  CHECK(plan.points[2] == std::pair{0.04, 0.01});
  const auto pts = plan.expand();
  CHECK(pts.size() == 16);
  CHECK(pts[0].n == 1024);
  CHECK(pts[2].n == auto_grid(Phase::circle(), 0.02, 0.01));
  CHECK(pts[1].seed == 2);

  plan = plan_of("points = 0.02:0.01, 0.03:0\n");
  REQUIRE(plan.points.size() == 2);
  CHECK(plan.points[1] == std::pair{0.03, 0.0});

  plan = plan_of("sigma = 0.05\n");
  REQUIRE(plan.points.size() == 1);
  CHECK(plan.points[0].second == 0.0);

  plan = plan_of("map = doubling\nsink = power\nsink_exponent = 3\nx0 = 0.25\nsigma = 0.01\ndelta = 0.01\n");
  const MapSpec spec = plan.map_spec(0.01, 0.01);
  CHECK(spec.sink.kind == SinkKind::Power);
  CHECK(spec.sink.exponent == 3.0);
  CHECK(spec.x0 == 0.25);

  plan = plan_of("observables = diagnostics\nsigma = 0.1\n");
  CHECK(plan.wants("spectral"));
  CHECK(plan.wants("diagnostics"));
  CHECK_FALSE(plan.wants("u"));

  CHECK_THROWS_WITH_AS(plan_of("sigma = 0.1\ncolour = red\n"), doctest::Contains("PlanInvalid"), Error);
  CHECK_THROWS_AS(plan_of("sigma = 0.1\nobservables = entropy\n"), Error);
  CHECK_THROWS_AS(plan_of("sigma = 0.1\nsink = round\n"), Error);
  CHECK_THROWS_AS(plan_of("points = 0.1:0.01\nsigma = 0.1\n"), Error);
}

TEST_CASE("auto grid") {
  CHECK(auto_grid(Phase::circle(), 0.02, 0.01) == 512);
  CHECK(auto_grid(Phase::circle(), 0.02, 0.0) == 256);
  CHECK(auto_grid(Phase::circle(), 1.0, 0.0) == 16);
  CHECK(auto_grid(Phase::circle(), 1e-4, 0.01) == 65536);
  CHECK_THROWS_AS(auto_grid(Phase::circle(), 0.0, 0.01), Error);
}

TEST_CASE("plan validation") {
  CHECK_NOTHROW(validate_plan(plan_of("sigma = 0.02\ndelta = 0.01\n")));
  CHECK_THROWS_WITH_AS(validate_plan(plan_of("sigma = 0\n")), doctest::Contains("sigma must be positive"), Error);
  CHECK_THROWS_WITH_AS(validate_plan(plan_of("sigma = 0.02\ndelta = 0.01\ngrid = 64\n")),
                       doctest::Contains("h <= min"), Error);
  CHECK_THROWS_AS(validate_plan(plan_of("sigma = 0.02\ngrid = 8\n")), Error);
  CHECK_THROWS_AS(validate_plan(plan_of("map = circle-map\nsigma = 0.02\n")), Error);
  CHECK_THROWS_AS(validate_plan(plan_of("map = doubling\nsink = flat\nx0 = 0.3\nsigma = 0.02\ndelta = 0.01\n")), Error);
  CHECK_THROWS_AS(validate_plan(plan_of("sigma = 0.02\nworkers = 0\n")), Error);
  // Every problem is reported at once.
  try {
    validate_plan(plan_of("sigmas = 0, -1\n"));
    FAIL("expected PlanInvalid");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PlanInvalid);
    const std::string what = e.what();
    CHECK(what.find("sigma=0") != std::string::npos);
    CHECK(what.find("sigma=-1") != std::string::npos);
  }
}

TEST_CASE("single trivial point") {
  const auto plan = plan_of("map = doubling-e1\nsigma = 0.05\ndelta = 0\n");
  const auto rows = run_plan(plan);
  REQUIRE(rows.size() == 1);
  const ResultRow& r = rows[0];
  CHECK(r.error.empty());
  CHECK(r.lambda == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.rho_q_l1 < 1e-10);
  CHECK(r.rho_q_bv < 1e-8);
  CHECK(std::abs(r.xi - std::log(2.0)) < 1e-6);
  CHECK(r.k == 1);
  CHECK(r.n == 128);
}

TEST_CASE("fits") {
  std::vector<double> x = {1, 2, 3, 4, 5};
  auto f = fit_loglog(x, x);
  CHECK(f.slope == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  std::vector<double> y;
  for (double v : x) y.push_back(3 * v * v);
  f = fit_loglog(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)));
  CHECK_THROWS_WITH_AS(fit_loglog({2, 2, 2, 2}, {1, 2, 3, 4}), doctest::Contains("DegenerateFit"), Error);
  CHECK_THROWS_AS(fit_loglog({1, 2, 3, 4}, {1, -2, 3, 4}), Error);

  std::vector<ResultRow> rows(5);
  for (int i = 0; i < 5; ++i) {
    rows[i].delta = 0.02 / (1 << i);
    rows[i].rho_q_bv = 7 * rows[i].delta;
  }
  f = fit_scaling(rows, "delta", "rho_q_bv");
  CHECK(f.slope == doctest::Approx(1.0));
  rows.resize(3);
  CHECK_THROWS_AS(fit_scaling(rows, "delta", "rho_q_bv"), Error);
}

TEST_CASE("fixed-point regime sweep fits a near-linear law") {
  const auto plan = plan_of("map = doubling-e1\nsigma = 0.02\ndelta_range = 0.02:0.0025:4\ngrid = 4096\n");
  const auto rows = run_plan(plan);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.error.empty());
    CHECK(r.flags.find("FixedPointRegime") != std::string::npos);
  }
  const auto f = fit_scaling(rows, "delta", "rho_q_bv");
  CHECK(f.slope >= 0.7);
  CHECK(f.slope <= 1.3);
  std::vector<double> d, gap;
  for (const auto& r : rows) {
    d.push_back(r.delta);
    gap.push_back(1 - r.lambda);
  }
  const auto g = fit_loglog(d, gap);
  CHECK(g.slope >= 0.7);
  CHECK(g.slope <= 1.3);
}

TEST_CASE("CSV output is reproducible and ordered") {
  auto plan = plan_of("map = tent-e2\nsigmas = 0.04, 0.02\ndelta = 0.01\ngrid = 2048\nobservables = u, lyapunov\n");
  const std::string a = csv_of(plan);
  const std::string b = csv_of(plan);
  CHECK(a == b);
  plan.workers = 2;
  CHECK(csv_of(plan) == a);

  std::istringstream in(a);
  std::string header;
  std::getline(in, header);
  std::string expected;
  for (const auto& c : csv_columns(false)) expected += (expected.empty() ? "" : ",") + c;
  CHECK(header == expected);
  CHECK(header ==
        "sigma,delta,n,seed,k,lambda,rho_q_l1,rho_q_bv,u_q_bv,R_l1,R_bv,defect,xi,xi_finite,r,a1,a2_lower,a2_upper,a3,"
        "flags,error");
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("0.04,0.01,2048,", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("0.02,0.01,2048,", 0) == 0);
  CHECK(csv_columns(true)[19] == "runtime_s");
}

TEST_CASE("induced regime rows reconstruct rho") {
  const auto rows = run_plan(plan_of("map = tent-e2\nsigma = 0.02\ndeltas = 0.01, 0.005\ngrid = 4096\n"));
  for (const auto& r : rows) {
    CHECK(r.error.empty());
    CHECK(r.flags.find("InducedRegime") != std::string::npos);
    CHECK(r.defect <= 1e-8);
    CHECK(r.k >= 2);
    CHECK(std::isfinite(r.u_q_bv));
    CHECK(std::isfinite(r.R_bv));
  }
}

TEST_CASE("a failing point becomes an error row and the sweep continues") {
  // The interval map sends everything outside the hole back into it.
  const auto plan = plan_of(
      "map = custom\nphase = interval\ninterval = 0,1\nbranch = 0,0.5,1.2,0.2\nbranch = 0.5,1,-1.2,1.4\n"
      "x0 = 0.5\npoints = 0.04:0.35, 0.04:0.01\ngrid = 1024\n");
  CHECK_NOTHROW(validate_plan(plan));
  const auto rows = run_plan(plan);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].error.find("ZeroOperator") != std::string::npos);
  CHECK(std::isnan(rows[0].lambda));
  CHECK(rows[1].error.empty());
  CHECK(rows[1].lambda > 0.0);
  std::ostringstream out;
  write_csv(rows, false, out);
  CHECK(out.str().find("ZeroOperator") != std::string::npos);
}

TEST_CASE("sign changes") {
  std::vector<ResultRow> rows(6);
  const double xs[] = {-1.0, -0.5, std::nan(""), 0.2, 0.4, -0.1};
  for (int i = 0; i < 6; ++i) rows[i].xi = xs[i];
  CHECK(sign_changes(rows, "xi") == 2);
  rows.pop_back();
  CHECK(sign_changes(rows, "xi") == 1);
  CHECK(row_value(rows[0], "xi") == -1.0);
  CHECK(std::isnan(row_value(rows[0], "flags")));
}
