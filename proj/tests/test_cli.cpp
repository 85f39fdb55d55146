#include <doctest.h>

#include <cmath>

#include "disent/config.hpp"
#include "disent/errors.hpp"
#include "disent/io.hpp"

using namespace disent;

namespace {

const char* kMinimalBose = R"({
  "model": {"statistics": "boson", "L": 2, "t": 0.01, "U": -1.0, "sector": 2}
})";

}  // namespace

TEST_CASE("minimal config parses with defaults applied and echoed") {
    const RunConfig cfg = parse_config(kMinimalBose);
    CHECK(cfg.model.statistics == ParticleKind::Boson);
    CHECK(cfg.model.sites == 2);
    CHECK(cfg.model.hopping == 0.01);
    CHECK(cfg.model.interaction == -1.0);
    REQUIRE(cfg.model.sector.has_value());
    CHECK(*cfg.model.sector == 2);

    CHECK(cfg.dynamics.beta == 100.0);  // beta |U| = 100
    CHECK(cfg.dynamics.gamma_h == 1.0);
    CHECK(cfg.dynamics.gamma_d == 0.0);
    CHECK(cfg.dynamics.dt == 0.0);

    // Every applied default is listed in the metadata echo.
    bool beta_noted = false, gamma_noted = false;
    for (const auto& line : cfg.applied_defaults) {
        if (line.find("beta") != std::string::npos) beta_noted = true;
        if (line.find("gamma_h") != std::string::npos) gamma_noted = true;
    }
    CHECK(beta_noted);
    CHECK(gamma_noted);
}

TEST_CASE("figure-1 sweep config resolves to the acceptance grid") {
    const char* text = R"({
      "model": {"statistics": "boson", "L": 2, "t": 0.01, "U": -1.0, "sector": 2},
      "dynamics": {"beta": 100.0, "gamma_h": 1.0, "t_max": 40.0},
      "sweep": {"control": {"start": 0.0, "stop": 1.2, "step": 0.05}}
    })";
    const RunConfig cfg = parse_config(text);
    REQUIRE(cfg.sweep.has_value());
    CHECK(cfg.sweep->control.size() == 25);
    CHECK(cfg.sweep->control.front() == 0.0);
    CHECK(cfg.sweep->control.back() == doctest::Approx(1.2));
    CHECK(cfg.sweep->continuation);
    CHECK(cfg.sweep->xi == 1e-6);
    CHECK(cfg.sweep->seed == 0);
}

TEST_CASE("schema violations name the offending key") {
    CHECK_THROWS_WITH_AS(parse_config(R"({"model": {"statistics": "boson", "L": 2,
        "t": 0.1, "U": 1.0, "sector": 2, "bogus": 3}})"),
                         doctest::Contains("model.bogus"), ParseError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"modle": {}})"), doctest::Contains("modle"),
                         ParseError);
    CHECK_THROWS_AS(parse_config("not json"), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"model": {"statistics": "anyon", "L": 2, "t": 1, "U": 1}})"),
                    ParseError);
}

TEST_CASE("physics-invalid combinations raise validation errors") {
    // L = 1 ring is rejected.
    CHECK_THROWS_AS(parse_config(R"({"model": {"statistics": "boson", "L": 1, "t": 0.1,
        "U": -1.0, "sector": 2}})"),
                    ValidationError);
    // U = 0 with ratio reporting.
    CHECK_THROWS_AS(parse_config(R"({"model": {"statistics": "boson", "L": 2, "t": 0.1,
        "U": 0.0, "sector": 2}})"),
                    ValidationError);
    // Bosons need a sector or a cap.
    CHECK_THROWS_AS(parse_config(R"({"model": {"statistics": "boson", "L": 2, "t": 0.1,
        "U": -1.0}})"),
                    ValidationError);
}

TEST_CASE("resolved config round-trips to an identical configuration") {
    const char* text = R"({
      "model": {"statistics": "fermion", "L": 2, "t": 0.001, "U": 1.0},
      "dynamics": {"beta": 100.0, "t_max": 25.0, "dt": 2e-4},
      "sweep": {"control": [0.0, 0.5, 1.0], "seed": 7},
      "output": {"record_every": 50}
    })";
    const RunConfig cfg = parse_config(text);
    const std::string resolved = resolved_config_json(cfg);
    const RunConfig again = parse_config(resolved);
    CHECK(resolved_config_json(again) == resolved);
    CHECK(again.applied_defaults.empty());  // everything explicit the second time
}

TEST_CASE("pair override flows from config into the model spec") {
    const char* text = R"({
      "model": {"statistics": "boson", "L": 2, "t": 0.01, "U": -1.0, "sector": 2,
                "pairs": [[0, 1]]}
    })";
    const RunConfig cfg = parse_config(text);
    REQUIRE(cfg.model.pair_override.has_value());
    REQUIRE(cfg.model.pair_override->size() == 1);
    CHECK((*cfg.model.pair_override)[0] == std::pair<int, int>{0, 1});
}

TEST_CASE("CSV writers: fixed header, shortest round-trip numbers, empty cells") {
    ObservableRecord rec;
    rec.time = 0.5;
    rec.trace_value = 1.0;
    rec.purity = 0.25;
    rec.energy = -1.0015975;
    rec.energy_over_u = 1.0015975;
    rec.total_number = 2.0;
    rec.q_d_expect = 2.0;
    rec.mode_occupations = {1.0, 1.0};
    rec.pair_correlations = {0.99, 0.99};

    const std::string csv = trajectory_csv({rec}, 2, {{0, 0}, {1, 1}});
    CHECK(csv.rfind("time,trace,purity,energy,energy_over_u,total_number,n_up,n_down,"
                    "q_d_expect,u_e,occ_0,occ_1,corr_0_0,corr_1_1\n", 0) == 0);
    // n_up/n_down/u_e unset -> empty cells.
    CHECK(csv.find("2,,,2,,1,1,") != std::string::npos);
    CHECK(csv.find("-1.0015975") != std::string::npos);

    // format_double is shortest round-trip.
    CHECK(format_double(0.05) == "0.05");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
    const double v = -1.0015975;
    CHECK(std::stod(format_double(v)) == v);

    // An empty trajectory yields a header-only file.
    const std::string empty = trajectory_csv({}, 2, {{0, 0}, {1, 1}});
    CHECK(empty.find('\n') == empty.size() - 1);
}

TEST_CASE("sweep CSV carries the documented columns") {
    SweepResult result;
    SweepPoint p;
    p.control = 0.4;
    p.record.energy = -1.0;
    p.record.energy_over_u = 1.0;
    p.record.q_d_expect = 1.9;
    p.record.u_e = -0.9;
    p.record.purity = 0.5;
    p.record.mode_occupations = {1.0, 1.0};
    p.residual = 1e-11;
    p.converged = true;
    p.off_extremal_occupation = 0.01;
    result.points.push_back(p);

    const std::string csv = sweep_csv(result, 2);
    CHECK(csv.rfind("control,energy,energy_over_u,q_d_expect,u_e,purity,occ_0,occ_1,"
                    "off_branch_occupation,residual,converged\n", 0) == 0);
    CHECK(csv.find(",true\n") != std::string::npos);
}
