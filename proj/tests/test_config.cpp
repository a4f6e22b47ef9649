#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dbsim/config.hpp"

using namespace dbsim;

TEST_CASE("default configuration is accepted") {
    const ScenarioConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    CHECK(cfg.cell_count() == 49);
    CHECK(cfg.total_ticks() == 40000);
    CHECK(cfg.ticks_per_epoch() == 50);
}

TEST_CASE("validate is idempotent") {
    ScenarioConfig cfg;
    cfg.grid_side = 5;
    cfg.drone_speed = 6.0;
    const ScenarioConfig once = validate(cfg);
    const ScenarioConfig twice = validate(once);
    CHECK(config_to_json_text(once) == config_to_json_text(twice));
}

TEST_CASE("even grid side is rejected") {
    ScenarioConfig cfg;
    cfg.grid_side = 6;
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("grid_side"), ConfigError);
}

TEST_CASE("slot length must divide the update interval") {
    ScenarioConfig cfg;
    cfg.ras_s = 0.03;
    cfg.direction_update_s = 1.0;
    try {
        validate(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.violations().size() == 1);
        CHECK(e.violations()[0].field == "ras_s");
        CHECK(e.violations()[0].rule == "ras must divide t_m");
    }
}

TEST_CASE("every violation is reported at once") {
    ScenarioConfig cfg;
    cfg.grid_side = 4;
    cfg.n_candidates = 2;
    cfg.bandwidth_hz = -1.0;
    cfg.rwp_speed_range = {3.0, 1.0};
    try {
        validate(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.violations().size() == 4);
    }
}

TEST_CASE("json round trip preserves every field") {
    ScenarioConfig cfg;
    cfg.grid_side = 3;
    cfg.dma = DmaKind::Slr;
    cfg.scheduler = SchedulerKind::CqBased;
    cfg.drone_speed = 8.0;
    cfg.rwp_pause_range = {1.0, 2.0};
    cfg.seed = 123456789;
    const ScenarioConfig back = config_from_json_text(config_to_json_text(cfg));
    CHECK(config_to_json_text(back) == config_to_json_text(cfg));
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_AS(config_from_json_text(R"({"grid_sides": 7})"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text("not json"), ConfigError);
}

TEST_CASE("enum names parse both ways") {
    for (DmaKind dma : {DmaKind::Hov, DmaKind::Snr, DmaKind::Slr, DmaKind::Gt, DmaKind::Opt}) {
        CHECK(dma_from_string(to_string(dma)) == dma);
    }
    CHECK_THROWS_AS(dma_from_string("GREEDY"), ConfigError);
    CHECK(scheduler_from_string("EqualShare") == SchedulerKind::EqualShare);
    CHECK(scheduler_from_string("CQBased") == SchedulerKind::CqBased);
}
