#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sentinel/plantsim.hpp"
#include "sentinel/stats.hpp"
#include "sentinel/timebase.hpp"

using namespace sentinel;

TEST_CASE("generator is deterministic") {
    auto cfg = default_metl_like_config(PlantScale::desk);
    cfg.seed = 1234;
    cfg.duration = 6 * 3600;
    cfg.maintenance_windows = {{cfg.duration / 4, cfg.duration / 4 + 600}};
    auto a = generate_plant(cfg);
    auto b = generate_plant(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].samples.size() == b[i].samples.size());
        for (std::size_t j = 0; j < a[i].samples.size(); ++j) {
            CHECK(a[i].samples[j].t == b[i].samples[j].t);
            CHECK(a[i].samples[j].value == b[i].samples[j].value);
        }
    }
}

TEST_CASE("desk and full scale sensor counts") {
    auto desk = default_metl_like_config(PlantScale::desk);
    int desk_total = 0;
    for (const auto& [k, n] : desk.sensors_per_loop) desk_total += n * desk.n_loops;
    CHECK(desk_total == 20);
    CHECK(desk.coupling.size() >= 3);
    CHECK(desk.sensors_per_loop.at(SensorKind::valve_state) >= 1);

    auto full = default_metl_like_config(PlantScale::full);
    int full_total = 0;
    for (const auto& [k, n] : full.sensors_per_loop) full_total += n * full.n_loops;
    CHECK(full_total == 214);
    CHECK(full.sensors_per_loop.at(SensorKind::valve_state) >= 1);
}

TEST_CASE("maintenance window samples at 1 Hz") {
    auto cfg = default_metl_like_config(PlantScale::desk);
    cfg.seed = 9;
    cfg.duration = 4 * 3600;
    cfg.maintenance_windows = {{3600, 4200}};  // 600 s
    auto series = generate_plant(cfg);
    std::size_t one_second = 0;
    const auto& samples = series.front().samples;
    for (const auto& s : samples)
        if (s.t >= 3600 && s.t < 4200) ++one_second;
    CHECK(one_second == 600);
}

TEST_CASE("linear coupling with constant source settles at gain times source") {
    PlantConfig cfg;
    cfg.seed = 5;
    cfg.n_loops = 1;
    cfg.duration = 24 * 3600;
    cfg.sensors_per_loop = {{SensorKind::temperature, 2}};
    cfg.noise_levels = {{SensorKind::temperature, 0.2}};
    cfg.coupling = {{"loop1_temp01", "loop1_temp02", 2.0, 0, CouplingForm::linear}};
    auto series = generate_plant(cfg);
    // Freeze the source to a constant and re-derive the target by hand.
    // Instead: verify target tracks gain*source within noise.
    const auto& src = series[0].samples;
    const auto& tgt = series[1].samples;
    double err = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) err += tgt[i].value - 2.0 * src[i].value;
    err /= static_cast<double>(src.size());
    const double sigma = 0.2 * 0.25;
    CHECK(std::fabs(err) < 3.0 * sigma / std::sqrt(static_cast<double>(src.size())));
}

TEST_CASE("coupled pairs show strong lag-shifted correlation") {
    auto cfg = default_metl_like_config(PlantScale::desk);
    cfg.seed = 77;
    auto series = generate_plant(cfg);
    auto grid = build_grid(series, 30);
    REQUIRE(grid.rows() >= 1000);
    for (const auto& c : cfg.coupling) {
        const std::size_t si = grid.sensor_index(c.source);
        const std::size_t ti = grid.sensor_index(c.target);
        const auto lag_steps = static_cast<std::size_t>(c.lag / grid.interval);
        std::vector<double> a, b;
        for (std::size_t r = lag_steps; r < grid.rows(); ++r) {
            if (is_missing(grid.at(r - lag_steps, si)) || is_missing(grid.at(r, ti))) continue;
            a.push_back(grid.at(r - lag_steps, si));
            b.push_back(grid.at(r, ti));
        }
        const double r = stats::pearson(a, b);
        INFO(c.source << " -> " << c.target);
        CHECK(std::fabs(r) >= 0.8);
    }
}

TEST_CASE("generated values are finite and valves binary") {
    auto cfg = default_metl_like_config(PlantScale::desk);
    cfg.seed = 3;
    cfg.duration = 12 * 3600;
    cfg.maintenance_windows = {{cfg.duration / 4, cfg.duration / 4 + 600}};
    for (const auto& s : generate_plant(cfg)) {
        for (const auto& sample : s.samples) {
            CHECK(std::isfinite(sample.value));
            if (s.sensor.kind == SensorKind::valve_state)
                CHECK((sample.value == 0.0 || sample.value == 1.0));
        }
    }
}

TEST_CASE("config validation") {
    auto cfg = default_metl_like_config(PlantScale::desk);
    cfg.duration = -1;
    CHECK_THROWS_AS(generate_plant(cfg), ConfigError);
    cfg = default_metl_like_config(PlantScale::desk);
    cfg.maintenance_windows = {{100, 50}};
    CHECK_THROWS_AS(generate_plant(cfg), ConfigError);
    cfg = default_metl_like_config(PlantScale::desk);
    cfg.coupling.push_back({"loop1_temp01", "loop1_temp01", 1.0, 0, CouplingForm::linear});
    CHECK_THROWS_AS(generate_plant(cfg), ConfigError);
}

TEST_CASE("plant config JSON round trip") {
    auto cfg = default_metl_like_config(PlantScale::desk);
    cfg.seed = 99;
    auto text = plant_config_to_json(cfg);
    auto back = plant_config_from_json(text);
    CHECK(back.seed == cfg.seed);
    CHECK(back.n_loops == cfg.n_loops);
    CHECK(back.duration == cfg.duration);
    CHECK(back.coupling.size() == cfg.coupling.size());
    CHECK(back.sensors_per_loop == cfg.sensors_per_loop);
    // identical config => identical telemetry
    auto a = generate_plant(cfg);
    auto b = generate_plant(back);
    REQUIRE(a.size() == b.size());
    CHECK(a[0].samples == std::vector<RawSample>(b[0].samples));
}
