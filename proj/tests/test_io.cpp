#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sentinel/grid_io.hpp"
#include "sentinel/rng.hpp"
#include "sentinel/timebase.hpp"

using namespace sentinel;

TEST_CASE("iso8601 round trip") {
    CHECK(format_iso8601(0) == "1970-01-01T00:00:00Z");
    CHECK(parse_iso8601("1970-01-01T00:00:00Z") == 0);
    const std::int64_t t = 1756000000;
    CHECK(parse_iso8601(format_iso8601(t)) == t);
}

TEST_CASE("grid CSV round trip is bit-exact") {
    Rng rng(42);
    SeriesGrid g;
    g.start = 1700000000;
    g.interval = 30;
    g.sensors = {{"a", SensorKind::temperature, "degC", false},
                 {"b", SensorKind::valve_state, "", true}};
    for (int r = 0; r < 100; ++r) {
        g.values.push_back(rng.uniform01() < 0.1 ? kMissing : rng.gauss(350.0, 7.3));
        g.values.push_back(rng.uniform01() < 0.5 ? 0.0 : 1.0);
    }
    const std::string csv = grid_to_csv(g);
    const std::string sidecar = grid_sidecar_json(g);
    SeriesGrid back = grid_from_csv(csv, sidecar);
    REQUIRE(back.rows() == g.rows());
    REQUIRE(back.cols() == g.cols());
    CHECK(back.start == g.start);
    CHECK(back.interval == g.interval);
    CHECK(back.sensors[1].is_discrete);
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        if (is_missing(g.values[i]))
            CHECK(is_missing(back.values[i]));
        else
            CHECK(back.values[i] == g.values[i]);  // bit-exact via 17 sig digits
    }
}

TEST_CASE("sidecar carries the normalization spec") {
    SeriesGrid g;
    g.sensors = {{"a", SensorKind::flow, "au", false}};
    g.values = {1.0, 2.0, 3.0};
    auto norm = fit_normalization(g);
    auto sidecar = grid_sidecar_json(g, &norm);
    auto loaded = normalization_from_sidecar(sidecar);
    REQUIRE(loaded.has_value());
    CHECK(loaded->entries[0].min == 1.0);
    CHECK(loaded->entries[0].max == 3.0);
    CHECK_FALSE(loaded->entries[0].degenerate);
    CHECK_FALSE(normalization_from_sidecar(grid_sidecar_json(g)).has_value());
}

TEST_CASE("atomic write then read") {
    const std::string path = "/tmp/sentinel_test_io.txt";
    write_file_atomic(path, "hello");
    CHECK(read_file(path) == "hello");
    write_file_atomic(path, "world");
    CHECK(read_file(path) == "world");
}
