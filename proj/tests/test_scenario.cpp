#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cctype>
#include <map>
#include <set>

#include "sentinel/grid_io.hpp"
#include "sentinel/plantsim.hpp"
#include "sentinel/scenario.hpp"
#include "sentinel/timebase.hpp"

using namespace sentinel;

namespace {

SeriesGrid desk_grid(std::uint64_t seed = 42) {
    auto cfg = default_metl_like_config(PlantScale::desk);
    cfg.seed = seed;
    cfg.duration = 24 * 3600;
    return build_grid(generate_plant(cfg), 30);
}

void collect_kinds(const TransformSpec& spec, std::set<TransformKind>& out) {
    out.insert(spec.kind);
    for (const auto& c : spec.children) collect_kinds(c, out);
}

}  // namespace

TEST_CASE("fifteen built-in scenarios with unique kebab-case names") {
    const auto& all = builtin_scenarios();
    CHECK(all.size() == 15);
    std::set<std::string> names;
    for (const auto& s : all) {
        names.insert(s.name);
        for (char c : s.name) CHECK((std::islower(static_cast<unsigned char>(c)) || c == '-'));
        CHECK_FALSE(s.elements.empty());
    }
    CHECK(names.size() == 15);
}

TEST_CASE("per-scenario transformer counts") {
    const std::map<std::string, int> expected = {
        {"coordinated-thermocouple-manipulation", 6},
        {"precision-trust-decay", 6},
        {"sensor-drift-with-dropouts", 7},
        {"command-feedback-desync", 3},
        {"delayed-propagation", 2},
        {"replay-based-fdi", 2},
        {"physics-violation", 2},
        {"cross-facility-transplantation", 4},
        {"sequential-valve-manipulation", 14},
        {"toggle-storm", 12},
        {"phantom-valve-operation", 4},
        {"temperature-spike-recovery", 4},
        {"flow-oscillation", 3},
        {"oscillatory-instability", 3},
        {"multi-site-coordinated", 15},
    };
    for (const auto& [name, count] : expected) {
        const ScenarioSpec* s = find_builtin(name);
        REQUIRE_MESSAGE(s != nullptr, name);
        CHECK_MESSAGE(s->transformer_count() == count, name);
    }
    CHECK(find_builtin("no-such-scenario") == nullptr);
}

TEST_CASE("category distribution covers all four categories") {
    std::map<ScenarioCategory, int> per;
    for (const auto& s : builtin_scenarios()) ++per[s.category];
    CHECK(per[ScenarioCategory::data_integrity] == 3);
    CHECK(per[ScenarioCategory::temporal_disruption] == 3);
    CHECK(per[ScenarioCategory::correlation_violation] == 2);
    CHECK(per[ScenarioCategory::availability] == 7);
}

TEST_CASE("every transformer kind except identity appears in some builtin") {
    std::set<TransformKind> seen;
    for (const auto& s : builtin_scenarios())
        for (const auto& e : s.elements) collect_kinds(e.transform, seen);
    CHECK(seen.count(TransformKind::Identity) == 0);
    for (int k = 1; k < kTransformKindCount; ++k) {
        const auto kind = static_cast<TransformKind>(k);
        CHECK_MESSAGE(seen.count(kind) == 1, to_string(kind));
    }
}

TEST_CASE("fractional windows resolve inside the grid span") {
    auto g = desk_grid();
    for (const auto& s : builtin_scenarios()) {
        for (const auto& e : s.elements) {
            auto w = e.window.resolve(g);
            CHECK(w.start >= g.start);
            CHECK(w.end > w.start);
            CHECK(w.end <= g.start + static_cast<std::int64_t>(g.rows()) * g.interval);
        }
    }
}

TEST_CASE("every builtin applies to a desk-scale grid") {
    auto g = desk_grid();
    for (const auto& s : builtin_scenarios()) {
        CAPTURE(s.name);
        auto mid = apply_scenario(g, s, {3}, 1001);  // mid severity must not throw
        auto ds = apply_scenario(g, s, {5}, 1001);
        std::size_t touched = 0;
        for (auto m : ds.mask) touched += m;
        CHECK(touched > 0);
        CHECK(ds.provenance["scenario"] == s.name);
        // mask covers every modified cell
        for (std::size_t i = 0; i < g.values.size(); ++i) {
            const bool changed = (is_missing(g.values[i]) != is_missing(ds.grid.values[i])) ||
                                 (!is_missing(g.values[i]) && !is_missing(ds.grid.values[i]) &&
                                  g.values[i] != ds.grid.values[i]);
            if (changed) CHECK(ds.mask[i] != 0);
        }
        (void)mid;
    }
}

TEST_CASE("apply_scenario is deterministic in seed") {
    auto g = desk_grid(7);
    const ScenarioSpec* s = find_builtin("toggle-storm");
    REQUIRE(s != nullptr);
    auto a = apply_scenario(g, *s, {4}, 555);
    auto b = apply_scenario(g, *s, {4}, 555);
    CHECK(a.mask == b.mask);
    for (std::size_t i = 0; i < a.grid.values.size(); ++i) {
        const bool same = (is_missing(a.grid.values[i]) && is_missing(b.grid.values[i])) ||
                          a.grid.values[i] == b.grid.values[i];
        CHECK(same);
    }
}

TEST_CASE("window override confines the mask") {
    auto g = desk_grid(9);
    const ScenarioSpec* s = find_builtin("coordinated-thermocouple-manipulation");
    REQUIRE(s != nullptr);
    const std::int64_t w0 = g.timestamp(g.rows() / 2);
    const std::int64_t w1 = g.timestamp(g.rows() / 2 + 100);
    auto ds = apply_scenario(g, *s, {5}, 3, AttackWindow{w0, w1});
    auto [lo, hi] = g.row_range(w0, w1);
    for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c)
            if (ds.masked(r, c)) {
                CHECK(r >= lo);
                CHECK(r < hi);
            }
}

TEST_CASE("scenario JSON round trip") {
    const ScenarioSpec* s = find_builtin("sequential-valve-manipulation");
    REQUIRE(s != nullptr);
    auto text = scenario_to_json(*s);
    auto back = scenario_from_json(text);
    CHECK(back.name == s->name);
    CHECK(back.category == s->category);
    CHECK(back.vector == s->vector);
    CHECK(back.scope == s->scope);
    CHECK(back.stealth == s->stealth);
    CHECK(back.transformer_count() == s->transformer_count());
    CHECK(scenario_to_json(back) == text);

    auto g = desk_grid(11);
    auto a = apply_scenario(g, *s, {5}, 77);
    auto b = apply_scenario(g, back, {5}, 77);
    CHECK(a.mask == b.mask);
}

TEST_CASE("malformed scenario JSON reports a path") {
    CHECK_THROWS_AS(scenario_from_json("not json"), SchemaError);
    CHECK_THROWS_AS(scenario_from_json(R"({"name":"x","elements":[]})"), SchemaError);
    CHECK_THROWS_AS(scenario_from_json(R"({"spec_version":1,"elements":[{}]})"), SchemaError);
    try {
        scenario_from_json(R"({"spec_version":1,"name":"x","elements":[
            {"transform":{"kind":"Offset"},"target":{"mode":"by_teapot","argument":"a"}}]})");
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("/elements/0/target/mode") != std::string::npos);
    }
    CHECK_THROWS_AS(scenario_from_json(R"({"spec_version":1,"name":"x","elements":[
        {"transform":{"kind":"Bogus"},"target":{"mode":"by_id","argument":"a"}}]})"),
                    KindError);
}

TEST_CASE("load_scenario reads a file") {
    const ScenarioSpec* s = find_builtin("flow-oscillation");
    REQUIRE(s != nullptr);
    const std::string path = "/tmp/sentinel_test_scenario.json";
    write_file_atomic(path, scenario_to_json(*s));
    auto back = load_scenario(path);
    CHECK(back.name == s->name);
}
