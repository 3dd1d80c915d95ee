#include "sentinel/scenario.hpp"

#include <cmath>

#include "sentinel/grid_io.hpp"

namespace sentinel {

using nlohmann::json;

const char* to_string(TaxonomyVector v) {
    switch (v) {
        case TaxonomyVector::data_manipulation: return "data_manipulation";
        case TaxonomyVector::timing_disruption: return "timing_disruption";
        case TaxonomyVector::physical_relationship_violation:
            return "physical_relationship_violation";
    }
    return "data_manipulation";
}

const char* to_string(TaxonomyScope v) {
    switch (v) {
        case TaxonomyScope::single_sensor: return "single_sensor";
        case TaxonomyScope::sensor_group: return "sensor_group";
        case TaxonomyScope::system_wide: return "system_wide";
    }
    return "sensor_group";
}

const char* to_string(TaxonomyStealth v) {
    switch (v) {
        case TaxonomyStealth::obvious: return "obvious";
        case TaxonomyStealth::detectable: return "detectable";
        case TaxonomyStealth::subtle: return "subtle";
    }
    return "detectable";
}

const char* to_string(ScenarioCategory v) {
    switch (v) {
        case ScenarioCategory::data_integrity: return "data_integrity";
        case ScenarioCategory::temporal_disruption: return "temporal_disruption";
        case ScenarioCategory::correlation_violation: return "correlation_violation";
        case ScenarioCategory::availability: return "availability";
    }
    return "data_integrity";
}

AttackWindow WindowSpec::resolve(const SeriesGrid& grid) const {
    if (!fractional) return {abs_start, abs_end};
    const auto span = static_cast<double>(grid.rows()) * static_cast<double>(grid.interval);
    AttackWindow w;
    w.start = grid.start + static_cast<std::int64_t>(std::floor(frac_start * span));
    w.end = w.start + static_cast<std::int64_t>(std::floor(frac_len * span));
    return w;
}

int ScenarioSpec::transformer_count() const {
    int n = 0;
    for (const auto& e : elements) n += e.transform.total_count();
    return n;
}

namespace {

TargetSelector by_id(const std::string& id) { return {TargetMode::by_id, id}; }
TargetSelector by_kind(const std::string& k) { return {TargetMode::by_kind, k}; }
TargetSelector by_pattern(const std::string& p) { return {TargetMode::by_pattern, p}; }

TransformSpec tf(TransformKind kind, json params = json::object(),
                 std::vector<TransformSpec> children = {}, std::string rng_label = "") {
    TransformSpec s;
    s.kind = kind;
    s.params = std::move(params);
    s.children = std::move(children);
    s.rng_label = std::move(rng_label);
    return s;
}

ScenarioElementSpec el(TransformSpec t, TargetSelector sel, WindowSpec w = {}) {
    return {std::move(t), std::move(sel), w};
}

WindowSpec frac(double start, double len) {
    WindowSpec w;
    w.frac_start = start;
    w.frac_len = len;
    return w;
}

// Built-in target selectors follow the plantsim naming convention
// (loop<N>_<tag><NN>); real facility channel names are not available.
std::vector<ScenarioSpec> make_builtins() {
    std::vector<ScenarioSpec> out;

    auto add = [&](std::string name, ScenarioCategory cat, TaxonomyVector vec, TaxonomyScope scope,
                   TaxonomyStealth stealth, std::vector<ScenarioElementSpec> elements) {
        ScenarioSpec s;
        s.name = std::move(name);
        s.category = cat;
        s.vector = vec;
        s.scope = scope;
        s.stealth = stealth;
        s.elements = std::move(elements);
        out.push_back(std::move(s));
    };

    // ---- Data integrity ----
    add("coordinated-thermocouple-manipulation", ScenarioCategory::data_integrity,
        TaxonomyVector::data_manipulation, TaxonomyScope::sensor_group,
        TaxonomyStealth::detectable,
        {el(tf(TransformKind::Offset, {{"offset", 2.0}}, {}, "thermo-off1"), by_id("loop1_temp01")),
         el(tf(TransformKind::Offset, {{"offset", 2.0}}, {}, "thermo-off2"), by_id("loop1_temp02")),
         el(tf(TransformKind::Offset, {{"offset", 2.0}}, {}, "thermo-off3"), by_id("loop1_temp03")),
         el(tf(TransformKind::Offset, {{"offset", 2.0}}, {}, "thermo-off4"), by_id("loop2_temp01")),
         el(tf(TransformKind::Offset, {{"offset", 2.0}}, {}, "thermo-off5"), by_id("loop2_temp02")),
         el(tf(TransformKind::Oscillation, {{"frequency", 0.004}, {"amplitude", 1.5}}, {},
               "thermo-osc"),
            by_id("loop2_temp03"))});

    add("precision-trust-decay", ScenarioCategory::data_integrity,
        TaxonomyVector::data_manipulation, TaxonomyScope::system_wide, TaxonomyStealth::subtle,
        {el(tf(TransformKind::Precision, {{"base_places", 2.0}}, {}, "prec-t"),
            by_kind("temperature")),
         el(tf(TransformKind::Precision, {{"base_places", 2.0}}, {}, "prec-p"),
            by_kind("pressure")),
         el(tf(TransformKind::Precision, {{"base_places", 2.0}}, {}, "prec-x"),
            by_kind("position")),
         el(tf(TransformKind::Noise, {{"sigma", 3.0}}, {}, "noise-t"), by_kind("temperature")),
         el(tf(TransformKind::Noise, {{"sigma", 4.0}}, {}, "noise-p"), by_kind("pressure")),
         el(tf(TransformKind::Noise, {{"sigma", 0.5}}, {}, "noise-f"), by_kind("flow"))});

    // Clip is added beyond the published composition so every transformer
    // kind is exercised by at least one built-in.
    add("sensor-drift-with-dropouts", ScenarioCategory::data_integrity,
        TaxonomyVector::data_manipulation, TaxonomyScope::system_wide, TaxonomyStealth::subtle,
        {el(tf(TransformKind::Offset, {{"offset", 2.0}}, {}, "drift-t"), by_kind("temperature")),
         el(tf(TransformKind::Offset, {{"offset", 1.0}}, {}, "drift-p"), by_kind("pressure")),
         el(tf(TransformKind::Offset, {{"offset", 0.5}}, {}, "drift-f"), by_kind("flow")),
         el(tf(TransformKind::Loss, {{"probability", 0.10}}, {}, "loss-t"),
            by_kind("temperature")),
         el(tf(TransformKind::Loss, {{"probability", 0.10}}, {}, "loss-p"), by_kind("pressure")),
         el(tf(TransformKind::Loss, {{"probability", 0.10}}, {}, "loss-f"), by_kind("flow")),
         el(tf(TransformKind::Clip, {{"restrictiveness", 0.8}}, {}, "stuck-t"),
            by_id("loop2_temp02"))});

    // ---- Temporal disruption ----
    add("command-feedback-desync", ScenarioCategory::temporal_disruption,
        TaxonomyVector::timing_disruption, TaxonomyScope::sensor_group,
        TaxonomyStealth::detectable,
        {el(tf(TransformKind::Delay, {{"delay", 30.0}}, {}, "desync-cmd"), by_kind("setpoint")),
         el(tf(TransformKind::Delay, {{"delay", 60.0}}, {}, "desync-pos"), by_kind("position")),
         el(tf(TransformKind::Delay, {{"delay", 90.0}}, {}, "desync-flow"),
            by_pattern("loop1_flow*"))});

    add("delayed-propagation", ScenarioCategory::temporal_disruption,
        TaxonomyVector::timing_disruption, TaxonomyScope::sensor_group,
        TaxonomyStealth::detectable,
        {el(tf(TransformKind::Delay, {{"delay", 120.0}}, {}, "prop-delay"),
            by_id("loop1_temp01")),
         el(tf(TransformKind::Propagation, {{"delay", 300.0}, {"attenuation", 0.6}}, {},
               "prop-echo"),
            by_pattern("loop1_temp*"))});

    add("replay-based-fdi", ScenarioCategory::temporal_disruption,
        TaxonomyVector::timing_disruption, TaxonomyScope::sensor_group, TaxonomyStealth::subtle,
        {el(tf(TransformKind::Conditional, json::object(),
               {tf(TransformKind::Replay, {{"duration", 1800.0}}, {}, "fdi-replay")},
               "fdi-cond"),
            by_kind("flow"))});

    // ---- Correlation violation ----
    add("physics-violation", ScenarioCategory::correlation_violation,
        TaxonomyVector::physical_relationship_violation, TaxonomyScope::sensor_group,
        TaxonomyStealth::obvious,
        {el(tf(TransformKind::PhysicsViolation,
               {{"delta", 3.0}, {"source", "loop1_temp01"}, {"target", "loop1_temp02"}}, {},
               "phys-tt"),
            by_pattern("loop1_temp*")),
         el(tf(TransformKind::PhysicsViolation,
               {{"delta", 2.0}, {"source", "loop1_flow01"}, {"target", "loop1_press01"}}, {},
               "phys-fp"),
            by_pattern("loop1_*"))});

    add("cross-facility-transplantation", ScenarioCategory::correlation_violation,
        TaxonomyVector::physical_relationship_violation, TaxonomyScope::system_wide,
        TaxonomyStealth::subtle,
        {el(tf(TransformKind::Conditional, json::object(),
               {tf(TransformKind::Replay, {{"duration", 1800.0}}, {}, "xfac-replay")},
               "xfac-cond"),
            by_kind("temperature")),
         el(tf(TransformKind::Scaling, {{"scale", 0.30}}, {}, "xfac-scale-f"), by_kind("flow")),
         el(tf(TransformKind::Scaling, {{"scale", 0.20}}, {}, "xfac-scale-t"),
            by_kind("temperature"))});

    // ---- Availability and confusion ----
    add("sequential-valve-manipulation", ScenarioCategory::availability,
        TaxonomyVector::data_manipulation, TaxonomyScope::sensor_group,
        TaxonomyStealth::detectable,
        {el(tf(TransformKind::Conditional, json::object(),
               {tf(TransformKind::Pattern, {{"template", "square"}, {"repetitions", 8.0}}, {},
                   "sv-pat1")},
               "sv-cond1"),
            by_id("loop1_valve01"), frac(0.50, 0.05)),
         el(tf(TransformKind::Conditional, json::object(),
               {tf(TransformKind::Pattern, {{"template", "square"}, {"repetitions", 8.0}}, {},
                   "sv-pat2")},
               "sv-cond2"),
            by_id("loop2_valve01"), frac(0.55, 0.05)),
         el(tf(TransformKind::Conditional, json::object(),
               {tf(TransformKind::Pattern, {{"template", "pulse_train"}, {"repetitions", 6.0}},
                   {}, "sv-pat3")},
               "sv-cond3"),
            by_id("loop1_valve01"), frac(0.60, 0.05)),
         el(tf(TransformKind::Conditional, json::object(),
               {tf(TransformKind::Pattern, {{"template", "pulse_train"}, {"repetitions", 6.0}},
                   {}, "sv-pat4")},
               "sv-cond4"),
            by_id("loop2_valve01"), frac(0.65, 0.05)),
         el(tf(TransformKind::Conditional, json::object(),
               {tf(TransformKind::Pattern, {{"template", "square"}, {"repetitions", 4.0}}, {},
                   "sv-pat5")},
               "sv-cond5"),
            by_kind("valve_state"), frac(0.70, 0.05)),
         el(tf(TransformKind::StateToggle, {{"probability", 0.3}}, {}, "sv-tog1"),
            by_id("loop1_valve01"), frac(0.50, 0.125)),
         el(tf(TransformKind::StateToggle, {{"probability", 0.3}}, {}, "sv-tog2"),
            by_id("loop2_valve01"), frac(0.50, 0.125)),
         el(tf(TransformKind::StateToggle, {{"probability", 0.2}}, {}, "sv-tog3"),
            by_id("loop1_valve01"), frac(0.625, 0.125)),
         el(tf(TransformKind::StateToggle, {{"probability", 0.2}}, {}, "sv-tog4"),
            by_id("loop2_valve01"), frac(0.625, 0.125))});

    {
        std::vector<ScenarioElementSpec> storm;
        const char* tmpls[] = {"square", "pulse_train", "ramp"};
        for (int i = 0; i < 12; ++i) {
            storm.push_back(el(tf(TransformKind::Pattern,
                                  {{"template", tmpls[i % 3]},
                                   {"repetitions", 6.0 + 2.0 * (i % 4)}},
                                  {}, "storm-" + std::to_string(i + 1)),
                               by_id(i % 2 == 0 ? "loop1_valve01" : "loop2_valve01")));
        }
        add("toggle-storm", ScenarioCategory::availability, TaxonomyVector::data_manipulation,
            TaxonomyScope::system_wide, TaxonomyStealth::obvious, std::move(storm));
    }

    add("phantom-valve-operation", ScenarioCategory::availability,
        TaxonomyVector::data_manipulation, TaxonomyScope::single_sensor,
        TaxonomyStealth::detectable,
        {el(tf(TransformKind::Conditional, json::object(),
               {tf(TransformKind::Pattern, {{"template", "pulse_train"}, {"repetitions", 5.0}},
                   {}, "phantom-pat")},
               "phantom-cond"),
            by_id("loop1_valve01")),
         el(tf(TransformKind::StateToggle, {{"probability", 0.25}}, {}, "phantom-tog1"),
            by_id("loop1_valve01")),
         el(tf(TransformKind::StateToggle, {{"probability", 0.15}}, {}, "phantom-tog2"),
            by_id("loop2_valve01"))});

    // AsymptoticClip shapes the recovery profile; added beyond the published
    // composition for full transformer-kind coverage.
    add("temperature-spike-recovery", ScenarioCategory::availability,
        TaxonomyVector::data_manipulation, TaxonomyScope::sensor_group, TaxonomyStealth::obvious,
        {el(tf(TransformKind::Spike, {{"magnitude", 8.0}, {"duration", 3600.0}}, {}, "spike-air"),
            by_pattern("loop1_temp*"), frac(0.50, 0.10)),
         el(tf(TransformKind::Spike, {{"magnitude", 6.0}, {"duration", 3600.0}}, {},
               "spike-internal"),
            by_pattern("loop2_temp*"), frac(0.58, 0.10)),
         el(tf(TransformKind::Spike, {{"magnitude", 10.0}, {"duration", 3600.0}}, {},
               "spike-vessel"),
            by_id("loop1_temp01"), frac(0.66, 0.09)),
         el(tf(TransformKind::AsymptoticClip, {{"restrictiveness", 0.5}}, {}, "spike-recover"),
            by_id("loop2_temp01"), frac(0.66, 0.09))});

    add("flow-oscillation", ScenarioCategory::availability, TaxonomyVector::data_manipulation,
        TaxonomyScope::sensor_group, TaxonomyStealth::detectable,
        {el(tf(TransformKind::Oscillation,
               {{"frequency", 0.002}, {"amplitude", 1.0}, {"phase", 0.0}}, {}, "fosc-air"),
            by_id("loop1_flow01")),
         el(tf(TransformKind::Oscillation,
               {{"frequency", 0.004}, {"amplitude", 1.5}, {"phase", 1.5707963267948966}}, {},
               "fosc-na"),
            by_id("loop1_flow02")),
         el(tf(TransformKind::Oscillation,
               {{"frequency", 0.008}, {"amplitude", 2.0}, {"phase", 3.141592653589793}}, {},
               "fosc-p"),
            by_kind("pressure"))});

    add("oscillatory-instability", ScenarioCategory::availability,
        TaxonomyVector::data_manipulation, TaxonomyScope::system_wide,
        TaxonomyStealth::detectable,
        {el(tf(TransformKind::Oscillation,
               {{"frequency", 0.003}, {"amplitude", 1.0}, {"phase", 0.0}}, {}, "inst-f"),
            by_kind("flow")),
         el(tf(TransformKind::Oscillation,
               {{"frequency", 0.003}, {"amplitude", 3.0}, {"phase", 2.0943951023931953}}, {},
               "inst-t"),
            by_kind("temperature")),
         el(tf(TransformKind::Oscillation,
               {{"frequency", 0.003}, {"amplitude", 2.0}, {"phase", 4.1887902047863905}}, {},
               "inst-p"),
            by_kind("pressure"))});

    {
        std::vector<ScenarioElementSpec> multi;
        multi.push_back(el(tf(TransformKind::Conditional, json::object(),
                              {tf(TransformKind::Null, {{"probability", 0.2}}, {}, "ms-null1")},
                              "ms-cond1"),
                           by_pattern("loop1_temp*")));
        multi.push_back(el(tf(TransformKind::Conditional, json::object(),
                              {tf(TransformKind::Null, {{"probability", 0.2}}, {}, "ms-null2")},
                              "ms-cond2"),
                           by_pattern("loop2_temp*")));
        multi.push_back(el(tf(TransformKind::Conditional, json::object(),
                              {tf(TransformKind::Null, {{"probability", 0.2}}, {}, "ms-null3")},
                              "ms-cond3"),
                           by_kind("flow")));
        const char* kinds[] = {"temperature", "pressure", "flow"};
        const char* tmpls[] = {"square", "ramp", "pulse_train"};
        for (int i = 0; i < 9; ++i) {
            multi.push_back(el(tf(TransformKind::Pattern,
                                  {{"template", tmpls[i % 3]},
                                   {"amplitude", 1.0 + 0.5 * (i % 3)},
                                   {"repetitions", 4.0 + 2.0 * (i % 4)}},
                                  {}, "ms-pat" + std::to_string(i + 1)),
                               by_kind(kinds[i % 3])));
        }
        add("multi-site-coordinated", ScenarioCategory::availability,
            TaxonomyVector::data_manipulation, TaxonomyScope::system_wide,
            TaxonomyStealth::obvious, std::move(multi));
    }

    return out;
}

}  // namespace

const std::vector<ScenarioSpec>& builtin_scenarios() {
    static const std::vector<ScenarioSpec> scenarios = make_builtins();
    return scenarios;
}

const ScenarioSpec* find_builtin(const std::string& name) {
    for (const auto& s : builtin_scenarios())
        if (s.name == name) return &s;
    return nullptr;
}

AttackDataset apply_scenario(const SeriesGrid& grid, const ScenarioSpec& scenario,
                             SeverityTier tier, std::uint64_t seed,
                             const std::optional<AttackWindow>& window_override) {
    std::vector<ScenarioElement> elements;
    elements.reserve(scenario.elements.size());
    for (const auto& e : scenario.elements) {
        ScenarioElement el;
        el.spec = e.transform;
        el.targets = e.target;
        el.window = window_override ? *window_override : e.window.resolve(grid);
        elements.push_back(std::move(el));
    }
    AttackDataset ds = compose(grid, elements, tier, seed);
    ds.provenance["scenario"] = scenario.name;
    return ds;
}

namespace {

template <typename T>
T enum_from(const json& j, const char* ptr, const char* (*name)(T), T first, T last) {
    const std::string s = j.get<std::string>();
    for (int v = static_cast<int>(first); v <= static_cast<int>(last); ++v)
        if (s == name(static_cast<T>(v))) return static_cast<T>(v);
    throw SchemaError(std::string("invalid value '") + s + "' at " + ptr);
}

}  // namespace

ScenarioSpec scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (j.value("spec_version", 0) != 1) throw SchemaError("unsupported value at /spec_version");
    ScenarioSpec s;
    if (!j.contains("name") || !j["name"].is_string())
        throw SchemaError("missing string at /name");
    s.name = j["name"].get<std::string>();
    if (j.contains("category"))
        s.category = enum_from<ScenarioCategory>(j["category"], "/category", to_string,
                                                 ScenarioCategory::data_integrity,
                                                 ScenarioCategory::availability);
    if (j.contains("taxonomy")) {
        const json& t = j["taxonomy"];
        if (t.contains("vector"))
            s.vector = enum_from<TaxonomyVector>(t["vector"], "/taxonomy/vector", to_string,
                                                 TaxonomyVector::data_manipulation,
                                                 TaxonomyVector::physical_relationship_violation);
        if (t.contains("scope"))
            s.scope = enum_from<TaxonomyScope>(t["scope"], "/taxonomy/scope", to_string,
                                               TaxonomyScope::single_sensor,
                                               TaxonomyScope::system_wide);
        if (t.contains("stealth"))
            s.stealth = enum_from<TaxonomyStealth>(t["stealth"], "/taxonomy/stealth", to_string,
                                                   TaxonomyStealth::obvious,
                                                   TaxonomyStealth::subtle);
    }
    if (!j.contains("elements") || !j["elements"].is_array() || j["elements"].empty())
        throw SchemaError("missing non-empty array at /elements");
    std::size_t idx = 0;
    for (const auto& ej : j["elements"]) {
        const std::string path = "/elements/" + std::to_string(idx++);
        ScenarioElementSpec e;
        if (!ej.contains("transform")) throw SchemaError("missing object at " + path + "/transform");
        try {
            e.transform = transform_spec_from_json(ej["transform"]);
        } catch (const SchemaError& err) {
            throw SchemaError(std::string(err.what()) + " (at " + path + "/transform)");
        }
        if (!ej.contains("target")) throw SchemaError("missing object at " + path + "/target");
        const json& tj = ej["target"];
        const std::string mode = tj.value("mode", "by_id");
        if (mode == "by_id")
            e.target.mode = TargetMode::by_id;
        else if (mode == "by_kind")
            e.target.mode = TargetMode::by_kind;
        else if (mode == "by_pattern")
            e.target.mode = TargetMode::by_pattern;
        else
            throw SchemaError("invalid value at " + path + "/target/mode");
        if (!tj.contains("argument"))
            throw SchemaError("missing string at " + path + "/target/argument");
        e.target.argument = tj["argument"].get<std::string>();
        if (ej.contains("window")) {
            const json& wj = ej["window"];
            if (wj.contains("start") && wj.contains("end")) {
                e.window.fractional = false;
                e.window.abs_start = wj["start"].get<std::int64_t>();
                e.window.abs_end = wj["end"].get<std::int64_t>();
            } else {
                e.window.frac_start = wj.value("frac_start", 0.50);
                e.window.frac_len = wj.value("frac_len", 0.25);
            }
        }
        s.elements.push_back(std::move(e));
    }
    return s;
}

std::string scenario_to_json(const ScenarioSpec& scenario) {
    json j;
    j["spec_version"] = 1;
    j["name"] = scenario.name;
    j["category"] = to_string(scenario.category);
    j["taxonomy"] = {{"vector", to_string(scenario.vector)},
                     {"scope", to_string(scenario.scope)},
                     {"stealth", to_string(scenario.stealth)}};
    json elements = json::array();
    for (const auto& e : scenario.elements) {
        json ej;
        ej["transform"] = transform_spec_to_json(e.transform);
        ej["target"] = {{"mode", e.target.mode == TargetMode::by_id
                                     ? "by_id"
                                     : e.target.mode == TargetMode::by_kind ? "by_kind"
                                                                           : "by_pattern"},
                        {"argument", e.target.argument}};
        if (e.window.fractional)
            ej["window"] = {{"frac_start", e.window.frac_start},
                            {"frac_len", e.window.frac_len}};
        else
            ej["window"] = {{"start", e.window.abs_start}, {"end", e.window.abs_end}};
        elements.push_back(std::move(ej));
    }
    j["elements"] = elements;
    return j.dump(2);
}

ScenarioSpec load_scenario(const std::string& path) {
    return scenario_from_json(read_file(path));
}

}  // namespace sentinel
