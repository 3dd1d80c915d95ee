#ifndef SENTINEL_SCENARIO_HPP
#define SENTINEL_SCENARIO_HPP

#include <optional>
#include <string>
#include <vector>

#include "sentinel/transform.hpp"

namespace sentinel {

enum class TaxonomyVector { data_manipulation, timing_disruption, physical_relationship_violation };
enum class TaxonomyScope { single_sensor, sensor_group, system_wide };
enum class TaxonomyStealth { obvious, detectable, subtle };
enum class ScenarioCategory { data_integrity, temporal_disruption, correlation_violation, availability };

const char* to_string(TaxonomyVector v);
const char* to_string(TaxonomyScope v);
const char* to_string(TaxonomyStealth v);
const char* to_string(ScenarioCategory v);

/// Attack window expressed either absolutely or as a fraction of the grid
/// span, resolved when the scenario is applied.
struct WindowSpec {
    bool fractional = true;
    double frac_start = 0.50;
    double frac_len = 0.25;
    std::int64_t abs_start = 0;
    std::int64_t abs_end = 0;

    AttackWindow resolve(const SeriesGrid& grid) const;
};

struct ScenarioElementSpec {
    TransformSpec transform;
    TargetSelector target;
    WindowSpec window;
};

struct ScenarioSpec {
    std::string name;
    ScenarioCategory category = ScenarioCategory::data_integrity;
    TaxonomyVector vector = TaxonomyVector::data_manipulation;
    TaxonomyScope scope = TaxonomyScope::sensor_group;
    TaxonomyStealth stealth = TaxonomyStealth::detectable;
    std::vector<ScenarioElementSpec> elements;

    /// Total transformer specs, counting nested children.
    int transformer_count() const;
};

/// The 15 built-in attack scenarios.
const std::vector<ScenarioSpec>& builtin_scenarios();

const ScenarioSpec* find_builtin(const std::string& name);

/// Apply a scenario to a grid at the given tier. When window_override is set
/// it replaces every element's window.
AttackDataset apply_scenario(const SeriesGrid& grid, const ScenarioSpec& scenario,
                             SeverityTier tier, std::uint64_t seed,
                             const std::optional<AttackWindow>& window_override = std::nullopt);

ScenarioSpec scenario_from_json(const std::string& text);  // throws SchemaError / KindError
std::string scenario_to_json(const ScenarioSpec& scenario);

ScenarioSpec load_scenario(const std::string& path);

}  // namespace sentinel

#endif
