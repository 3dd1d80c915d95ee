#ifndef SENTINEL_PLANTSIM_HPP
#define SENTINEL_PLANTSIM_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sentinel/grid.hpp"

namespace sentinel {

enum class CouplingForm { linear, first_order };

struct CouplingSpec {
    std::string source;
    std::string target;
    double gain = 1.0;
    std::int64_t lag = 0;  // seconds
    CouplingForm form = CouplingForm::linear;
};

struct MaintenanceWindow {
    std::int64_t start = 0;
    std::int64_t end = 0;
};

/**
 * Deterministic synthetic-telemetry configuration. The generator embeds
 * explicit, known couplings so dependency detectors have discoverable
 * ground-truth structure; distributions are artifact choices, not validated
 * against any real facility.
 */
struct PlantConfig {
    std::uint64_t seed = 0;
    int n_loops = 2;
    std::map<SensorKind, int> sensors_per_loop;
    std::int64_t duration = 86400;       // seconds
    std::int64_t base_interval = 60;     // steady-state sampling period
    std::vector<MaintenanceWindow> maintenance_windows;  // sampled at 1 s
    std::vector<CouplingSpec> coupling;
    std::map<SensorKind, double> noise_levels;  // std in engineering units

    void validate() const;  // throws ConfigError
};

enum class PlantScale { desk, full };

/// Desk: 20 sensors preserving kind ratios with >= 3 coupled pairs.
/// Full: 214 sensors across kinds.
PlantConfig default_metl_like_config(PlantScale scale);

/// Deterministic telemetry for every sensor in the config.
std::vector<RawSeries> generate_plant(const PlantConfig& config);

PlantConfig plant_config_from_json(const std::string& text);
std::string plant_config_to_json(const PlantConfig& config);

}  // namespace sentinel

#endif
