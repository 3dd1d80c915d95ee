#ifndef SENTINEL_GRID_HPP
#define SENTINEL_GRID_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sentinel/errors.hpp"

namespace sentinel {

/// Missing values are carried as quiet NaN.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

enum class SensorKind {
    temperature,
    pressure,
    flow,
    position,
    valve_state,
    setpoint,
    other,
};

const char* to_string(SensorKind k);
SensorKind sensor_kind_from_string(const std::string& s);

struct SensorMeta {
    std::string id;
    SensorKind kind = SensorKind::other;
    std::string unit;
    bool is_discrete = false;
};

struct RawSample {
    std::int64_t t = 0;  // seconds
    double value = kMissing;

    friend bool operator==(const RawSample&, const RawSample&) = default;
};

struct RawSeries {
    SensorMeta sensor;
    std::vector<RawSample> samples;

    /// Native sampling period estimated as the median inter-sample gap.
    std::int64_t native_period() const;
};

/**
 * Uniform-lattice matrix of sensor values, the universal currency between
 * modules. Row k holds timestamp start + k*interval; one column per sensor.
 */
struct SeriesGrid {
    std::int64_t start = 0;
    std::int64_t interval = 30;
    std::vector<SensorMeta> sensors;
    std::vector<double> values;  // row-major, rows() x cols()

    std::size_t cols() const { return sensors.size(); }
    std::size_t rows() const { return sensors.empty() ? 0 : values.size() / sensors.size(); }

    double at(std::size_t row, std::size_t col) const { return values[row * cols() + col]; }
    double& at(std::size_t row, std::size_t col) { return values[row * cols() + col]; }

    std::int64_t timestamp(std::size_t row) const {
        return start + static_cast<std::int64_t>(row) * interval;
    }

    /// Index of the sensor with the given id; throws MissingSpecError if absent.
    std::size_t sensor_index(const std::string& id) const;
    bool has_sensor(const std::string& id) const;

    std::vector<double> column(std::size_t col) const;

    /// Row range [lo, hi) covering timestamps in [t0, t1).
    std::pair<std::size_t, std::size_t> row_range(std::int64_t t0, std::int64_t t1) const;
};

struct NormEntry {
    double min = 0.0;
    double max = 0.0;
    bool degenerate = false;
};

struct NormalizationSpec {
    // Parallel to the sensor ids it was fitted on.
    std::vector<std::string> ids;
    std::vector<NormEntry> entries;

    const NormEntry* find(const std::string& id) const;
};

struct SplitSpec {
    double train_fraction = 0.70;
    double val_fraction = 0.15;
    double test_fraction = 0.15;
};

/// Per-timestep continuous anomaly score over a grid; 1.0 is the calibrated
/// alert level in every paradigm.
struct AnomalyScoreSeries {
    std::int64_t start = 0;
    std::int64_t interval = 30;
    std::vector<double> scores;
    /// Leading steps with no score by construction (model warm-up); they hold 0.
    std::size_t warmup_steps = 0;
    /// Rows that could not be scored (e.g. every sensor missing); they hold 0.
    std::vector<std::size_t> skipped_steps;
};

}  // namespace sentinel

#endif
