#include "sentinel/grid.hpp"

#include <algorithm>

namespace sentinel {

const char* to_string(SensorKind k) {
    switch (k) {
        case SensorKind::temperature: return "temperature";
        case SensorKind::pressure: return "pressure";
        case SensorKind::flow: return "flow";
        case SensorKind::position: return "position";
        case SensorKind::valve_state: return "valve_state";
        case SensorKind::setpoint: return "setpoint";
        case SensorKind::other: return "other";
    }
    return "other";
}

SensorKind sensor_kind_from_string(const std::string& s) {
    if (s == "temperature") return SensorKind::temperature;
    if (s == "pressure") return SensorKind::pressure;
    if (s == "flow") return SensorKind::flow;
    if (s == "position") return SensorKind::position;
    if (s == "valve_state") return SensorKind::valve_state;
    if (s == "setpoint") return SensorKind::setpoint;
    if (s == "other") return SensorKind::other;
    throw SchemaError("unknown sensor kind: " + s);
}

std::int64_t RawSeries::native_period() const {
    if (samples.size() < 2) return 0;
    std::vector<std::int64_t> gaps;
    gaps.reserve(samples.size() - 1);
    for (std::size_t i = 1; i < samples.size(); ++i)
        gaps.push_back(samples[i].t - samples[i - 1].t);
    auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
    std::nth_element(gaps.begin(), mid, gaps.end());
    return *mid;
}

std::size_t SeriesGrid::sensor_index(const std::string& id) const {
    for (std::size_t i = 0; i < sensors.size(); ++i)
        if (sensors[i].id == id) return i;
    throw MissingSpecError("sensor not in grid: " + id);
}

bool SeriesGrid::has_sensor(const std::string& id) const {
    for (const auto& s : sensors)
        if (s.id == id) return true;
    return false;
}

std::vector<double> SeriesGrid::column(std::size_t col) const {
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, col);
    return out;
}

std::pair<std::size_t, std::size_t> SeriesGrid::row_range(std::int64_t t0, std::int64_t t1) const {
    auto clampRow = [this](std::int64_t t, bool round_up) {
        std::int64_t k = (t - start) / interval;
        if (round_up && (t - start) % interval != 0) ++k;
        k = std::max<std::int64_t>(0, std::min<std::int64_t>(k, static_cast<std::int64_t>(rows())));
        return static_cast<std::size_t>(k);
    };
    return {clampRow(t0, true), clampRow(t1, true)};
}

const NormEntry* NormalizationSpec::find(const std::string& id) const {
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == id) return &entries[i];
    return nullptr;
}

}  // namespace sentinel
