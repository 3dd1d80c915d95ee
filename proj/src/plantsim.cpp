#include "sentinel/plantsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "sentinel/rng.hpp"

namespace sentinel {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr std::int64_t kDaySec = 86400;

struct KindDefaults {
    double base;
    double diurnal_amp;
    double noise;
};

KindDefaults kind_defaults(SensorKind k) {
    switch (k) {
        case SensorKind::temperature: return {350.0, 6.0, 0.3};
        case SensorKind::pressure: return {10.0, 0.8, 0.15};
        case SensorKind::flow: return {12.0, 0.0, 0.12};
        case SensorKind::position: return {50.0, 2.0, 0.2};
        case SensorKind::setpoint: return {350.0, 0.0, 0.0};
        case SensorKind::valve_state: return {0.0, 0.0, 0.0};
        case SensorKind::other: return {1.0, 0.2, 0.1};
    }
    return {1.0, 0.2, 0.1};
}

const char* kind_tag(SensorKind k) {
    switch (k) {
        case SensorKind::temperature: return "temp";
        case SensorKind::pressure: return "press";
        case SensorKind::flow: return "flow";
        case SensorKind::position: return "pos";
        case SensorKind::valve_state: return "valve";
        case SensorKind::setpoint: return "sp";
        case SensorKind::other: return "aux";
    }
    return "aux";
}

// Deterministic per-sensor generator parameters.
struct SensorGen {
    SensorMeta meta;
    int loop = 0;
    double base = 0.0;
    double drift = 0.0;       // units per second
    double amp = 0.0;         // diurnal amplitude
    double phase = 0.0;
    double noise = 0.0;       // per-sample std
    std::uint64_t noise_key = 0;
    // valve / setpoint step schedules
    std::vector<std::int64_t> step_times;
    std::vector<double> step_levels;
};

double sample_noise(const SensorGen& g, std::int64_t t) {
    if (g.noise <= 0.0) return 0.0;
    Rng r(g.noise_key ^ (static_cast<std::uint64_t>(t) * 0x9e3779b97f4a7c15ull));
    return r.gauss(0.0, g.noise);
}

// Pump duty cycle: square wave with seeded per-cycle edge jitter.
double pump_duty(std::uint64_t seed, int loop, std::int64_t t) {
    const std::int64_t period = 7200;
    const std::int64_t cycle = t >= 0 ? t / period : 0;
    Rng r = Rng::derive(seed, "pump", "loop" + std::to_string(loop) + ":" + std::to_string(cycle));
    const double half = 0.5 * static_cast<double>(period) * (1.0 + 0.1 * (r.uniform01() - 0.5));
    return static_cast<double>(t % period) < half ? 1.0 : 0.0;
}

double base_value_at(const PlantConfig& cfg, const SensorGen& g, std::int64_t t) {
    switch (g.meta.kind) {
        case SensorKind::valve_state: {
            std::size_t n = static_cast<std::size_t>(
                std::upper_bound(g.step_times.begin(), g.step_times.end(), t) -
                g.step_times.begin());
            return static_cast<double>(n % 2);
        }
        case SensorKind::setpoint: {
            std::size_t n = static_cast<std::size_t>(
                std::upper_bound(g.step_times.begin(), g.step_times.end(), t) -
                g.step_times.begin());
            return n == 0 ? g.base : g.step_levels[n - 1];
        }
        case SensorKind::flow: {
            const double duty = pump_duty(cfg.seed, g.loop, t);
            return g.base + 4.0 * duty + g.drift * static_cast<double>(t) + sample_noise(g, t);
        }
        default:
            return g.base + g.drift * static_cast<double>(t) +
                   g.amp * std::sin(kTwoPi * static_cast<double>(t % kDaySec) /
                                        static_cast<double>(kDaySec) +
                                    g.phase) +
                   sample_noise(g, t);
    }
}

// Linear interpolation into an already generated series; clamps at the edges.
double series_value_at(const RawSeries& s, std::int64_t t) {
    const auto& v = s.samples;
    if (t <= v.front().t) return v.front().value;
    if (t >= v.back().t) return v.back().value;
    auto it = std::lower_bound(v.begin(), v.end(), t,
                               [](const RawSample& a, std::int64_t tt) { return a.t < tt; });
    if (it->t == t) return it->value;
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double f = static_cast<double>(t - a.t) / static_cast<double>(b.t - a.t);
    return a.value + f * (b.value - a.value);
}

}  // namespace

void PlantConfig::validate() const {
    if (duration <= 0) throw ConfigError("duration must be positive");
    if (base_interval <= 0) throw ConfigError("base_interval must be positive");
    if (n_loops <= 0) throw ConfigError("n_loops must be positive");
    for (const auto& [kind, count] : sensors_per_loop)
        if (count < 0) throw ConfigError("negative sensor count");
    std::vector<MaintenanceWindow> ws = maintenance_windows;
    std::sort(ws.begin(), ws.end(),
              [](const MaintenanceWindow& a, const MaintenanceWindow& b) { return a.start < b.start; });
    std::int64_t prev_end = 0;
    for (const auto& w : ws) {
        if (w.start < 0 || w.end > duration || w.start >= w.end)
            throw ConfigError("maintenance window outside duration");
        if (w.start < prev_end) throw ConfigError("overlapping maintenance windows");
        prev_end = w.end;
    }
    for (const auto& c : coupling) {
        if (c.lag < 0) throw ConfigError("coupling lag must be non-negative");
        if (c.source == c.target) throw ConfigError("coupling source equals target");
    }
}

PlantConfig default_metl_like_config(PlantScale scale) {
    PlantConfig cfg;
    cfg.seed = 0;
    cfg.duration = 2 * kDaySec;
    cfg.base_interval = 60;
    cfg.n_loops = 2;
    if (scale == PlantScale::desk) {
        cfg.sensors_per_loop = {{SensorKind::temperature, 3}, {SensorKind::pressure, 1},
                                {SensorKind::flow, 2},        {SensorKind::position, 1},
                                {SensorKind::valve_state, 1}, {SensorKind::setpoint, 2}};
    } else {
        // 2 x 107 = 214 sensors, roughly preserving the desk kind ratios.
        cfg.sensors_per_loop = {{SensorKind::temperature, 43}, {SensorKind::pressure, 11},
                                {SensorKind::flow, 11},        {SensorKind::position, 11},
                                {SensorKind::valve_state, 10}, {SensorKind::setpoint, 21}};
    }
    cfg.maintenance_windows.push_back({cfg.duration / 4, cfg.duration / 4 + 600});
    for (int loop = 1; loop <= cfg.n_loops; ++loop) {
        const std::string p = "loop" + std::to_string(loop) + "_";
        cfg.coupling.push_back({p + "temp01", p + "temp02", 1.1, 60, CouplingForm::linear});
        cfg.coupling.push_back({p + "flow01", p + "press01", 0.8, 0, CouplingForm::linear});
        cfg.coupling.push_back({p + "temp01", p + "temp03", 1.0, 300, CouplingForm::first_order});
    }
    cfg.noise_levels = {{SensorKind::temperature, 0.3}, {SensorKind::pressure, 0.15},
                        {SensorKind::flow, 0.12},       {SensorKind::position, 0.2},
                        {SensorKind::setpoint, 0.0},    {SensorKind::valve_state, 0.0}};
    return cfg;
}

std::vector<RawSeries> generate_plant(const PlantConfig& config) {
    config.validate();

    // Shared sample timeline: base_interval steady state, 1 s inside
    // maintenance windows.
    std::vector<std::int64_t> timeline;
    auto in_window = [&](std::int64_t t) {
        for (const auto& w : config.maintenance_windows)
            if (t >= w.start && t < w.end) return true;
        return false;
    };
    for (std::int64_t t = 0; t <= config.duration;) {
        timeline.push_back(t);
        if (in_window(t)) {
            t += 1;
        } else {
            std::int64_t nt = t + config.base_interval;
            for (const auto& w : config.maintenance_windows)
                if (t < w.start && nt > w.start) nt = w.start;
            t = nt;
        }
    }

    std::vector<SensorGen> gens;
    for (int loop = 1; loop <= config.n_loops; ++loop) {
        for (const auto& [kind, count] : config.sensors_per_loop) {
            for (int i = 1; i <= count; ++i) {
                SensorGen g;
                char buf[64];
                std::snprintf(buf, sizeof(buf), "loop%d_%s%02d", loop, kind_tag(kind), i);
                g.meta.id = buf;
                g.meta.kind = kind;
                g.meta.is_discrete =
                    kind == SensorKind::valve_state || kind == SensorKind::setpoint;
                g.meta.unit = kind == SensorKind::temperature || kind == SensorKind::setpoint
                                  ? "degC"
                                  : "au";
                g.loop = loop;
                const KindDefaults kd = kind_defaults(kind);
                Rng r = Rng::derive(config.seed, "params", g.meta.id);
                g.base = kd.base * (0.9 + 0.2 * r.uniform01());
                g.drift = (r.uniform01() - 0.5) * 2.0 / static_cast<double>(kDaySec);
                g.amp = kd.diurnal_amp * (0.8 + 0.4 * r.uniform01());
                g.phase = r.uniform(0.0, kTwoPi);
                auto it = config.noise_levels.find(kind);
                g.noise = it != config.noise_levels.end() ? it->second : kd.noise;
                g.noise_key = Rng::derive(config.seed, "noise", g.meta.id).next();
                if (kind == SensorKind::valve_state) {
                    Rng sr = Rng::derive(config.seed, "valve", g.meta.id);
                    std::int64_t t = 0;
                    while (t < config.duration) {
                        t += static_cast<std::int64_t>(sr.uniform(1800.0, 7200.0));
                        g.step_times.push_back(t);
                    }
                } else if (kind == SensorKind::setpoint) {
                    Rng sr = Rng::derive(config.seed, "setpoint", g.meta.id);
                    std::int64_t t = 0;
                    while (t < config.duration) {
                        t += static_cast<std::int64_t>(sr.uniform(14400.0, 28800.0));
                        g.step_times.push_back(t);
                        g.step_levels.push_back(g.base * (0.97 + 0.06 * sr.uniform01()));
                    }
                }
                gens.push_back(std::move(g));
            }
        }
    }

    std::vector<RawSeries> out(gens.size());
    for (std::size_t i = 0; i < gens.size(); ++i) {
        out[i].sensor = gens[i].meta;
        out[i].samples.reserve(timeline.size());
        for (std::int64_t t : timeline)
            out[i].samples.push_back({t, base_value_at(config, gens[i], t)});
    }

    // Overwrite coupling targets from their (already generated) sources.
    auto find_series = [&](const std::string& id) -> std::size_t {
        for (std::size_t i = 0; i < out.size(); ++i)
            if (out[i].sensor.id == id) return i;
        throw ConfigError("coupling references unknown sensor: " + id);
    };
    for (const auto& c : config.coupling) {
        const std::size_t src = find_series(c.source);
        const std::size_t dst = find_series(c.target);
        const SensorGen& g = gens[dst];
        const double target_noise = g.noise * 0.25;
        RawSeries& tgt = out[dst];
        if (c.form == CouplingForm::linear) {
            for (auto& s : tgt.samples) {
                double n = target_noise > 0.0 ? sample_noise(gens[dst], s.t) * 0.25 : 0.0;
                s.value = c.gain * series_value_at(out[src], s.t - c.lag) + n;
            }
        } else {
            const double tau = static_cast<double>(std::max<std::int64_t>(c.lag, config.base_interval));
            double y = c.gain * series_value_at(out[src], tgt.samples.front().t - c.lag);
            std::int64_t prev_t = tgt.samples.front().t;
            for (auto& s : tgt.samples) {
                const double dt = static_cast<double>(s.t - prev_t);
                const double u = c.gain * series_value_at(out[src], s.t - c.lag);
                y += (1.0 - std::exp(-dt / tau)) * (u - y);
                double n = target_noise > 0.0 ? sample_noise(gens[dst], s.t) * 0.25 : 0.0;
                s.value = y + n;
                prev_t = s.t;
            }
        }
    }
    return out;
}

std::string plant_config_to_json(const PlantConfig& config) {
    json j;
    j["seed"] = config.seed;
    j["n_loops"] = config.n_loops;
    j["duration"] = config.duration;
    j["base_interval"] = config.base_interval;
    json spl = json::object();
    for (const auto& [k, c] : config.sensors_per_loop) spl[to_string(k)] = c;
    j["sensors_per_loop"] = spl;
    json mw = json::array();
    for (const auto& w : config.maintenance_windows)
        mw.push_back({{"start", w.start}, {"end", w.end}});
    j["maintenance_windows"] = mw;
    json cj = json::array();
    for (const auto& c : config.coupling)
        cj.push_back({{"source", c.source},
                      {"target", c.target},
                      {"gain", c.gain},
                      {"lag", c.lag},
                      {"form", c.form == CouplingForm::linear ? "linear" : "first_order"}});
    j["coupling"] = cj;
    json nl = json::object();
    for (const auto& [k, v] : config.noise_levels) nl[to_string(k)] = v;
    j["noise_levels"] = nl;
    return j.dump(2);
}

PlantConfig plant_config_from_json(const std::string& text) {
    json j = json::parse(text);
    PlantConfig cfg;
    cfg.seed = j.value("seed", 0ull);
    cfg.n_loops = j.value("n_loops", 2);
    cfg.duration = j.value("duration", static_cast<std::int64_t>(2 * kDaySec));
    cfg.base_interval = j.value("base_interval", static_cast<std::int64_t>(60));
    if (j.contains("sensors_per_loop"))
        for (const auto& [k, v] : j["sensors_per_loop"].items())
            cfg.sensors_per_loop[sensor_kind_from_string(k)] = v.get<int>();
    if (j.contains("maintenance_windows"))
        for (const auto& w : j["maintenance_windows"])
            cfg.maintenance_windows.push_back(
                {w.at("start").get<std::int64_t>(), w.at("end").get<std::int64_t>()});
    if (j.contains("coupling"))
        for (const auto& c : j["coupling"]) {
            CouplingSpec cs;
            cs.source = c.at("source").get<std::string>();
            cs.target = c.at("target").get<std::string>();
            cs.gain = c.value("gain", 1.0);
            cs.lag = c.value("lag", static_cast<std::int64_t>(0));
            cs.form = c.value("form", "linear") == std::string("first_order")
                          ? CouplingForm::first_order
                          : CouplingForm::linear;
            cfg.coupling.push_back(cs);
        }
    if (j.contains("noise_levels"))
        for (const auto& [k, v] : j["noise_levels"].items())
            cfg.noise_levels[sensor_kind_from_string(k)] = v.get<double>();
    cfg.validate();
    return cfg;
}

}  // namespace sentinel
