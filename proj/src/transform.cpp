#include "sentinel/transform.hpp"

#include <algorithm>
#include <cmath>

#include "sentinel/rng.hpp"

namespace sentinel {

using nlohmann::json;

namespace {
constexpr double kTwoPi = 6.283185307179586;
}

double severity_coefficient(int tier) {
    switch (tier) {
        case 1: return 0.01;
        case 2: return 0.05;
        case 3: return 0.10;
        case 4: return 0.50;
        case 5: return 1.00;
        default: throw InvalidTierError("tier must be in 1..5, got " + std::to_string(tier));
    }
}

const char* to_string(TransformKind k) {
    switch (k) {
        case TransformKind::Identity: return "Identity";
        case TransformKind::Scaling: return "Scaling";
        case TransformKind::Oscillation: return "Oscillation";
        case TransformKind::Spike: return "Spike";
        case TransformKind::Offset: return "Offset";
        case TransformKind::Delay: return "Delay";
        case TransformKind::Replay: return "Replay";
        case TransformKind::StateToggle: return "StateToggle";
        case TransformKind::Precision: return "Precision";
        case TransformKind::Noise: return "Noise";
        case TransformKind::PhysicsViolation: return "PhysicsViolation";
        case TransformKind::Clip: return "Clip";
        case TransformKind::Loss: return "Loss";
        case TransformKind::AsymptoticClip: return "AsymptoticClip";
        case TransformKind::Conditional: return "Conditional";
        case TransformKind::Pattern: return "Pattern";
        case TransformKind::Propagation: return "Propagation";
        case TransformKind::Null: return "Null";
    }
    return "Identity";
}

TransformKind transform_kind_from_string(const std::string& s) {
    static const std::pair<const char*, TransformKind> table[] = {
        {"Identity", TransformKind::Identity},
        {"Scaling", TransformKind::Scaling},
        {"Oscillation", TransformKind::Oscillation},
        {"Spike", TransformKind::Spike},
        {"Offset", TransformKind::Offset},
        {"Delay", TransformKind::Delay},
        {"Replay", TransformKind::Replay},
        {"StateToggle", TransformKind::StateToggle},
        {"Precision", TransformKind::Precision},
        {"Noise", TransformKind::Noise},
        {"PhysicsViolation", TransformKind::PhysicsViolation},
        {"Clip", TransformKind::Clip},
        {"Loss", TransformKind::Loss},
        {"AsymptoticClip", TransformKind::AsymptoticClip},
        {"Conditional", TransformKind::Conditional},
        {"Pattern", TransformKind::Pattern},
        {"Propagation", TransformKind::Propagation},
        {"Null", TransformKind::Null},
    };
    for (const auto& [name, kind] : table)
        if (s == name) return kind;
    throw KindError("unknown transformer kind: " + s);
}

int TransformSpec::total_count() const {
    int n = 1;
    for (const auto& c : children) n += c.total_count();
    return n;
}

namespace {

bool glob_match(const std::string& pat, const std::string& str) {
    std::size_t p = 0, s = 0, star = std::string::npos, mark = 0;
    while (s < str.size()) {
        if (p < pat.size() && (pat[p] == '?' || pat[p] == str[s])) {
            ++p;
            ++s;
        } else if (p < pat.size() && pat[p] == '*') {
            star = p++;
            mark = s;
        } else if (star != std::string::npos) {
            p = star + 1;
            s = ++mark;
        } else {
            return false;
        }
    }
    while (p < pat.size() && pat[p] == '*') ++p;
    return p == pat.size();
}

}  // namespace

std::vector<std::size_t> TargetSelector::resolve(const SeriesGrid& grid) const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < grid.cols(); ++c) {
        const SensorMeta& m = grid.sensors[c];
        bool hit = false;
        switch (mode) {
            case TargetMode::by_id: hit = m.id == argument; break;
            case TargetMode::by_kind: hit = m.kind == sensor_kind_from_string(argument); break;
            case TargetMode::by_pattern: hit = glob_match(argument, m.id); break;
        }
        if (hit) out.push_back(c);
    }
    if (out.empty()) throw TargetError("selector resolves to no sensors: " + argument);
    return out;
}

namespace {

// Mutable application context threaded through nested transformers.
struct ApplyCtx {
    SeriesGrid& grid;
    std::vector<std::uint8_t>& mask;
    const SeriesGrid* composition_input;  // grid as passed to compose()
    double c;                             // tier coefficient
    std::uint64_t seed;

    void mark(std::size_t row, std::size_t col) { mask[row * grid.cols() + col] = 1; }
};

double param_num(const TransformSpec& spec, const char* key, double fallback) {
    if (spec.params.contains(key)) {
        const double v = spec.params.at(key).get<double>();
        return v;
    }
    return fallback;
}

void require_nonneg(double v, const char* what) {
    if (v < 0.0) throw ConfigError(std::string("negative base magnitude for ") + what);
}

double default_scale(SensorKind k) { return k == SensorKind::flow ? 0.30 : 0.20; }

double default_noise_sigma(SensorKind k) {
    switch (k) {
        case SensorKind::temperature: return 3.0;
        case SensorKind::pressure: return 4.0;
        case SensorKind::flow: return 0.5;
        default: return 1.0;
    }
}

Rng sensor_rng(const ApplyCtx& ctx, const TransformSpec& spec, const std::string& sensor_id) {
    return Rng::derive(ctx.seed, spec.rng_label.empty() ? to_string(spec.kind) : spec.rng_label,
                       sensor_id);
}

void apply_one(ApplyCtx& ctx, const TransformSpec& spec, const std::vector<std::size_t>& targets,
               std::size_t lo, std::size_t hi);

// In-window per-column midpoint/half-width for the clipping kinds.
bool window_bounds(const SeriesGrid& g, std::size_t col, std::size_t lo, std::size_t hi,
                   double& mid, double& half) {
    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity();
    for (std::size_t r = lo; r < hi; ++r) {
        const double v = g.at(r, col);
        if (is_missing(v)) continue;
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (vmin > vmax) return false;
    mid = 0.5 * (vmin + vmax);
    half = 0.5 * (vmax - vmin);
    return half > 0.0;
}

void apply_conditional(ApplyCtx& ctx, const TransformSpec& spec,
                       const std::vector<std::size_t>& targets, std::size_t lo, std::size_t hi) {
    std::size_t trig_col = targets.front();
    if (spec.params.contains("trigger_sensor"))
        trig_col = ctx.grid.sensor_index(spec.params.at("trigger_sensor").get<std::string>());
    const bool above = spec.params.value("direction", "gt") != std::string("lt");

    double threshold;
    if (spec.params.contains("threshold")) {
        threshold = spec.params.at("threshold").get<double>();
    } else {
        double s = 0.0;
        std::size_t n = 0;
        for (std::size_t r = lo; r < hi; ++r) {
            const double v = ctx.grid.at(r, trig_col);
            if (!is_missing(v)) {
                s += v;
                ++n;
            }
        }
        threshold = n ? s / static_cast<double>(n) : 0.0;
    }
    double margin = param_num(spec, "margin", 0.0);
    if (!spec.params.contains("margin")) {
        // default margin: in-window std of the trigger sensor
        double s = 0.0, s2 = 0.0;
        std::size_t n = 0;
        for (std::size_t r = lo; r < hi; ++r) {
            const double v = ctx.grid.at(r, trig_col);
            if (!is_missing(v)) {
                s += v;
                s2 += v * v;
                ++n;
            }
        }
        if (n) {
            const double m = s / static_cast<double>(n);
            margin = std::sqrt(std::max(0.0, s2 / static_cast<double>(n) - m * m));
        }
    }
    // Higher severity widens the trigger band, firing more often.
    const double thr_eff = above ? threshold - margin * ctx.c : threshold + margin * ctx.c;

    std::vector<char> trig(hi - lo, 0);
    for (std::size_t r = lo; r < hi; ++r) {
        const double v = ctx.grid.at(r, trig_col);
        if (is_missing(v)) continue;
        trig[r - lo] = above ? v >= thr_eff : v <= thr_eff;
    }
    // Apply children over each maximal run of triggered rows.
    std::size_t r = lo;
    while (r < hi) {
        if (!trig[r - lo]) {
            ++r;
            continue;
        }
        std::size_t run_end = r;
        while (run_end < hi && trig[run_end - lo]) ++run_end;
        for (const auto& child : spec.children) apply_one(ctx, child, targets, r, run_end);
        r = run_end;
    }
}

void apply_propagation(ApplyCtx& ctx, const TransformSpec& spec,
                       const std::vector<std::size_t>& targets, std::size_t lo, std::size_t hi) {
    if (targets.size() < 2)
        throw TargetError("Propagation needs a source and at least one dependent sensor");
    const std::size_t src = targets.front();
    const double attenuation = param_num(spec, "attenuation", 0.5);
    const double delay_s = param_num(spec, "delay", 300.0);
    require_nonneg(delay_s, "Propagation delay");
    const auto delay_steps = static_cast<std::size_t>(std::llround(
        delay_s * ctx.c / static_cast<double>(ctx.grid.interval)));

    // Reference for the echoed perturbation: the children applied here, or
    // the cumulative delta versus the composition input when standalone.
    std::vector<double> before(hi - lo);
    for (std::size_t r = lo; r < hi; ++r) before[r - lo] = ctx.grid.at(r, src);
    if (!spec.children.empty()) {
        std::vector<std::size_t> src_only{src};
        for (const auto& child : spec.children) apply_one(ctx, child, src_only, lo, hi);
    }
    const SeriesGrid* ref = ctx.composition_input;
    std::vector<double> delta(hi - lo, 0.0);
    for (std::size_t r = lo; r < hi; ++r) {
        const double now = ctx.grid.at(r, src);
        const double base = !spec.children.empty()
                                ? before[r - lo]
                                : (ref ? ref->at(r, src) : now);
        if (!is_missing(now) && !is_missing(base)) delta[r - lo] = now - base;
    }
    for (std::size_t di = 1; di < targets.size(); ++di) {
        const std::size_t dep = targets[di];
        for (std::size_t r = lo; r < hi; ++r) {
            if (delta[r - lo] == 0.0) continue;
            const std::size_t j = r + delay_steps;
            if (j >= hi) break;
            double& v = ctx.grid.at(j, dep);
            if (is_missing(v)) continue;
            v += attenuation * delta[r - lo];
            ctx.mark(j, dep);
        }
    }
}

void apply_one(ApplyCtx& ctx, const TransformSpec& spec, const std::vector<std::size_t>& targets,
               std::size_t lo, std::size_t hi) {
    SeriesGrid& g = ctx.grid;
    const double c = ctx.c;
    const std::int64_t interval = g.interval;

    switch (spec.kind) {
        case TransformKind::Identity:
            return;

        case TransformKind::Scaling: {
            for (std::size_t col : targets) {
                const double s =
                    param_num(spec, "scale", default_scale(g.sensors[col].kind));
                require_nonneg(s, "Scaling scale");
                for (std::size_t r = lo; r < hi; ++r) {
                    double& v = g.at(r, col);
                    if (is_missing(v)) continue;
                    v *= 1.0 + s * c;
                    ctx.mark(r, col);
                }
            }
            return;
        }

        case TransformKind::Oscillation: {
            const double f = param_num(spec, "frequency", 0.004);
            const double amp = param_num(spec, "amplitude", 1.5);
            const double phase = param_num(spec, "phase", 0.0);
            require_nonneg(amp, "Oscillation amplitude");
            const double nyquist = 0.5 / static_cast<double>(interval);
            if (f <= 0.0 || f > nyquist)
                throw FrequencyError("Oscillation frequency outside (0, Nyquist]");
            const std::int64_t t0 = g.timestamp(lo);
            for (std::size_t col : targets) {
                for (std::size_t r = lo; r < hi; ++r) {
                    double& v = g.at(r, col);
                    if (is_missing(v)) continue;
                    const double t = static_cast<double>(g.timestamp(r) - t0);
                    v += amp * c * std::sin(kTwoPi * f * t + phase);
                    ctx.mark(r, col);
                }
            }
            return;
        }

        case TransformKind::Spike: {
            const double peak = param_num(spec, "magnitude", 8.0);
            const double dur_s = param_num(spec, "duration", 3600.0);
            require_nonneg(peak, "Spike magnitude");
            require_nonneg(dur_s, "Spike duration");
            if (hi <= lo) return;
            const double center =
                0.5 * static_cast<double>(g.timestamp(lo) + g.timestamp(hi - 1));
            const double half = 0.5 * dur_s * c;
            if (half <= 0.0) return;
            for (std::size_t col : targets) {
                for (std::size_t r = lo; r < hi; ++r) {
                    double& v = g.at(r, col);
                    if (is_missing(v)) continue;
                    const double d = std::fabs(static_cast<double>(g.timestamp(r)) - center);
                    const double bump = peak * c * std::max(0.0, 1.0 - d / half);
                    if (bump <= 0.0) continue;
                    v += bump;
                    ctx.mark(r, col);
                }
            }
            return;
        }

        case TransformKind::Offset: {
            const double b = param_num(spec, "offset", 2.0);
            require_nonneg(b, "Offset base");
            for (std::size_t col : targets) {
                for (std::size_t r = lo; r < hi; ++r) {
                    double& v = g.at(r, col);
                    if (is_missing(v)) continue;
                    v += b * c;
                    ctx.mark(r, col);
                }
            }
            return;
        }

        case TransformKind::Delay: {
            const double delay_s = param_num(spec, "delay", 30.0);
            require_nonneg(delay_s, "Delay base");
            const auto k = static_cast<std::size_t>(
                std::llround(delay_s * c / static_cast<double>(interval)));
            if (k == 0) return;
            for (std::size_t col : targets) {
                std::vector<double> win(hi - lo);
                for (std::size_t r = lo; r < hi; ++r) win[r - lo] = g.at(r, col);
                for (std::size_t r = lo; r < hi; ++r) {
                    const std::size_t srcRow = r >= lo + k ? r - k : lo;
                    g.at(r, col) = win[srcRow - lo];
                    ctx.mark(r, col);
                }
            }
            return;
        }

        case TransformKind::Replay: {
            const double dur_s = param_num(spec, "duration", 1800.0);
            const double offset_s = param_num(spec, "source_offset", 2.0 * dur_s);
            require_nonneg(dur_s, "Replay duration");
            const auto len = std::max<std::size_t>(
                1, static_cast<std::size_t>(
                       std::llround(dur_s * c / static_cast<double>(interval))));
            const auto off = static_cast<std::size_t>(
                std::llround(offset_s / static_cast<double>(interval)));
            if (off == 0 || lo < off)
                throw WindowError("Replay source offset reaches before the grid start");
            const std::size_t end = std::min(hi, lo + len);
            for (std::size_t col : targets) {
                std::vector<double> src(end - lo);
                for (std::size_t r = lo; r < end; ++r) src[r - lo] = g.at(r - off, col);
                for (std::size_t r = lo; r < end; ++r) {
                    g.at(r, col) = src[r - lo];
                    ctx.mark(r, col);
                }
            }
            return;
        }

        case TransformKind::StateToggle: {
            const double p = param_num(spec, "probability", 0.3);
            require_nonneg(p, "StateToggle probability");
            for (std::size_t col : targets) {
                if (!g.sensors[col].is_discrete)
                    throw DiscreteOnlyError("StateToggle requires a discrete sensor: " +
                                            g.sensors[col].id);
                Rng rng = sensor_rng(ctx, spec, g.sensors[col].id);
                for (std::size_t r = lo; r < hi; ++r) {
                    double& v = g.at(r, col);
                    if (is_missing(v)) continue;
                    if (rng.uniform01() < p * c) {
                        v = v >= 0.5 ? 0.0 : 1.0;
                        ctx.mark(r, col);
                    }
                }
            }
            return;
        }

        case TransformKind::Precision: {
            const double base_places = param_num(spec, "base_places", 2.0);
            const auto d = static_cast<int>(std::lround(base_places - 3.0 * c));
            const double scale = std::pow(10.0, d);
            for (std::size_t col : targets) {
                for (std::size_t r = lo; r < hi; ++r) {
                    double& v = g.at(r, col);
                    if (is_missing(v)) continue;
                    v = std::round(v * scale) / scale;
                    ctx.mark(r, col);
                }
            }
            return;
        }

        case TransformKind::Noise: {
            for (std::size_t col : targets) {
                const double sigma = param_num(spec, "sigma",
                                               default_noise_sigma(g.sensors[col].kind));
                require_nonneg(sigma, "Noise sigma");
                Rng rng = sensor_rng(ctx, spec, g.sensors[col].id);
                for (std::size_t r = lo; r < hi; ++r) {
                    double& v = g.at(r, col);
                    if (is_missing(v)) continue;
                    v += rng.gauss(0.0, sigma * c);
                    ctx.mark(r, col);
                }
            }
            return;
        }

        case TransformKind::PhysicsViolation: {
            const double delta = param_num(spec, "delta", 2.0);
            require_nonneg(delta, "PhysicsViolation delta");
            std::size_t src, dst;
            if (spec.params.contains("source") && spec.params.contains("target")) {
                src = g.sensor_index(spec.params.at("source").get<std::string>());
                dst = g.sensor_index(spec.params.at("target").get<std::string>());
            } else {
                if (targets.size() < 2)
                    throw TargetError("PhysicsViolation needs a coupled sensor pair");
                src = targets[0];
                dst = targets[1];
            }
            const double ramp_len = std::max(1.0, 0.25 * static_cast<double>(hi - lo));
            for (std::size_t r = lo; r < hi; ++r) {
                const double ramp =
                    std::min(1.0, static_cast<double>(r - lo + 1) / ramp_len);
                double& a = g.at(r, src);
                if (!is_missing(a)) {
                    a += delta * c * ramp;
                    ctx.mark(r, src);
                }
                double& b = g.at(r, dst);
                if (!is_missing(b)) {
                    b -= delta * c * ramp;
                    ctx.mark(r, dst);
                }
            }
            return;
        }

        case TransformKind::Clip: {
            const double restrict = param_num(spec, "restrictiveness", 0.8);
            require_nonneg(restrict, "Clip restrictiveness");
            for (std::size_t col : targets) {
                double mid, half;
                if (spec.params.contains("mid") && spec.params.contains("width")) {
                    mid = spec.params.at("mid").get<double>();
                    half = spec.params.at("width").get<double>();
                } else if (!window_bounds(g, col, lo, hi, mid, half)) {
                    continue;
                }
                const double w = half * (1.0 - c * restrict);
                for (std::size_t r = lo; r < hi; ++r) {
                    double& v = g.at(r, col);
                    if (is_missing(v)) continue;
                    const double clipped = std::clamp(v, mid - w, mid + w);
                    if (clipped != v) {
                        v = clipped;
                        ctx.mark(r, col);
                    }
                }
            }
            return;
        }

        case TransformKind::Loss: {
            const double p = param_num(spec, "probability", 0.10);
            require_nonneg(p, "Loss probability");
            for (std::size_t col : targets) {
                Rng rng = sensor_rng(ctx, spec, g.sensors[col].id);
                for (std::size_t r = lo; r < hi; ++r) {
                    double& v = g.at(r, col);
                    if (is_missing(v)) continue;
                    if (rng.uniform01() < p * c) {
                        v = kMissing;
                        ctx.mark(r, col);
                    }
                }
            }
            return;
        }

        case TransformKind::AsymptoticClip: {
            const double restrict = param_num(spec, "restrictiveness", 0.8);
            require_nonneg(restrict, "AsymptoticClip restrictiveness");
            for (std::size_t col : targets) {
                double mid, half;
                if (spec.params.contains("mid") && spec.params.contains("width")) {
                    mid = spec.params.at("mid").get<double>();
                    half = spec.params.at("width").get<double>();
                } else if (!window_bounds(g, col, lo, hi, mid, half)) {
                    continue;
                }
                const double w = std::max(1e-12, half * (1.0 - c * restrict));
                for (std::size_t r = lo; r < hi; ++r) {
                    double& v = g.at(r, col);
                    if (is_missing(v)) continue;
                    v = mid + w * std::tanh((v - mid) / w);
                    ctx.mark(r, col);
                }
            }
            return;
        }

        case TransformKind::Conditional:
            apply_conditional(ctx, spec, targets, lo, hi);
            return;

        case TransformKind::Pattern: {
            const std::string tmpl = spec.params.value("template", "square");
            const double amp = param_num(spec, "amplitude", 1.0);
            const double reps = param_num(spec, "repetitions", 10.0);
            require_nonneg(amp, "Pattern amplitude");
            require_nonneg(reps, "Pattern repetitions");
            if (hi <= lo) return;
            const auto cycles = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::llround(reps * c)));
            const double cycle_len = static_cast<double>(hi - lo) / static_cast<double>(cycles);
            for (std::size_t col : targets) {
                const bool discrete = g.sensors[col].is_discrete;
                for (std::size_t r = lo; r < hi; ++r) {
                    double& v = g.at(r, col);
                    if (is_missing(v)) continue;
                    const double pos = static_cast<double>(r - lo) / cycle_len;
                    const double frac = pos - std::floor(pos);
                    double wave;  // in [-1, 1]
                    if (tmpl == "ramp") {
                        wave = 2.0 * frac - 1.0;
                    } else if (tmpl == "pulse_train") {
                        wave = frac < 0.2 ? 1.0 : 0.0;
                    } else if (tmpl == "square") {
                        wave = frac < 0.5 ? 1.0 : -1.0;
                    } else {
                        throw ConfigError("unknown Pattern template: " + tmpl);
                    }
                    if (discrete) {
                        v = wave > 0.0 ? 1.0 : 0.0;  // pattern drives the state directly
                    } else {
                        v += amp * c * wave;
                    }
                    ctx.mark(r, col);
                }
            }
            return;
        }

        case TransformKind::Propagation:
            apply_propagation(ctx, spec, targets, lo, hi);
            return;

        case TransformKind::Null: {
            const double p = param_num(spec, "probability", 0.2);
            require_nonneg(p, "Null probability");
            for (std::size_t col : targets) {
                Rng rng = sensor_rng(ctx, spec, g.sensors[col].id);
                for (std::size_t r = lo; r < hi; ++r) {
                    double& v = g.at(r, col);
                    if (is_missing(v)) continue;
                    if (rng.uniform01() < p * c) {
                        v = kMissing;
                        ctx.mark(r, col);
                    }
                }
            }
            return;
        }
    }
}

void check_window(const SeriesGrid& grid, const AttackWindow& window) {
    if (window.start >= window.end) throw WindowError("window start must precede end");
    const std::int64_t grid_end =
        grid.start + static_cast<std::int64_t>(grid.rows()) * grid.interval;
    if (window.start < grid.start || window.end > grid_end)
        throw WindowError("attack window outside grid range");
}

json element_provenance(const TransformSpec& spec, const TargetSelector& targets,
                        const AttackWindow& window) {
    json e;
    e["spec"] = transform_spec_to_json(spec);
    e["target_mode"] = targets.mode == TargetMode::by_id
                           ? "by_id"
                           : targets.mode == TargetMode::by_kind ? "by_kind" : "by_pattern";
    e["target_argument"] = targets.argument;
    e["window"] = {{"start", window.start}, {"end", window.end}};
    return e;
}

}  // namespace

AttackDataset apply_transform(const SeriesGrid& grid, const TransformSpec& spec,
                              const TargetSelector& targets, const AttackWindow& window,
                              SeverityTier tier, std::uint64_t seed) {
    check_window(grid, window);
    const auto cols = targets.resolve(grid);
    AttackDataset ds;
    ds.grid = grid;
    ds.mask.assign(grid.values.size(), 0);
    ApplyCtx ctx{ds.grid, ds.mask, &grid, tier.coefficient(), seed};
    auto [lo, hi] = grid.row_range(window.start, window.end);
    apply_one(ctx, spec, cols, lo, hi);
    ds.provenance = {{"tier", tier.tier},
                     {"seed", seed},
                     {"elements", json::array({element_provenance(spec, targets, window)})}};
    return ds;
}

AttackDataset compose(const SeriesGrid& grid, const std::vector<ScenarioElement>& elements,
                      SeverityTier tier, std::uint64_t seed) {
    AttackDataset ds;
    ds.grid = grid;
    ds.mask.assign(grid.values.size(), 0);
    json order = json::array();
    ApplyCtx ctx{ds.grid, ds.mask, &grid, tier.coefficient(), seed};
    for (const auto& el : elements) {
        check_window(grid, el.window);
        const auto cols = el.targets.resolve(ds.grid);
        auto [lo, hi] = ds.grid.row_range(el.window.start, el.window.end);
        apply_one(ctx, el.spec, cols, lo, hi);
        order.push_back(element_provenance(el.spec, el.targets, el.window));
    }
    ds.provenance = {{"tier", tier.tier}, {"seed", seed}, {"elements", order}};
    return ds;
}

std::string mask_to_csv(const AttackDataset& ds) {
    std::string out = "timestamp,sensor_id,flag\n";
    for (std::size_t r = 0; r < ds.grid.rows(); ++r) {
        for (std::size_t c = 0; c < ds.grid.cols(); ++c) {
            if (!ds.masked(r, c)) continue;
            out += std::to_string(ds.grid.timestamp(r));
            out += ',';
            out += ds.grid.sensors[c].id;
            out += ",1\n";
        }
    }
    return out;
}

json transform_spec_to_json(const TransformSpec& spec) {
    json j;
    j["kind"] = to_string(spec.kind);
    if (!spec.params.empty()) j["params"] = spec.params;
    if (!spec.rng_label.empty()) j["rng_label"] = spec.rng_label;
    if (!spec.children.empty()) {
        json kids = json::array();
        for (const auto& c : spec.children) kids.push_back(transform_spec_to_json(c));
        j["children"] = kids;
    }
    return j;
}

TransformSpec transform_spec_from_json(const json& j) {
    TransformSpec spec;
    if (!j.contains("kind")) throw SchemaError("transform spec missing /kind");
    spec.kind = transform_kind_from_string(j.at("kind").get<std::string>());
    spec.params = j.value("params", json::object());
    spec.rng_label = j.value("rng_label", "");
    if (j.contains("children")) {
        const bool composing = spec.kind == TransformKind::Conditional ||
                               spec.kind == TransformKind::Propagation ||
                               spec.kind == TransformKind::Pattern;
        if (!composing && !j["children"].empty())
            throw SchemaError("children only allowed on composing kinds at /children");
        for (const auto& c : j["children"]) spec.children.push_back(transform_spec_from_json(c));
    }
    return spec;
}

}  // namespace sentinel
