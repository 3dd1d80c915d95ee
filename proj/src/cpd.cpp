#include "sentinel/cpd.hpp"

#include <algorithm>
#include <cmath>

#include "sentinel/stats.hpp"

namespace sentinel {

namespace {

constexpr double kStdSentinel = 1e9;
constexpr double kMeanEps = 1e-9;
constexpr std::size_t kMaxRunLength = 500;

/// Column with missing values replaced by the baseline mean, which is
/// neutral for every component.
std::vector<double> filled_column(const SeriesGrid& grid, std::size_t col, double fill) {
    std::vector<double> out(grid.rows());
    for (std::size_t r = 0; r < grid.rows(); ++r) {
        const double v = grid.at(r, col);
        out[r] = is_missing(v) ? fill : v;
    }
    return out;
}

std::vector<double> standardize(const std::vector<double>& column, const SensorBaseline& b) {
    std::vector<double> z(column.size());
    for (std::size_t i = 0; i < column.size(); ++i) {
        if (b.std > 0.0)
            z[i] = (column[i] - b.mean) / b.std;
        else
            z[i] = column[i] == b.mean ? 0.0 : kStdSentinel;
    }
    return z;
}

/// Raw (un-normalized) component score sequences for one sensor column.
struct Components {
    std::vector<double> cusum;
    std::vector<double> window;  // max over configured window sizes
    std::vector<double> prob;
};

Components sensor_components(const std::vector<double>& column, const SensorBaseline& baseline,
                             const CpdModel& model) {
    Components c;
    c.cusum = cusum_score(standardize(column, baseline), model.cusum_k);
    c.window.assign(column.size(), 0.0);
    for (std::size_t w : model.window_sizes) {
        if (column.size() < w) continue;
        auto z = window_zscore(column, baseline, w);
        for (std::size_t i = 0; i < z.size(); ++i) c.window[i] = std::max(c.window[i], z[i]);
    }
    c.prob = change_probability(column, model.hazard);
    return c;
}

double calibration_scale(std::vector<double> values) {
    const double p = stats::percentile(values, 95.0);
    return p > 1e-12 ? p : 1.0;
}

std::size_t warmup_of(const CpdModel& model) {
    if (model.window_sizes.empty()) return 0;
    return *std::max_element(model.window_sizes.begin(), model.window_sizes.end()) - 1;
}

}  // namespace

const SensorBaseline& BaselineStats::require(const std::string& id) const {
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == id) return entries[i];
    throw MissingSpecError("no baseline for sensor '" + id + "'");
}

std::vector<double> cusum_score(const std::vector<double>& z, double k) {
    std::vector<double> out(z.size());
    double pos = 0.0, neg = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        pos = std::max(0.0, pos + z[i] - k);
        neg = std::max(0.0, neg - z[i] - k);
        out[i] = std::max(pos, neg);
    }
    return out;
}

std::vector<double> window_zscore(const std::vector<double>& column,
                                  const SensorBaseline& baseline, std::size_t w) {
    std::vector<double> out(column.size(), 0.0);
    if (w < 2 || column.size() < w) return out;
    double sum = 0.0;
    for (std::size_t i = 0; i < column.size(); ++i) {
        sum += column[i];
        if (i >= w) sum -= column[i - w];
        if (i + 1 < w) continue;
        const double mean = sum / static_cast<double>(w);
        if (baseline.std > 0.0)
            out[i] = std::fabs(mean - baseline.mean) /
                     (baseline.std / std::sqrt(static_cast<double>(w)));
        else
            out[i] = mean == baseline.mean ? 0.0 : kStdSentinel;
    }
    return out;
}

std::vector<double> change_probability(const std::vector<double>& column, double hazard) {
    if (hazard <= 0.0 || hazard >= 1.0) throw ConfigError("hazard must lie in (0,1)");
    std::vector<double> out(column.size(), 0.0);
    if (column.empty()) return out;

    // Gaussian unknown-mean conjugate model: observation noise variance 1,
    // mean prior N(mu0, 1) anchored at the first observation.
    const double mu0 = column[0];
    const double var0 = 1.0;
    const double obs_var = 1.0;

    // Run-length posterior with per-run sufficient statistics (n, sum).
    std::vector<double> weight = {1.0};
    std::vector<double> n = {0.0};
    std::vector<double> sum = {0.0};

    auto predictive = [&](double x, double run_n, double run_sum) {
        const double prec = 1.0 / var0 + run_n / obs_var;
        const double post_mean = (mu0 / var0 + run_sum / obs_var) / prec;
        const double v = 1.0 / prec + obs_var;
        const double d = x - post_mean;
        return std::exp(-0.5 * d * d / v) / std::sqrt(2.0 * M_PI * v);
    };

    for (std::size_t t = 0; t < column.size(); ++t) {
        const double x = column[t];
        const std::size_t runs = weight.size();

        std::vector<double> grown(runs + 1, 0.0);
        std::vector<double> gn(runs + 1, 0.0), gsum(runs + 1, 0.0);
        for (std::size_t r = 0; r < runs; ++r) {
            grown[r + 1] = weight[r] * predictive(x, n[r], sum[r]) * (1.0 - hazard);
            gn[r + 1] = n[r] + 1.0;
            gsum[r + 1] = sum[r] + x;
        }
        // A changepoint starts a fresh run that explains x under the prior
        // predictive; the weights sum to 1 from the previous normalization.
        grown[0] = hazard * predictive(x, 0.0, 0.0);
        gn[0] = 1.0;
        gsum[0] = x;

        double total = 0.0;
        for (double m : grown) total += m;
        if (total <= 0.0 || !std::isfinite(total)) {
            // Predictive underflow: the observation is impossible under every
            // run; all mass moves to a changepoint.
            grown.assign(grown.size(), 0.0);
            grown[0] = 1.0;
            total = 1.0;
        }
        for (double& m : grown) m /= total;
        out[t] = grown[0];

        if (grown.size() > kMaxRunLength) {
            // Fold the oldest run into its neighbor to cap the state size.
            const std::size_t last = grown.size() - 1;
            grown[last - 1] += grown[last];
            grown.pop_back();
            gn.pop_back();
            gsum.pop_back();
        }
        weight = std::move(grown);
        n = std::move(gn);
        sum = std::move(gsum);
    }
    return out;
}

CpdModel fit_baseline(const SeriesGrid& train) {
    CpdModel model;
    const std::size_t min_rows = *std::max_element(model.window_sizes.begin(),
                                                   model.window_sizes.end());
    if (train.rows() < min_rows)
        throw TooShortError("training grid must have at least " + std::to_string(min_rows) +
                            " rows");

    for (std::size_t c = 0; c < train.cols(); ++c) {
        stats::Welford w;
        for (std::size_t r = 0; r < train.rows(); ++r) {
            const double v = train.at(r, c);
            if (!is_missing(v)) w.add(v);
        }
        if (w.count() == 0)
            throw EmptySeriesError("sensor '" + train.sensors[c].id + "' is entirely missing");
        SensorBaseline b;
        b.mean = w.mean();
        b.std = w.std_dev();
        b.count = w.count();
        b.cv = std::fabs(b.mean) > kMeanEps ? b.std / std::fabs(b.mean) : 0.0;
        model.baselines.ids.push_back(train.sensors[c].id);
        model.baselines.entries.push_back(b);
    }

    // Calibrate the per-component scales, then the combined threshold, on the
    // training grid itself.
    std::vector<Components> per_sensor(train.cols());
    for (std::size_t c = 0; c < train.cols(); ++c) {
        const auto& b = model.baselines.entries[c];
        per_sensor[c] = sensor_components(filled_column(train, c, b.mean), b, model);
        model.cusum_scale.push_back(calibration_scale(per_sensor[c].cusum));
        model.window_scale.push_back(calibration_scale(per_sensor[c].window));
        model.prob_scale.push_back(calibration_scale(per_sensor[c].prob));
    }

    auto calibration = cpd_score(train, model);
    std::vector<double> combined(calibration.scores.begin() +
                                     static_cast<std::ptrdiff_t>(calibration.warmup_steps),
                                 calibration.scores.end());
    model.threshold = stats::percentile(combined, 95.0);
    return model;
}

AnomalyScoreSeries cpd_score(const SeriesGrid& grid, const CpdModel& model) {
    AnomalyScoreSeries out;
    out.start = grid.start;
    out.interval = grid.interval;
    out.scores.assign(grid.rows(), 0.0);
    out.warmup_steps = std::min(warmup_of(model), grid.rows());

    for (std::size_t c = 0; c < grid.cols(); ++c) {
        const std::string& id = grid.sensors[c].id;
        const SensorBaseline& b = model.baselines.require(id);
        std::size_t bi = 0;
        while (model.baselines.ids[bi] != id) ++bi;
        const auto comp = sensor_components(filled_column(grid, c, b.mean), b, model);
        for (std::size_t r = out.warmup_steps; r < grid.rows(); ++r) {
            const double s = std::max({comp.cusum[r] / model.cusum_scale[bi],
                                       comp.window[r] / model.window_scale[bi],
                                       comp.prob[r] / model.prob_scale[bi]});
            out.scores[r] = std::max(out.scores[r], s);
        }
    }
    return out;
}

nlohmann::json cpd_model_to_json(const CpdModel& model) {
    nlohmann::json j;
    j["window_sizes"] = model.window_sizes;
    j["cusum_k"] = model.cusum_k;
    j["hazard"] = model.hazard;
    j["threshold"] = model.threshold;
    nlohmann::json baselines = nlohmann::json::array();
    for (std::size_t i = 0; i < model.baselines.ids.size(); ++i) {
        const auto& b = model.baselines.entries[i];
        baselines.push_back({{"id", model.baselines.ids[i]},
                             {"mean", b.mean},
                             {"std", b.std},
                             {"cv", b.cv},
                             {"count", b.count},
                             {"cusum_scale", model.cusum_scale[i]},
                             {"window_scale", model.window_scale[i]},
                             {"prob_scale", model.prob_scale[i]}});
    }
    j["baselines"] = std::move(baselines);
    return j;
}

CpdModel cpd_model_from_json(const nlohmann::json& j) {
    CpdModel model;
    model.window_sizes = j.at("window_sizes").get<std::vector<std::size_t>>();
    model.cusum_k = j.at("cusum_k").get<double>();
    model.hazard = j.at("hazard").get<double>();
    model.threshold = j.at("threshold").get<double>();
    for (const auto& bj : j.at("baselines")) {
        SensorBaseline b;
        b.mean = bj.at("mean").get<double>();
        b.std = bj.at("std").get<double>();
        b.cv = bj.at("cv").get<double>();
        b.count = bj.at("count").get<std::size_t>();
        model.baselines.ids.push_back(bj.at("id").get<std::string>());
        model.baselines.entries.push_back(b);
        model.cusum_scale.push_back(bj.at("cusum_scale").get<double>());
        model.window_scale.push_back(bj.at("window_scale").get<double>());
        model.prob_scale.push_back(bj.at("prob_scale").get<double>());
    }
    return model;
}

}  // namespace sentinel
