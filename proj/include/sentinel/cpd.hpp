#ifndef SENTINEL_CPD_HPP
#define SENTINEL_CPD_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentinel/grid.hpp"

namespace sentinel {

struct SensorBaseline {
    double mean = 0.0;
    double std = 0.0;
    double cv = 0.0;  // std/|mean|, zero when |mean| <= 1e-9
    std::size_t count = 0;
};

struct BaselineStats {
    std::vector<std::string> ids;
    std::vector<SensorBaseline> entries;  // parallel to ids

    const SensorBaseline& require(const std::string& id) const;
};

/**
 * Change-point-detection model: frozen per-sensor baselines plus the
 * calibration constants that make the three component scores commensurate.
 * Baselines never adapt after fitting, so attack data cannot poison them.
 */
struct CpdModel {
    BaselineStats baselines;
    std::vector<std::size_t> window_sizes = {10, 25, 50};
    double cusum_k = 0.5;       // drift allowance in sigma units
    double hazard = 1.0 / 500.0;
    double threshold = 0.0;     // 95th percentile of combined training scores

    // Per-sensor 95th training percentiles of each raw component, used to
    // normalize the components before max-fusion (parallel to baselines.ids).
    std::vector<double> cusum_scale;
    std::vector<double> window_scale;
    std::vector<double> prob_scale;
};

/// Streaming baseline fit plus component calibration on the training grid.
/// Requires at least max(window_sizes) rows; throws TooShortError otherwise.
CpdModel fit_baseline(const SeriesGrid& train);

/// Two-sided CUSUM over standardized residuals:
/// S+_t = max(0, S+_{t-1} + z_t - k), S-_t = max(0, S-_{t-1} - z_t - k),
/// score_t = max(S+_t, S-_t), starting from zero.
std::vector<double> cusum_score(const std::vector<double>& z, double k);

/// |window mean - baseline mean| / (baseline std / sqrt(w)); the first w-1
/// entries are 0. A zero-std baseline scores 0 on agreement and 1e9 otherwise.
std::vector<double> window_zscore(const std::vector<double>& column,
                                  const SensorBaseline& baseline, std::size_t w);

/// Bayesian online changepoint recursion (Gaussian unknown-mean model);
/// returns P(run length = 0) per step.
std::vector<double> change_probability(const std::vector<double>& column, double hazard);

/// Per-sensor max of the normalized components, then max across sensors.
AnomalyScoreSeries cpd_score(const SeriesGrid& grid, const CpdModel& model);

nlohmann::json cpd_model_to_json(const CpdModel& model);
CpdModel cpd_model_from_json(const nlohmann::json& j);

}  // namespace sentinel

#endif
