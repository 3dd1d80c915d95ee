#ifndef SENTINEL_DEP_HPP
#define SENTINEL_DEP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentinel/grid.hpp"

namespace sentinel {

struct PairInfo {
    std::string a, b;
    double r = 0.0;  // training Pearson correlation
    double p = 1.0;  // two-sided significance of r
};

/// Top sensor pairs ranked by correlation significance, capped at 100.
struct PairRegistry {
    std::vector<PairInfo> pairs;
};

enum class LagCriterion { aic, bic };

/// Directed Granger fit a -> b: restricted AR(L) on b against the
/// unrestricted model with a's lags added.
struct GrangerFit {
    bool valid = false;
    std::size_t lag = 1;                   // selected L in 1..10
    std::vector<double> unrestricted;      // [intercept, b lags, a lags]
    std::vector<double> restricted;        // [intercept, b lags]
    double f_stat = 0.0;
    double p_value = 1.0;
    double resid_scale = 1.0;              // std of unrestricted training residuals
};

struct TreeNode {
    int feature = -1;       // -1 = leaf
    double threshold = 0.0;
    double value = 0.0;     // leaf prediction
    int left = -1, right = -1;
};

/// Bootstrap forest predicting b_t from (a_{t-1..t-3}, b_{t-1..t-3}).
struct PairForest {
    std::vector<std::vector<TreeNode>> trees;  // 10 trees, depth <= 5
    double resid_scale = 0.0;                  // std of training residuals
    double target_min = 0.0, target_max = 0.0;
};

struct DepModel {
    PairRegistry registry;
    std::vector<GrangerFit> granger;   // parallel to registry.pairs
    std::vector<PairForest> forests;
    std::size_t window = 50;
    LagCriterion criterion = LagCriterion::aic;
    double threshold = 0.0;            // 95th pct of training fused scores

    // Per-pair per-analyzer training 95th percentiles (fusion scales) and
    // training mean deviations (neutral emissions for unusable windows).
    std::vector<double> corr_scale, granger_scale, forest_scale;
    std::vector<double> corr_neutral, granger_neutral, forest_neutral;
};

/// All unordered pairs ranked by correlation-test p-value (ties by |r|, then
/// ids); top 100 kept. Throws NoPairsError when no valid pair exists.
PairRegistry select_pairs(const SeriesGrid& train);

/// Per-pair |rolling r - training r| with window w; 0 for t < w-1. Windows
/// with a constant series score |0 - r_train|; windows with more than 20%
/// missing emit the NaN marker for the caller to replace.
std::vector<std::vector<double>> rolling_correlation_score(const SeriesGrid& grid,
                                                           const PairRegistry& registry,
                                                           std::size_t w);

/// Information-criterion lag selection (AIC = n ln(RSS/n) + 2k) over lags
/// 1..10 and the Granger F test for each registry pair, direction a -> b.
std::vector<GrangerFit> granger_fit(const SeriesGrid& train, const PairRegistry& registry,
                                    LagCriterion criterion = LagCriterion::aic);

double information_criterion(double rss, std::size_t n, std::size_t k, LagCriterion criterion);

std::vector<PairForest> forest_fit(const SeriesGrid& train, const PairRegistry& registry,
                                   std::uint64_t seed);
/// Per-pair |forest prediction - b_t| / training residual scale; NaN where
/// features are unavailable.
std::vector<std::vector<double>> forest_score(const SeriesGrid& grid,
                                              const PairRegistry& registry,
                                              const std::vector<PairForest>& forests);

/// Fit all three analyzers and calibrate fusion scales and the threshold.
DepModel fit_dep(const SeriesGrid& train, std::uint64_t seed,
                 LagCriterion criterion = LagCriterion::aic);

AnomalyScoreSeries dep_score(const SeriesGrid& grid, const DepModel& model);

nlohmann::json dep_model_to_json(const DepModel& model);
DepModel dep_model_from_json(const nlohmann::json& j);

/// Per-pair diagnostics (pair, r, p, lag, F, scales) as CSV.
std::string dep_diagnostics_csv(const DepModel& model);

}  // namespace sentinel

#endif
