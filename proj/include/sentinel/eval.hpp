#ifndef SENTINEL_EVAL_HPP
#define SENTINEL_EVAL_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentinel/cpd.hpp"
#include "sentinel/dep.hpp"
#include "sentinel/grid.hpp"
#include "sentinel/nn_detectors.hpp"
#include "sentinel/scenario.hpp"

namespace sentinel {

enum class Paradigm { cpd, lstm, dep, autoencoder };

const char* to_string(Paradigm p);
Paradigm paradigm_from_string(const std::string& s);  // throws KindError

/// Scores from the attack-window timesteps of an attack dataset paired with
/// the same timesteps of the unmodified control dataset.
struct LabeledScores {
    std::vector<double> attack_scores;
    std::vector<double> control_scores;
};

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;     // monotone from (0,0) to (1,1)
    std::vector<double> thresholds;   // swept values, descending, with ±inf sentinels
    double auc = 0.0;                 // trapezoidal area = Mann-Whitney U/(n+ n-)
};

/**
 * Threshold sweep over the union of both score lists (score >= threshold is
 * classified anomalous). Ties contribute half, so the trapezoidal AUC equals
 * the Mann-Whitney statistic.
 */
RocCurve roc_curve(const LabeledScores& s);

/// Percentile bootstrap CI of the mean; deterministic given the seed.
std::pair<double, double> bootstrap_ci(const std::vector<double>& values, double level = 0.95,
                                       std::size_t resamples = 10000, std::uint64_t seed = 0);

struct TierSensitivity {
    double r = 0.0;
    bool flagged = false;  // zero variance in tier or AUC
};

/// One trained detector plus the preprocessing it expects at scoring time.
struct TrainedModel {
    Paradigm paradigm = Paradigm::cpd;
    std::uint64_t seed = 0;
    NormalizationSpec norm;  // applied before scoring for the neural paradigms
    bool normalized = false;

    std::shared_ptr<CpdModel> cpd;
    std::shared_ptr<LstmDetector> lstm;
    std::shared_ptr<DepModel> dep;
    std::shared_ptr<AutoencoderDetector> autoencoder;

    std::string digest;  // content hash of the serialized model
};

/// Fit one paradigm on the clean train/validation splits. The training seed
/// depends only on (seed, paradigm) so a model can be shared across all the
/// scenario/tier cells of a matrix run.
TrainedModel train_paradigm(Paradigm paradigm, const SeriesGrid& train, const SeriesGrid& val,
                            std::uint64_t seed);

AnomalyScoreSeries score_model(const TrainedModel& model, const SeriesGrid& grid);

struct ExperimentRecord {
    Paradigm paradigm = Paradigm::cpd;
    std::string scenario;
    int tier = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;        // stage-tagged message when !ok
    double auc = kMissing;
    std::size_t n_attack = 0;  // labeled steps per class
    std::size_t n_control = 0;
    std::string model_digest;
    std::string scenario_digest;
    double wall_seconds = 0.0;
    RocCurve roc;
};

/**
 * The four-step protocol: train on the clean train split, apply the scenario
 * at the given tier to the test split, score attack and control test splits,
 * and evaluate ROC/AUC on the attack-window timesteps (model warm-up and
 * unscorable rows excluded).
 */
ExperimentRecord run_experiment(Paradigm paradigm, const ScenarioSpec& scenario, int tier,
                                const SeriesGrid& base_grid, std::uint64_t seed);

/// run_experiment with a pre-trained model (the matrix path).
ExperimentRecord run_cell(const TrainedModel& model, const ScenarioSpec& scenario, int tier,
                          const SeriesGrid& test, std::uint64_t seed);

struct GroupStat {
    std::string name;
    double mean = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::size_t n = 0;
};

struct ScenarioSensitivity {
    std::string name;
    TierSensitivity sensitivity;
};

struct MatrixSummary {
    std::vector<GroupStat> per_paradigm;
    std::vector<GroupStat> per_scenario;
    std::vector<ScenarioSensitivity> tier_sensitivity;
    double global_mean = 0.0;
    double global_std = 0.0;
    std::size_t cells = 0;
    std::vector<std::string> failed_cells;
};

struct MatrixResult {
    std::vector<ExperimentRecord> records;  // ordered paradigm, scenario, tier
    MatrixSummary summary;
};

/**
 * Cross product of paradigms x scenarios x tiers on one base grid. Each
 * paradigm is trained once and shared across its cells; cells run
 * concurrently (threads = 0 picks hardware concurrency) with per-cell
 * failure isolation, and results are identical to serial execution.
 */
MatrixResult run_matrix(const std::vector<Paradigm>& paradigms,
                        const std::vector<ScenarioSpec>& scenarios,
                        const std::vector<int>& tiers, const SeriesGrid& base_grid,
                        std::uint64_t seed, std::size_t threads = 0);

/// Pearson correlation of tier index vs AUC over one scenario's records;
/// zero variance in either variable is reported as a flagged 0.
TierSensitivity tier_sensitivity(const std::vector<ExperimentRecord>& records);

std::string records_to_csv(const std::vector<ExperimentRecord>& records);
nlohmann::json summary_to_json(const MatrixSummary& summary);
std::string roc_to_csv(const RocCurve& roc);

/// FNV-1a content hash rendered as 16 hex digits, used for provenance digests.
std::string content_digest(const std::string& text);

}  // namespace sentinel

#endif
