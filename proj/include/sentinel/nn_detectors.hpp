#ifndef SENTINEL_NN_DETECTORS_HPP
#define SENTINEL_NN_DETECTORS_HPP

#include <memory>
#include <string>
#include <vector>

#include "sentinel/grid.hpp"
#include "sentinel/nn.hpp"

namespace sentinel {

struct TrainConfig {
    std::uint64_t seed = 0;
    std::size_t epochs = 30;
    std::size_t batch_size = 16;
    double learning_rate = 1e-3;
    std::size_t patience = 5;  // early-stop patience on validation loss
    std::size_t threads = 0;   // 0 = hardware concurrency
};

/// Per-sensor sequence models predicting step t+1 from the previous 50 steps.
struct LstmDetector {
    static constexpr std::size_t kSequenceLength = 50;

    std::vector<std::string> sensor_ids;
    std::vector<std::shared_ptr<nn::Network>> models;      // parallel to sensor_ids
    std::vector<double> thresholds;                        // 85th pct of training sq errors
    std::vector<double> fill_values;                       // training mean per sensor
    /// 85th percentile of the fused (max across sensors) training statistic,
    /// so dataset-level scores flag about 15% of clean steps.
    double fused_threshold = 1.0;
    nlohmann::json provenance;
};

/// Dense autoencoder over the full sensor vector with a mirrored decoder.
struct AutoencoderDetector {
    std::vector<std::string> sensor_ids;
    std::shared_ptr<nn::Network> model;
    double threshold = 0.0;            // 85th pct of training max-across-sensor errors
    std::vector<double> fill_values;   // training mean per sensor
    nlohmann::json provenance;
};

LstmDetector train_lstm(const SeriesGrid& train, const SeriesGrid& val, const TrainConfig& cfg);
AnomalyScoreSeries score_lstm(const SeriesGrid& grid, const LstmDetector& det);

AutoencoderDetector train_autoencoder(const SeriesGrid& train, const SeriesGrid& val,
                                      const TrainConfig& cfg);
AnomalyScoreSeries score_autoencoder(const SeriesGrid& grid, const AutoencoderDetector& det);

nlohmann::json lstm_detector_to_json(const LstmDetector& det);
LstmDetector lstm_detector_from_json(const nlohmann::json& j);
nlohmann::json autoencoder_to_json(const AutoencoderDetector& det);
AutoencoderDetector autoencoder_from_json(const nlohmann::json& j);

}  // namespace sentinel

#endif
