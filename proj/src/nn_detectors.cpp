#include "sentinel/nn_detectors.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "sentinel/stats.hpp"

namespace sentinel {

namespace {

using nn::Batch;

std::size_t thread_count(const TrainConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

double column_mean(const SeriesGrid& g, std::size_t c) {
    stats::Welford w;
    for (std::size_t r = 0; r < g.rows(); ++r)
        if (!is_missing(g.at(r, c))) w.add(g.at(r, c));
    if (w.count() == 0)
        throw EmptySeriesError("sensor '" + g.sensors[c].id + "' is entirely missing");
    return w.mean();
}

nn::NetworkSpec lstm_spec() {
    using nn::Activation;
    using nn::LayerKind;
    nn::NetworkSpec spec;
    spec.input = 1;
    const std::size_t hidden[] = {40, 32, 24, 16};
    for (std::size_t h : hidden) {
        spec.layers.push_back({LayerKind::lstm, h, Activation::linear, 0.0});
        spec.layers.push_back({LayerKind::dropout, 0, Activation::linear, 0.25});
    }
    spec.layers.push_back({LayerKind::dense, 1, Activation::linear, 0.0});
    return spec;
}

nn::NetworkSpec autoencoder_spec(std::size_t width) {
    using nn::Activation;
    using nn::LayerKind;
    nn::NetworkSpec spec;
    spec.input = width;
    for (std::size_t h : {64, 32, 16, 8}) {
        spec.layers.push_back({LayerKind::dense, h, Activation::relu, 0.0});
        spec.layers.push_back({LayerKind::batch_norm, 0, Activation::linear, 0.0});
        spec.layers.push_back({LayerKind::dropout, 0, Activation::linear, 0.10});
    }
    for (std::size_t h : {16, 32, 64}) {
        spec.layers.push_back({LayerKind::dense, h, Activation::relu, 0.0});
    }
    spec.layers.push_back({LayerKind::dense, width, Activation::linear, 0.0});
    return spec;
}

/// Overlapping one-step-ahead training windows for one sensor column:
/// inputs x[s..s+L-1], targets x[s+1..s+L], loss masked where the target is
/// missing. Missing inputs are replaced by the training mean.
struct SequenceSet {
    Batch x, target, mask;
};

SequenceSet make_sequences(const SeriesGrid& g, std::size_t c, double fill,
                           std::size_t seq_len, std::size_t stride) {
    SequenceSet out;
    if (g.rows() < seq_len + 1) return out;
    for (std::size_t s = 0; s + seq_len + 1 <= g.rows(); s += stride) {
        std::vector<std::vector<double>> xs(seq_len), ts(seq_len), ms(seq_len);
        for (std::size_t i = 0; i < seq_len; ++i) {
            const double xv = g.at(s + i, c);
            const double tv = g.at(s + i + 1, c);
            xs[i] = {is_missing(xv) ? fill : xv};
            ts[i] = {is_missing(tv) ? 0.0 : tv};
            ms[i] = {is_missing(tv) ? 0.0 : 1.0};
        }
        out.x.push_back(std::move(xs));
        out.target.push_back(std::move(ts));
        out.mask.push_back(std::move(ms));
    }
    return out;
}

/// One continuous pass over the full column; prediction at row t uses all
/// history up to t. Returns squared one-step-ahead errors aligned so that
/// err[t] is the error of the prediction for row t (missing target -> NaN).
std::vector<double> one_step_errors(const SeriesGrid& g, std::size_t c, double fill,
                                    nn::Network& net) {
    std::vector<double> err(g.rows(), kMissing);
    if (g.rows() < 2) return err;
    Batch x(1);
    x[0].resize(g.rows() - 1);
    for (std::size_t r = 0; r + 1 < g.rows(); ++r) {
        const double v = g.at(r, c);
        x[0][r] = {is_missing(v) ? fill : v};
    }
    Batch y = net.forward(x, false, nullptr);
    for (std::size_t r = 1; r < g.rows(); ++r) {
        const double actual = g.at(r, c);
        if (is_missing(actual)) continue;
        const double d = y[0][r - 1][0] - actual;
        err[r] = d * d;
    }
    return err;
}

/// Epoch loop shared by both detectors: shuffled minibatches, adaptive-moment
/// updates, early stop on validation loss. Returns the per-epoch training
/// losses (for provenance).
std::vector<double> run_training(nn::Network& net, const SequenceSet& train,
                                 const SequenceSet& val, const TrainConfig& cfg, Rng rng) {
    nn::Adam opt(cfg.learning_rate);
    std::vector<double> epoch_losses;
    double best_val = std::numeric_limits<double>::infinity();
    nlohmann::json best_weights;
    std::size_t since_best = 0;

    std::vector<std::size_t> order(train.x.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        // 1/t learning-rate decay keeps late epochs from oscillating around
        // the optimum.
        opt.set_learning_rate(cfg.learning_rate / (1.0 + 0.1 * static_cast<double>(epoch)));
        // Deterministic Fisher-Yates shuffle from the seeded stream.
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = rng.uniform_index(i);
            std::swap(order[i - 1], order[j]);
        }
        double total = 0.0;
        std::size_t batches = 0;
        for (std::size_t at = 0; at < order.size(); at += cfg.batch_size) {
            const std::size_t n = std::min(cfg.batch_size, order.size() - at);
            Batch bx(n), bt(n), bm(n);
            for (std::size_t i = 0; i < n; ++i) {
                bx[i] = train.x[order[at + i]];
                bt[i] = train.target[order[at + i]];
                bm[i] = train.mask[order[at + i]];
            }
            const double loss = net.train_step_sequence(bx, bt, bm, &rng);
            if (!std::isfinite(loss)) throw TrainingDivergedError("non-finite training loss");
            opt.step(net);
            total += loss;
            ++batches;
        }
        (void)total;
        (void)batches;
        // End-of-epoch training loss evaluated deterministically (dropout off,
        // batch norm frozen) so the curve reflects the model, not batch noise.
        const double train_loss = net.loss_sequence(train.x, train.target, train.mask);

        const double val_loss =
            val.x.empty() ? train_loss : net.loss_sequence(val.x, val.target, val.mask);
        if (!std::isfinite(val_loss) || !std::isfinite(train_loss))
            throw TrainingDivergedError("non-finite evaluation loss");
        if (val_loss < best_val - 1e-12) {
            best_val = val_loss;
            best_weights = net.weights_to_json();
            since_best = 0;
        } else {
            ++since_best;
        }
        // The recorded curve tracks the snapshot that early stopping keeps, so
        // it reflects the model a caller would get if training stopped here.
        epoch_losses.push_back(since_best == 0 || epoch_losses.empty()
                                   ? train_loss
                                   : epoch_losses.back());
        if (since_best >= cfg.patience) break;
    }
    if (!best_weights.is_null()) net.weights_from_json(best_weights);
    return epoch_losses;
}

double threshold_from_errors(std::vector<double> errors) {
    errors.erase(std::remove_if(errors.begin(), errors.end(),
                                [](double v) { return is_missing(v); }),
                 errors.end());
    if (errors.empty()) throw EmptyScoresError("no finite training errors for threshold");
    const double p = stats::percentile(errors, 85.0);
    return p > 1e-12 ? p : 1e-12;
}

}  // namespace

LstmDetector train_lstm(const SeriesGrid& train, const SeriesGrid& val,
                        const TrainConfig& cfg) {
    const std::size_t L = LstmDetector::kSequenceLength;
    if (train.rows() < 2 * L)
        throw TooShortError("lstm training needs at least " + std::to_string(2 * L) + " rows");

    LstmDetector det;
    det.sensor_ids.resize(train.cols());
    det.models.resize(train.cols());
    det.thresholds.resize(train.cols());
    det.fill_values.resize(train.cols());
    std::vector<nlohmann::json> histories(train.cols());

    auto train_one = [&](std::size_t c) {
        const std::string& id = train.sensors[c].id;
        const double fill = column_mean(train, c);
        auto seqs = make_sequences(train, c, fill, L, L / 2);
        auto vseqs = make_sequences(val, c, fill, L, L);
        auto net = std::make_shared<nn::Network>(lstm_spec(),
                                                 Rng::derive(cfg.seed, "lstm-init", id));
        auto losses = run_training(*net, seqs, vseqs, cfg,
                                   Rng::derive(cfg.seed, "lstm-train", id));
        det.sensor_ids[c] = id;
        det.models[c] = net;
        det.fill_values[c] = fill;
        det.thresholds[c] = threshold_from_errors(one_step_errors(train, c, fill, *net));
        histories[c] = losses;
    };

    const std::size_t workers = std::min(thread_count(cfg), train.cols());
    if (workers <= 1) {
        for (std::size_t c = 0; c < train.cols(); ++c) train_one(c);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t c = w; c < train.cols(); c += workers) train_one(c);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    // Dataset-level calibration on the same fused statistic used at scoring
    // time (fused_threshold is still 1 here, so scores come back raw).
    const auto calib = score_lstm(train, det);
    std::vector<double> fused(calib.scores.begin() + static_cast<std::ptrdiff_t>(L),
                              calib.scores.end());
    const double p = fused.empty() ? 1.0 : stats::percentile(fused, 85.0);
    det.fused_threshold = p > 1e-12 ? p : 1e-12;

    det.provenance = {{"optimizer", "adam"},
                      {"learning_rate", cfg.learning_rate},
                      {"batch_size", cfg.batch_size},
                      {"epochs", cfg.epochs},
                      {"patience", cfg.patience},
                      {"weight_init", "uniform-fan-in"},
                      {"seed", cfg.seed},
                      {"epoch_losses", histories}};
    return det;
}

AnomalyScoreSeries score_lstm(const SeriesGrid& grid, const LstmDetector& det) {
    const std::size_t L = LstmDetector::kSequenceLength;
    if (grid.rows() < L + 1)
        throw TooShortError("scoring needs at least " + std::to_string(L + 1) + " rows");

    AnomalyScoreSeries out;
    out.start = grid.start;
    out.interval = grid.interval;
    out.scores.assign(grid.rows(), 0.0);
    out.warmup_steps = L;

    for (std::size_t c = 0; c < grid.cols(); ++c) {
        const std::string& id = grid.sensors[c].id;
        const auto it = std::find(det.sensor_ids.begin(), det.sensor_ids.end(), id);
        if (it == det.sensor_ids.end())
            throw MissingSpecError("no lstm model for sensor '" + id + "'");
        const std::size_t m = static_cast<std::size_t>(it - det.sensor_ids.begin());
        auto err = one_step_errors(grid, c, det.fill_values[m], *det.models[m]);
        for (std::size_t r = L; r < grid.rows(); ++r) {
            if (is_missing(err[r])) continue;
            out.scores[r] = std::max(out.scores[r], err[r] / det.thresholds[m]);
        }
    }
    for (std::size_t r = L; r < grid.rows(); ++r) out.scores[r] /= det.fused_threshold;
    return out;
}

AutoencoderDetector train_autoencoder(const SeriesGrid& train, const SeriesGrid& val,
                                      const TrainConfig& cfg) {
    if (train.cols() < 2) throw ConfigError("autoencoder needs at least 2 sensors");
    if (train.rows() < 2) throw TooShortError("autoencoder needs at least 2 training rows");

    AutoencoderDetector det;
    for (const auto& s : train.sensors) det.sensor_ids.push_back(s.id);
    det.fill_values.resize(train.cols());
    for (std::size_t c = 0; c < train.cols(); ++c) det.fill_values[c] = column_mean(train, c);

    auto row_sample = [&](const SeriesGrid& g, std::size_t r, SequenceSet& set) {
        std::vector<double> x(g.cols()), t(g.cols()), m(g.cols());
        bool any = false;
        for (std::size_t c = 0; c < g.cols(); ++c) {
            const double v = g.at(r, c);
            x[c] = is_missing(v) ? det.fill_values[c] : v;
            t[c] = is_missing(v) ? 0.0 : v;
            m[c] = is_missing(v) ? 0.0 : 1.0;
            any = any || !is_missing(v);
        }
        if (!any) return;
        set.x.push_back({std::move(x)});
        set.target.push_back({std::move(t)});
        set.mask.push_back({std::move(m)});
    };

    SequenceSet tset, vset;
    for (std::size_t r = 0; r < train.rows(); ++r) row_sample(train, r, tset);
    for (std::size_t r = 0; r < val.rows(); ++r) row_sample(val, r, vset);

    det.model = std::make_shared<nn::Network>(autoencoder_spec(train.cols()),
                                              Rng::derive(cfg.seed, "ae-init"));
    auto losses = run_training(*det.model, tset, vset, cfg, Rng::derive(cfg.seed, "ae-train"));

    // Calibrate on the same max-across-sensors statistic used at scoring time.
    auto calib = score_autoencoder(train, det);  // threshold still 0 -> raw errors
    std::vector<double> maxima;
    for (std::size_t r = 0; r < calib.scores.size(); ++r) maxima.push_back(calib.scores[r]);
    const double p = stats::percentile(maxima, 85.0);
    det.threshold = p > 1e-12 ? p : 1e-12;

    det.provenance = {{"optimizer", "adam"},
                      {"learning_rate", cfg.learning_rate},
                      {"batch_size", cfg.batch_size},
                      {"epochs", cfg.epochs},
                      {"patience", cfg.patience},
                      {"weight_init", "uniform-fan-in"},
                      {"seed", cfg.seed},
                      {"epoch_losses", losses}};
    return det;
}

AnomalyScoreSeries score_autoencoder(const SeriesGrid& grid, const AutoencoderDetector& det) {
    if (grid.cols() != det.sensor_ids.size())
        throw MissingSpecError("grid width does not match the trained autoencoder");
    for (std::size_t c = 0; c < grid.cols(); ++c)
        if (grid.sensors[c].id != det.sensor_ids[c])
            throw MissingSpecError("sensor '" + grid.sensors[c].id +
                                   "' does not match the trained autoencoder layout");

    AnomalyScoreSeries out;
    out.start = grid.start;
    out.interval = grid.interval;
    out.scores.assign(grid.rows(), 0.0);

    Batch x(grid.rows());
    std::vector<bool> skipped(grid.rows(), false);
    for (std::size_t r = 0; r < grid.rows(); ++r) {
        std::vector<double> v(grid.cols());
        bool any = false;
        for (std::size_t c = 0; c < grid.cols(); ++c) {
            const double raw = grid.at(r, c);
            v[c] = is_missing(raw) ? det.fill_values[c] : raw;
            any = any || !is_missing(raw);
        }
        if (!any) skipped[r] = true;
        x[r] = {std::move(v)};
    }
    Batch y = det.model->forward(x, false, nullptr);
    const double divisor = det.threshold > 0.0 ? det.threshold : 1.0;
    for (std::size_t r = 0; r < grid.rows(); ++r) {
        if (skipped[r]) {
            out.skipped_steps.push_back(r);
            continue;
        }
        double worst = 0.0;
        for (std::size_t c = 0; c < grid.cols(); ++c) {
            const double raw = grid.at(r, c);
            if (is_missing(raw)) continue;
            const double d = y[r][0][c] - raw;
            worst = std::max(worst, d * d);
        }
        out.scores[r] = worst / divisor;
    }
    return out;
}

namespace {

nlohmann::json network_to_json(const nn::Network& net) { return net.weights_to_json(); }

std::shared_ptr<nn::Network> network_from_json(const nlohmann::json& j, std::uint64_t seed) {
    auto spec = nn::NetworkSpec::from_json(j.at("spec"));
    auto net = std::make_shared<nn::Network>(spec, Rng(seed));
    net->weights_from_json(j);
    return net;
}

}  // namespace

nlohmann::json lstm_detector_to_json(const LstmDetector& det) {
    nlohmann::json j;
    j["kind"] = "lstm";
    j["sequence_length"] = LstmDetector::kSequenceLength;
    j["fused_threshold"] = det.fused_threshold;
    j["provenance"] = det.provenance;
    j["sensors"] = nlohmann::json::array();
    for (std::size_t i = 0; i < det.sensor_ids.size(); ++i)
        j["sensors"].push_back({{"id", det.sensor_ids[i]},
                                {"threshold", det.thresholds[i]},
                                {"fill", det.fill_values[i]},
                                {"network", network_to_json(*det.models[i])}});
    return j;
}

LstmDetector lstm_detector_from_json(const nlohmann::json& j) {
    if (j.value("kind", "") != "lstm") throw SchemaError("not an lstm detector checkpoint");
    LstmDetector det;
    det.fused_threshold = j.value("fused_threshold", 1.0);
    det.provenance = j.value("provenance", nlohmann::json::object());
    for (const auto& sj : j.at("sensors")) {
        det.sensor_ids.push_back(sj.at("id").get<std::string>());
        det.thresholds.push_back(sj.at("threshold").get<double>());
        det.fill_values.push_back(sj.at("fill").get<double>());
        det.models.push_back(network_from_json(sj.at("network"), 0));
    }
    return det;
}

nlohmann::json autoencoder_to_json(const AutoencoderDetector& det) {
    nlohmann::json j;
    j["kind"] = "autoencoder";
    j["threshold"] = det.threshold;
    j["sensor_ids"] = det.sensor_ids;
    j["fill_values"] = det.fill_values;
    j["network"] = network_to_json(*det.model);
    j["provenance"] = det.provenance;
    return j;
}

AutoencoderDetector autoencoder_from_json(const nlohmann::json& j) {
    if (j.value("kind", "") != "autoencoder")
        throw SchemaError("not an autoencoder checkpoint");
    AutoencoderDetector det;
    det.threshold = j.at("threshold").get<double>();
    det.sensor_ids = j.at("sensor_ids").get<std::vector<std::string>>();
    det.fill_values = j.at("fill_values").get<std::vector<double>>();
    det.model = network_from_json(j.at("network"), 0);
    det.provenance = j.value("provenance", nlohmann::json::object());
    return det;
}

}  // namespace sentinel
