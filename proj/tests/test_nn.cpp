#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sentinel/nn.hpp"
#include "sentinel/nn_detectors.hpp"
#include "sentinel/rng.hpp"

using namespace sentinel;
using nn::Activation;
using nn::LayerKind;

namespace {

SeriesGrid single_column(std::vector<double> values) {
    SeriesGrid g;
    g.interval = 30;
    SensorMeta m;
    m.id = "s0";
    g.sensors.push_back(m);
    g.values = std::move(values);
    return g;
}

SeriesGrid gaussian_grid(std::uint64_t seed, std::size_t rows, std::size_t cols,
                         double mean = 0.5, double sigma = 0.1) {
    SeriesGrid g;
    g.interval = 30;
    Rng rng(seed);
    for (std::size_t c = 0; c < cols; ++c) {
        SensorMeta m;
        m.id = "s" + std::to_string(c);
        g.sensors.push_back(m);
    }
    g.values.resize(rows * cols);
    for (auto& v : g.values) v = rng.gauss(mean, sigma);
    return g;
}

}  // namespace

TEST_CASE("single linear neuron gradient closed form") {
    nn::NetworkSpec spec;
    spec.input = 1;
    spec.layers.push_back({LayerKind::dense, 1, Activation::linear, 0.0});
    nn::Network net(spec, Rng(1));
    net.layers()[0]->params() = {1.0, 0.0};  // w=1, b=0

    nn::Batch x = {{{2.0}}};
    const double loss = net.train_step(x, {{0.0}}, {{1.0}}, nullptr);
    CHECK(loss == doctest::Approx(4.0));             // (w*x - t)^2
    CHECK(net.layers()[0]->grads()[0] == doctest::Approx(8.0));  // 2(y-t)x
}

TEST_CASE("gradient check: random dense networks") {
    nn::NetworkSpec spec;
    spec.input = 3;
    spec.layers.push_back({LayerKind::dense, 5, Activation::tanh_act, 0.0});
    spec.layers.push_back({LayerKind::dense, 4, Activation::sigmoid, 0.0});
    spec.layers.push_back({LayerKind::dense, 2, Activation::linear, 0.0});
    for (std::uint64_t seed : {1ull, 2ull, 3ull})
        CHECK(nn::grad_check(spec, seed) <= 1e-4);
}

TEST_CASE("gradient check: batch norm in inference mode") {
    nn::NetworkSpec spec;
    spec.input = 4;
    spec.layers.push_back({LayerKind::dense, 6, Activation::tanh_act, 0.0});
    spec.layers.push_back({LayerKind::batch_norm, 0, Activation::linear, 0.0});
    spec.layers.push_back({LayerKind::dense, 3, Activation::linear, 0.0});
    CHECK(nn::grad_check(spec, 7) <= 1e-4);
}

TEST_CASE("gradient check: single-cell and stacked LSTM") {
    nn::NetworkSpec tiny;
    tiny.input = 2;
    tiny.layers.push_back({LayerKind::lstm, 1, Activation::linear, 0.0});
    tiny.layers.push_back({LayerKind::dense, 1, Activation::linear, 0.0});
    CHECK(nn::grad_check(tiny, 11, 5) <= 1e-4);

    nn::NetworkSpec stacked;
    stacked.input = 1;
    stacked.layers.push_back({LayerKind::lstm, 3, Activation::linear, 0.0});
    stacked.layers.push_back({LayerKind::lstm, 2, Activation::linear, 0.0});
    stacked.layers.push_back({LayerKind::dense, 1, Activation::linear, 0.0});
    CHECK(nn::grad_check(stacked, 13, 6) <= 1e-4);
}

TEST_CASE("dropout is the identity at inference") {
    nn::NetworkSpec spec;
    spec.input = 3;
    spec.layers.push_back({LayerKind::dropout, 0, Activation::linear, 0.5});
    nn::Network net(spec, Rng(1));
    nn::Batch x = {{{1.0, -2.0, 3.5}}};
    auto y = net.forward(x, false, nullptr);
    CHECK(y[0][0] == std::vector<double>{1.0, -2.0, 3.5});
}

TEST_CASE("network spec JSON round trip") {
    nn::NetworkSpec spec;
    spec.input = 7;
    spec.layers.push_back({LayerKind::lstm, 5, Activation::linear, 0.0});
    spec.layers.push_back({LayerKind::dropout, 0, Activation::linear, 0.25});
    spec.layers.push_back({LayerKind::dense, 2, Activation::relu, 0.0});
    auto back = nn::NetworkSpec::from_json(spec.to_json());
    CHECK(back.input == 7);
    REQUIRE(back.layers.size() == 3);
    CHECK(back.layers[0].kind == LayerKind::lstm);
    CHECK(back.layers[1].rate == 0.25);
    CHECK(back.layers[2].activation == Activation::relu);
}

TEST_CASE("lstm learns a constant series") {
    auto train = single_column(std::vector<double>(400, 0.5));
    auto val = single_column(std::vector<double>(120, 0.5));
    TrainConfig cfg;
    cfg.seed = 5;
    cfg.epochs = 150;
    cfg.batch_size = 2;
    cfg.learning_rate = 0.008;
    cfg.patience = 1000;
    auto det = train_lstm(train, val, cfg);
    const auto losses =
        det.provenance["epoch_losses"][0].get<std::vector<double>>();
    REQUIRE(!losses.empty());
    CHECK(losses.back() < 1e-4);
    // monotone non-increasing after epoch 2 within tolerance
    for (std::size_t i = 2; i < losses.size(); ++i)
        CHECK(losses[i] <= losses[i - 1] + 1e-6);
}

TEST_CASE("lstm training is deterministic in the seed") {
    auto train = gaussian_grid(3, 160, 2);
    auto val = gaussian_grid(4, 80, 2);
    TrainConfig cfg;
    cfg.seed = 42;
    cfg.epochs = 3;
    cfg.threads = 2;
    auto a = train_lstm(train, val, cfg);
    auto b = train_lstm(train, val, cfg);
    for (std::size_t c = 0; c < a.models.size(); ++c)
        CHECK(a.models[c]->weights_to_json() == b.models[c]->weights_to_json());
    CHECK(a.thresholds == b.thresholds);
}

TEST_CASE("lstm threshold marks about fifteen percent of training errors") {
    auto train = gaussian_grid(9, 1000, 1);
    auto val = gaussian_grid(10, 150, 1);
    TrainConfig cfg;
    cfg.seed = 7;
    cfg.epochs = 3;
    auto det = train_lstm(train, val, cfg);
    auto scores = score_lstm(train, det);
    std::size_t above = 0, scored = 0;
    for (std::size_t r = scores.warmup_steps; r < scores.scores.size(); ++r) {
        ++scored;
        if (scores.scores[r] > 1.0) ++above;
    }
    const double frac = static_cast<double>(above) / static_cast<double>(scored);
    CHECK(frac > 0.13);
    CHECK(frac < 0.17);
}

TEST_CASE("lstm flags an offset window") {
    auto train = gaussian_grid(15, 600, 1, 0.5, 0.05);
    auto val = gaussian_grid(16, 150, 1, 0.5, 0.05);
    TrainConfig cfg;
    cfg.seed = 21;
    cfg.epochs = 8;
    auto det = train_lstm(train, val, cfg);

    auto probe = gaussian_grid(17, 400, 1, 0.5, 0.05);
    for (std::size_t r = 200; r < 300; ++r) probe.at(r, 0) += 0.5;
    auto scores = score_lstm(probe, det);
    double inside = 0.0, outside = 0.0;
    std::size_t n_in = 0, n_out = 0;
    for (std::size_t r = scores.warmup_steps; r < scores.scores.size(); ++r) {
        if (r >= 200 && r < 300) {
            inside += scores.scores[r];
            ++n_in;
        } else {
            outside += scores.scores[r];
            ++n_out;
        }
    }
    CHECK(inside / static_cast<double>(n_in) > outside / static_cast<double>(n_out));
}

TEST_CASE("lstm rejects short grids") {
    auto tiny = gaussian_grid(1, 60, 1);
    auto val = gaussian_grid(2, 60, 1);
    TrainConfig cfg;
    cfg.epochs = 1;
    CHECK_THROWS_AS(train_lstm(tiny, val, cfg), TooShortError);

    auto train = gaussian_grid(3, 160, 1);
    auto det = train_lstm(train, val, cfg);
    auto probe = gaussian_grid(4, 40, 1);
    CHECK_THROWS_AS(score_lstm(probe, det), TooShortError);
    SeriesGrid renamed = gaussian_grid(5, 80, 1);
    renamed.sensors[0].id = "other";
    CHECK_THROWS_AS(score_lstm(renamed, det), MissingSpecError);
}

TEST_CASE("lstm checkpoint round trip preserves scores") {
    auto train = gaussian_grid(31, 200, 1);
    auto val = gaussian_grid(32, 80, 1);
    TrainConfig cfg;
    cfg.seed = 3;
    cfg.epochs = 2;
    auto det = train_lstm(train, val, cfg);
    auto back = lstm_detector_from_json(lstm_detector_to_json(det));
    auto probe = gaussian_grid(33, 120, 1);
    auto a = score_lstm(probe, det);
    auto b = score_lstm(probe, back);
    CHECK(a.scores == b.scores);
}

TEST_CASE("autoencoder compresses correlated sensors") {
    SeriesGrid train;
    train.interval = 30;
    train.sensors = {{"a", SensorKind::temperature, "", false},
                     {"b", SensorKind::temperature, "", false}};
    Rng rng(44);
    for (int r = 0; r < 600; ++r) {
        const double v = rng.uniform01();
        train.values.push_back(v);
        train.values.push_back(v);  // perfectly correlated
    }
    SeriesGrid val;
    val.interval = 30;
    val.sensors = train.sensors;
    for (int r = 0; r < 150; ++r) {
        const double v = rng.uniform01();
        val.values.push_back(v);
        val.values.push_back(v);
    }
    TrainConfig cfg;
    cfg.seed = 12;
    cfg.epochs = 30;
    cfg.batch_size = 32;
    auto det = train_autoencoder(train, val, cfg);
    const auto losses = det.provenance["epoch_losses"].get<std::vector<double>>();
    REQUIRE(losses.size() >= 2);
    // Validation reconstruction error well below the initial training error.
    double verr = 0.0;
    auto scores = score_autoencoder(val, det);
    for (double s : scores.scores) verr += s * det.threshold;  // undo normalization
    verr /= static_cast<double>(val.rows());
    CHECK(verr < losses.front() / 10.0);
}

TEST_CASE("autoencoder decoder mirrors the encoder") {
    auto train = gaussian_grid(51, 120, 5);
    auto val = gaussian_grid(52, 60, 5);
    TrainConfig cfg;
    cfg.epochs = 1;
    auto det = train_autoencoder(train, val, cfg);
    const auto& layers = det.model->spec().layers;
    std::vector<std::size_t> dense_sizes;
    for (const auto& l : layers)
        if (l.kind == LayerKind::dense) dense_sizes.push_back(l.size);
    CHECK(dense_sizes == std::vector<std::size_t>{64, 32, 16, 8, 16, 32, 64, 5});
}

TEST_CASE("autoencoder is deterministic and calibrated near fifteen percent") {
    auto train = gaussian_grid(61, 800, 4);
    auto val = gaussian_grid(62, 200, 4);
    TrainConfig cfg;
    cfg.seed = 9;
    cfg.epochs = 5;
    cfg.batch_size = 32;
    auto a = train_autoencoder(train, val, cfg);
    auto b = train_autoencoder(train, val, cfg);
    CHECK(a.model->weights_to_json() == b.model->weights_to_json());
    CHECK(a.threshold == b.threshold);

    auto scores = score_autoencoder(train, a);
    std::size_t above = 0;
    for (double s : scores.scores)
        if (s > 1.0) ++above;
    const double frac = static_cast<double>(above) / static_cast<double>(train.rows());
    CHECK(frac > 0.13);
    CHECK(frac < 0.17);
}

TEST_CASE("autoencoder skips all-missing rows and validates width") {
    auto train = gaussian_grid(71, 300, 3);
    auto val = gaussian_grid(72, 100, 3);
    TrainConfig cfg;
    cfg.epochs = 2;
    auto det = train_autoencoder(train, val, cfg);

    auto probe = gaussian_grid(73, 50, 3);
    for (std::size_t c = 0; c < 3; ++c) probe.at(10, c) = kMissing;
    auto scores = score_autoencoder(probe, det);
    CHECK(scores.scores[10] == 0.0);
    REQUIRE(scores.skipped_steps.size() == 1);
    CHECK(scores.skipped_steps[0] == 10);

    auto wrong = gaussian_grid(74, 50, 4);
    CHECK_THROWS_AS(score_autoencoder(wrong, det), MissingSpecError);
}

TEST_CASE("autoencoder checkpoint round trip preserves scores") {
    auto train = gaussian_grid(81, 300, 3);
    auto val = gaussian_grid(82, 100, 3);
    TrainConfig cfg;
    cfg.seed = 2;
    cfg.epochs = 2;
    auto det = train_autoencoder(train, val, cfg);
    auto back = autoencoder_from_json(autoencoder_to_json(det));
    auto probe = gaussian_grid(83, 80, 3);
    auto a = score_autoencoder(probe, det);
    auto b = score_autoencoder(probe, back);
    CHECK(a.scores == b.scores);
}

TEST_CASE("scoring the same grid twice is identical (frozen batch norm)") {
    auto train = gaussian_grid(91, 300, 3);
    auto val = gaussian_grid(92, 100, 3);
    TrainConfig cfg;
    cfg.epochs = 2;
    auto det = train_autoencoder(train, val, cfg);
    auto probe = gaussian_grid(93, 100, 3);
    auto a = score_autoencoder(probe, det);
    auto b = score_autoencoder(probe, det);
    CHECK(a.scores == b.scores);
    for (double s : a.scores) CHECK(s >= 0.0);
}
