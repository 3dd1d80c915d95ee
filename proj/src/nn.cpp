#include "sentinel/nn.hpp"

#include <algorithm>
#include <cmath>

#include "sentinel/errors.hpp"

namespace sentinel::nn {

namespace {

constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.9;

double activate(Activation a, double v) {
    switch (a) {
        case Activation::linear: return v;
        case Activation::relu: return v > 0.0 ? v : 0.0;
        case Activation::tanh_act: return std::tanh(v);
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-v));
    }
    return v;
}

/// Derivative expressed through the activation output y.
double activate_grad(Activation a, double y) {
    switch (a) {
        case Activation::linear: return 1.0;
        case Activation::relu: return y > 0.0 ? 1.0 : 0.0;
        case Activation::tanh_act: return 1.0 - y * y;
        case Activation::sigmoid: return y * (1.0 - y);
    }
    return 1.0;
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

/// Uniform fan-in initialization: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
double init_weight(Rng& rng, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
    return rng.uniform(-bound, bound);
}

class DenseLayer final : public Layer {
  public:
    DenseLayer(std::size_t in, std::size_t out, Activation act, Rng& rng)
        : in_(in), out_(out), act_(act) {
        params_.resize(out * in + out);
        grads_.assign(params_.size(), 0.0);
        for (std::size_t i = 0; i < out * in; ++i) params_[i] = init_weight(rng, in);
    }

    LayerKind kind() const override { return LayerKind::dense; }
    std::size_t out_width(std::size_t) const override { return out_; }

    Batch forward(const Batch& x, bool, Rng*) override {
        x_ = x;
        Batch y(x.size());
        for (std::size_t b = 0; b < x.size(); ++b) {
            y[b].resize(x[b].size());
            for (std::size_t t = 0; t < x[b].size(); ++t) {
                y[b][t].resize(out_);
                for (std::size_t o = 0; o < out_; ++o) {
                    double s = params_[out_ * in_ + o];  // bias
                    const double* w = &params_[o * in_];
                    for (std::size_t i = 0; i < in_; ++i) s += w[i] * x[b][t][i];
                    y[b][t][o] = activate(act_, s);
                }
            }
        }
        y_ = y;
        return y;
    }

    Batch backward(const Batch& dy) override {
        Batch dx(dy.size());
        for (std::size_t b = 0; b < dy.size(); ++b) {
            dx[b].resize(dy[b].size());
            for (std::size_t t = 0; t < dy[b].size(); ++t) {
                dx[b][t].assign(in_, 0.0);
                for (std::size_t o = 0; o < out_; ++o) {
                    const double d = dy[b][t][o] * activate_grad(act_, y_[b][t][o]);
                    grads_[out_ * in_ + o] += d;
                    double* gw = &grads_[o * in_];
                    const double* w = &params_[o * in_];
                    for (std::size_t i = 0; i < in_; ++i) {
                        gw[i] += d * x_[b][t][i];
                        dx[b][t][i] += d * w[i];
                    }
                }
            }
        }
        return dx;
    }

    std::vector<double>& params() override { return params_; }
    std::vector<double>& grads() override { return grads_; }

  private:
    std::size_t in_, out_;
    Activation act_;
    std::vector<double> params_, grads_;
    Batch x_, y_;
};

class LstmLayer final : public Layer {
  public:
    LstmLayer(std::size_t in, std::size_t hidden, Rng& rng) : in_(in), h_(hidden) {
        const std::size_t g = 4 * h_;
        params_.resize(g * in_ + g * h_ + g);
        grads_.assign(params_.size(), 0.0);
        for (std::size_t i = 0; i < g * in_; ++i) params_[i] = init_weight(rng, in_);
        for (std::size_t i = 0; i < g * h_; ++i) params_[g * in_ + i] = init_weight(rng, h_);
        // Forget-gate biases start at 1 so early gradients flow through time.
        for (std::size_t i = 0; i < h_; ++i) params_[g * in_ + g * h_ + h_ + i] = 1.0;
    }

    LayerKind kind() const override { return LayerKind::lstm; }
    std::size_t out_width(std::size_t) const override { return h_; }

    Batch forward(const Batch& x, bool, Rng*) override {
        x_ = x;
        const std::size_t g = 4 * h_;
        const double* wx = params_.data();
        const double* wh = params_.data() + g * in_;
        const double* bias = params_.data() + g * in_ + g * h_;

        gates_.assign(x.size(), {});
        cells_.assign(x.size(), {});
        Batch y(x.size());
        for (std::size_t b = 0; b < x.size(); ++b) {
            const std::size_t steps = x[b].size();
            gates_[b].assign(steps, std::vector<double>(g));
            cells_[b].assign(steps, std::vector<double>(h_));
            y[b].assign(steps, std::vector<double>(h_));
            std::vector<double> h_prev(h_, 0.0), c_prev(h_, 0.0);
            for (std::size_t t = 0; t < steps; ++t) {
                auto& gate = gates_[b][t];
                for (std::size_t j = 0; j < g; ++j) {
                    double s = bias[j];
                    const double* row = wx + j * in_;
                    for (std::size_t i = 0; i < in_; ++i) s += row[i] * x[b][t][i];
                    const double* hrow = wh + j * h_;
                    for (std::size_t i = 0; i < h_; ++i) s += hrow[i] * h_prev[i];
                    gate[j] = s;
                }
                for (std::size_t u = 0; u < h_; ++u) {
                    const double gi = sigmoid(gate[u]);
                    const double gf = sigmoid(gate[h_ + u]);
                    const double gg = std::tanh(gate[2 * h_ + u]);
                    const double go = sigmoid(gate[3 * h_ + u]);
                    gate[u] = gi;
                    gate[h_ + u] = gf;
                    gate[2 * h_ + u] = gg;
                    gate[3 * h_ + u] = go;
                    const double c = gf * c_prev[u] + gi * gg;
                    cells_[b][t][u] = c;
                    y[b][t][u] = go * std::tanh(c);
                }
                h_prev = y[b][t];
                c_prev = cells_[b][t];
            }
        }
        y_ = y;
        return y;
    }

    Batch backward(const Batch& dy) override {
        const std::size_t g = 4 * h_;
        const double* wx = params_.data();
        const double* wh = params_.data() + g * in_;
        double* gwx = grads_.data();
        double* gwh = grads_.data() + g * in_;
        double* gb = grads_.data() + g * in_ + g * h_;

        Batch dx(dy.size());
        for (std::size_t b = 0; b < dy.size(); ++b) {
            const std::size_t steps = dy[b].size();
            dx[b].assign(steps, std::vector<double>(in_, 0.0));
            std::vector<double> dh_next(h_, 0.0), dc_next(h_, 0.0);
            for (std::size_t ti = steps; ti-- > 0;) {
                const auto& gate = gates_[b][ti];
                std::vector<double> dgate(g);
                const auto* c_prev =
                    ti > 0 ? cells_[b][ti - 1].data() : nullptr;
                for (std::size_t u = 0; u < h_; ++u) {
                    const double dh = dy[b][ti][u] + dh_next[u];
                    const double tc = std::tanh(cells_[b][ti][u]);
                    const double go = gate[3 * h_ + u];
                    double dc = dh * go * (1.0 - tc * tc) + dc_next[u];
                    const double gi = gate[u];
                    const double gf = gate[h_ + u];
                    const double gg = gate[2 * h_ + u];
                    const double cp = c_prev ? c_prev[u] : 0.0;
                    dgate[u] = dc * gg * gi * (1.0 - gi);
                    dgate[h_ + u] = dc * cp * gf * (1.0 - gf);
                    dgate[2 * h_ + u] = dc * gi * (1.0 - gg * gg);
                    dgate[3 * h_ + u] = dh * tc * go * (1.0 - go);
                    dc_next[u] = dc * gf;
                }
                std::fill(dh_next.begin(), dh_next.end(), 0.0);
                const auto* h_prev = ti > 0 ? y_[b][ti - 1].data() : nullptr;
                for (std::size_t j = 0; j < g; ++j) {
                    const double d = dgate[j];
                    gb[j] += d;
                    double* grow = gwx + j * in_;
                    const double* row = wx + j * in_;
                    for (std::size_t i = 0; i < in_; ++i) {
                        grow[i] += d * x_[b][ti][i];
                        dx[b][ti][i] += d * row[i];
                    }
                    double* ghrow = gwh + j * h_;
                    const double* hrow = wh + j * h_;
                    for (std::size_t i = 0; i < h_; ++i) {
                        if (h_prev) ghrow[i] += d * h_prev[i];
                        dh_next[i] += d * hrow[i];
                    }
                }
            }
        }
        return dx;
    }

    std::vector<double>& params() override { return params_; }
    std::vector<double>& grads() override { return grads_; }

  private:
    std::size_t in_, h_;
    std::vector<double> params_, grads_;
    Batch x_, y_;
    std::vector<std::vector<std::vector<double>>> gates_, cells_;
};

class BatchNormLayer final : public Layer {
  public:
    explicit BatchNormLayer(std::size_t width) : d_(width) {
        params_.assign(2 * d_, 0.0);
        for (std::size_t i = 0; i < d_; ++i) params_[i] = 1.0;  // gamma
        grads_.assign(params_.size(), 0.0);
        running_mean_.assign(d_, 0.0);
        running_var_.assign(d_, 1.0);
    }

    LayerKind kind() const override { return LayerKind::batch_norm; }
    std::size_t out_width(std::size_t in) const override { return in; }

    Batch forward(const Batch& x, bool training, Rng*) override {
        x_ = x;
        training_ = training;
        if (training) {
            mu_.assign(d_, 0.0);
            var_.assign(d_, 0.0);
            count_ = 0;
            for (const auto& seq : x)
                for (const auto& v : seq) {
                    ++count_;
                    for (std::size_t j = 0; j < d_; ++j) mu_[j] += v[j];
                }
            for (std::size_t j = 0; j < d_; ++j) mu_[j] /= static_cast<double>(count_);
            for (const auto& seq : x)
                for (const auto& v : seq)
                    for (std::size_t j = 0; j < d_; ++j) {
                        const double c = v[j] - mu_[j];
                        var_[j] += c * c;
                    }
            for (std::size_t j = 0; j < d_; ++j) {
                var_[j] /= static_cast<double>(count_);
                running_mean_[j] =
                    kBnMomentum * running_mean_[j] + (1.0 - kBnMomentum) * mu_[j];
                running_var_[j] =
                    kBnMomentum * running_var_[j] + (1.0 - kBnMomentum) * var_[j];
            }
        } else {
            mu_ = running_mean_;
            var_ = running_var_;
        }

        xhat_ = x;
        Batch y = x;
        for (std::size_t b = 0; b < x.size(); ++b)
            for (std::size_t t = 0; t < x[b].size(); ++t)
                for (std::size_t j = 0; j < d_; ++j) {
                    const double xh = (x[b][t][j] - mu_[j]) / std::sqrt(var_[j] + kBnEps);
                    xhat_[b][t][j] = xh;
                    y[b][t][j] = params_[j] * xh + params_[d_ + j];
                }
        return y;
    }

    Batch backward(const Batch& dy) override {
        Batch dx = dy;
        if (!training_) {
            for (std::size_t b = 0; b < dy.size(); ++b)
                for (std::size_t t = 0; t < dy[b].size(); ++t)
                    for (std::size_t j = 0; j < d_; ++j) {
                        grads_[j] += dy[b][t][j] * xhat_[b][t][j];
                        grads_[d_ + j] += dy[b][t][j];
                        dx[b][t][j] = dy[b][t][j] * params_[j] /
                                      std::sqrt(var_[j] + kBnEps);
                    }
            return dx;
        }

        const double m = static_cast<double>(count_);
        std::vector<double> sum_dxhat(d_, 0.0), sum_dxhat_xhat(d_, 0.0);
        for (std::size_t b = 0; b < dy.size(); ++b)
            for (std::size_t t = 0; t < dy[b].size(); ++t)
                for (std::size_t j = 0; j < d_; ++j) {
                    const double dxh = dy[b][t][j] * params_[j];
                    sum_dxhat[j] += dxh;
                    sum_dxhat_xhat[j] += dxh * xhat_[b][t][j];
                    grads_[j] += dy[b][t][j] * xhat_[b][t][j];
                    grads_[d_ + j] += dy[b][t][j];
                }
        for (std::size_t b = 0; b < dy.size(); ++b)
            for (std::size_t t = 0; t < dy[b].size(); ++t)
                for (std::size_t j = 0; j < d_; ++j) {
                    const double dxh = dy[b][t][j] * params_[j];
                    dx[b][t][j] = (dxh - sum_dxhat[j] / m -
                                   xhat_[b][t][j] * sum_dxhat_xhat[j] / m) /
                                  std::sqrt(var_[j] + kBnEps);
                }
        return dx;
    }

    std::vector<double>& params() override { return params_; }
    std::vector<double>& grads() override { return grads_; }

    nlohmann::json state() const {
        return {{"running_mean", running_mean_}, {"running_var", running_var_}};
    }
    void set_state(const nlohmann::json& j) {
        running_mean_ = j.at("running_mean").get<std::vector<double>>();
        running_var_ = j.at("running_var").get<std::vector<double>>();
    }

  private:
    std::size_t d_;
    std::vector<double> params_, grads_;
    std::vector<double> running_mean_, running_var_, mu_, var_;
    Batch x_, xhat_;
    bool training_ = false;
    std::size_t count_ = 0;
};

class DropoutLayer final : public Layer {
  public:
    explicit DropoutLayer(double rate) : rate_(rate) {}

    LayerKind kind() const override { return LayerKind::dropout; }
    std::size_t out_width(std::size_t in) const override { return in; }

    Batch forward(const Batch& x, bool training, Rng* rng) override {
        if (!training || rate_ <= 0.0 || rng == nullptr) {
            mask_.clear();
            return x;
        }
        // Inverted dropout: surviving units are scaled so inference is identity.
        const double keep = 1.0 - rate_;
        mask_ = x;
        Batch y = x;
        for (std::size_t b = 0; b < x.size(); ++b)
            for (std::size_t t = 0; t < x[b].size(); ++t)
                for (std::size_t j = 0; j < x[b][t].size(); ++j) {
                    const double m = rng->uniform01() < keep ? 1.0 / keep : 0.0;
                    mask_[b][t][j] = m;
                    y[b][t][j] = x[b][t][j] * m;
                }
        return y;
    }

    Batch backward(const Batch& dy) override {
        if (mask_.empty()) return dy;
        Batch dx = dy;
        for (std::size_t b = 0; b < dy.size(); ++b)
            for (std::size_t t = 0; t < dy[b].size(); ++t)
                for (std::size_t j = 0; j < dy[b][t].size(); ++j)
                    dx[b][t][j] = dy[b][t][j] * mask_[b][t][j];
        return dx;
    }

    std::vector<double>& params() override { return empty_; }
    std::vector<double>& grads() override { return empty_; }

  private:
    double rate_;
    Batch mask_;
    std::vector<double> empty_;
};

const char* kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::dense: return "dense";
        case LayerKind::lstm: return "lstm";
        case LayerKind::batch_norm: return "batch_norm";
        case LayerKind::dropout: return "dropout";
    }
    return "dense";
}

LayerKind kind_from(const std::string& s) {
    if (s == "dense") return LayerKind::dense;
    if (s == "lstm") return LayerKind::lstm;
    if (s == "batch_norm") return LayerKind::batch_norm;
    if (s == "dropout") return LayerKind::dropout;
    throw SchemaError("unknown layer kind '" + s + "'");
}

const char* act_name(Activation a) {
    switch (a) {
        case Activation::linear: return "linear";
        case Activation::relu: return "relu";
        case Activation::tanh_act: return "tanh";
        case Activation::sigmoid: return "sigmoid";
    }
    return "linear";
}

Activation act_from(const std::string& s) {
    if (s == "linear") return Activation::linear;
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh_act;
    if (s == "sigmoid") return Activation::sigmoid;
    throw SchemaError("unknown activation '" + s + "'");
}

}  // namespace

nlohmann::json NetworkSpec::to_json() const {
    nlohmann::json j;
    j["input"] = input;
    j["loss"] = "mse";
    j["layers"] = nlohmann::json::array();
    for (const auto& l : layers)
        j["layers"].push_back({{"kind", kind_name(l.kind)},
                               {"size", l.size},
                               {"activation", act_name(l.activation)},
                               {"rate", l.rate}});
    return j;
}

NetworkSpec NetworkSpec::from_json(const nlohmann::json& j) {
    NetworkSpec spec;
    spec.input = j.at("input").get<std::size_t>();
    for (const auto& lj : j.at("layers")) {
        LayerSpec l;
        l.kind = kind_from(lj.at("kind").get<std::string>());
        l.size = lj.at("size").get<std::size_t>();
        l.activation = act_from(lj.at("activation").get<std::string>());
        l.rate = lj.at("rate").get<double>();
        spec.layers.push_back(l);
    }
    return spec;
}

Network::Network(const NetworkSpec& spec, Rng init_rng) : spec_(spec) {
    if (spec.input == 0) throw ConfigError("network input width must be positive");
    std::size_t width = spec.input;
    for (const auto& l : spec.layers) {
        switch (l.kind) {
            case LayerKind::dense:
                if (l.size == 0) throw ConfigError("dense layer size must be positive");
                layers_.push_back(std::make_unique<DenseLayer>(width, l.size, l.activation,
                                                               init_rng));
                break;
            case LayerKind::lstm:
                if (l.size == 0) throw ConfigError("lstm layer size must be positive");
                layers_.push_back(std::make_unique<LstmLayer>(width, l.size, init_rng));
                break;
            case LayerKind::batch_norm:
                layers_.push_back(std::make_unique<BatchNormLayer>(width));
                break;
            case LayerKind::dropout:
                if (l.rate < 0.0 || l.rate >= 1.0)
                    throw ConfigError("dropout rate must lie in [0,1)");
                layers_.push_back(std::make_unique<DropoutLayer>(l.rate));
                break;
        }
        width = layers_.back()->out_width(width);
    }
}

Batch Network::forward(const Batch& x, bool training, Rng* dropout_rng) {
    Batch cur = x;
    for (auto& l : layers_) cur = l->forward(cur, training, dropout_rng);
    return cur;
}

std::vector<Layer*> Network::layers() {
    std::vector<Layer*> out;
    for (auto& l : layers_) out.push_back(l.get());
    return out;
}

void Network::zero_grads() {
    for (auto& l : layers_) std::fill(l->grads().begin(), l->grads().end(), 0.0);
}

namespace {

/// Masked MSE over the last timestep; fills dy for backward when requested.
double last_step_mse(const Batch& y, const std::vector<std::vector<double>>& target,
                     const std::vector<std::vector<double>>& mask, Batch* dy) {
    double total = 0.0;
    double n = 0.0;
    for (std::size_t b = 0; b < y.size(); ++b)
        for (std::size_t j = 0; j < target[b].size(); ++j)
            if (mask[b][j] != 0.0) n += 1.0;
    const double denom = std::max(n, 1.0);

    if (dy) {
        *dy = y;
        for (auto& seq : *dy)
            for (auto& v : seq) std::fill(v.begin(), v.end(), 0.0);
    }
    for (std::size_t b = 0; b < y.size(); ++b) {
        const std::size_t last = y[b].size() - 1;
        for (std::size_t j = 0; j < target[b].size(); ++j) {
            if (mask[b][j] == 0.0) continue;
            const double d = y[b][last][j] - target[b][j];
            total += d * d;
            if (dy) (*dy)[b][last][j] = 2.0 * d / denom;
        }
    }
    return total / denom;
}

}  // namespace

double Network::train_step(const Batch& x, const std::vector<std::vector<double>>& target,
                           const std::vector<std::vector<double>>& mask, Rng* dropout_rng) {
    zero_grads();
    Batch y = forward(x, true, dropout_rng);
    Batch dy;
    const double loss_value = last_step_mse(y, target, mask, &dy);
    for (std::size_t i = layers_.size(); i-- > 0;) dy = layers_[i]->backward(dy);
    return loss_value;
}

double Network::loss(const Batch& x, const std::vector<std::vector<double>>& target,
                     const std::vector<std::vector<double>>& mask) {
    Batch y = forward(x, false, nullptr);
    return last_step_mse(y, target, mask, nullptr);
}

namespace {

double sequence_mse(const Batch& y, const Batch& target, const Batch& mask, Batch* dy) {
    double n = 0.0;
    for (std::size_t b = 0; b < y.size(); ++b)
        for (std::size_t t = 0; t < y[b].size(); ++t)
            for (std::size_t j = 0; j < y[b][t].size(); ++j)
                if (mask[b][t][j] != 0.0) n += 1.0;
    const double denom = std::max(n, 1.0);

    if (dy) {
        *dy = y;
        for (auto& seq : *dy)
            for (auto& v : seq) std::fill(v.begin(), v.end(), 0.0);
    }
    double total = 0.0;
    for (std::size_t b = 0; b < y.size(); ++b)
        for (std::size_t t = 0; t < y[b].size(); ++t)
            for (std::size_t j = 0; j < y[b][t].size(); ++j) {
                if (mask[b][t][j] == 0.0) continue;
                const double d = y[b][t][j] - target[b][t][j];
                total += d * d;
                if (dy) (*dy)[b][t][j] = 2.0 * d / denom;
            }
    return total / denom;
}

}  // namespace

double Network::train_step_sequence(const Batch& x, const Batch& target, const Batch& mask,
                                    Rng* dropout_rng) {
    zero_grads();
    Batch y = forward(x, true, dropout_rng);
    Batch dy;
    const double loss_value = sequence_mse(y, target, mask, &dy);
    for (std::size_t i = layers_.size(); i-- > 0;) dy = layers_[i]->backward(dy);
    return loss_value;
}

double Network::loss_sequence(const Batch& x, const Batch& target, const Batch& mask) {
    Batch y = forward(x, false, nullptr);
    return sequence_mse(y, target, mask, nullptr);
}

nlohmann::json Network::weights_to_json() const {
    nlohmann::json j;
    j["spec"] = spec_.to_json();
    j["layers"] = nlohmann::json::array();
    for (const auto& l : layers_) {
        nlohmann::json lj;
        lj["params"] = const_cast<Layer&>(*l).params();
        if (auto* bn = dynamic_cast<BatchNormLayer*>(l.get())) lj["state"] = bn->state();
        j["layers"].push_back(std::move(lj));
    }
    return j;
}

void Network::weights_from_json(const nlohmann::json& j) {
    const auto& lj = j.at("layers");
    if (lj.size() != layers_.size()) throw SchemaError("checkpoint layer count mismatch");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        auto p = lj[i].at("params").get<std::vector<double>>();
        if (p.size() != layers_[i]->params().size())
            throw SchemaError("checkpoint parameter count mismatch");
        layers_[i]->params() = std::move(p);
        if (auto* bn = dynamic_cast<BatchNormLayer*>(layers_[i].get()))
            bn->set_state(lj[i].at("state"));
    }
}

void Adam::step(Network& net) {
    auto layers = net.layers();
    if (m_.empty()) {
        m_.resize(layers.size());
        v_.resize(layers.size());
        for (std::size_t i = 0; i < layers.size(); ++i) {
            m_[i].assign(layers[i]->params().size(), 0.0);
            v_[i].assign(layers[i]->params().size(), 0.0);
        }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < layers.size(); ++i) {
        auto& p = layers[i]->params();
        auto& g = layers[i]->grads();
        for (std::size_t k = 0; k < p.size(); ++k) {
            m_[i][k] = beta1_ * m_[i][k] + (1.0 - beta1_) * g[k];
            v_[i][k] = beta2_ * v_[i][k] + (1.0 - beta2_) * g[k] * g[k];
            p[k] -= lr_ * (m_[i][k] / bc1) / (std::sqrt(v_[i][k] / bc2) + eps_);
        }
    }
}

double grad_check(const NetworkSpec& spec, std::uint64_t seed, std::size_t seq_len) {
    Network net(spec, Rng::derive(seed, "grad-check-init"));
    Rng data_rng = Rng::derive(seed, "grad-check-data");

    std::size_t out_width = spec.input;
    {
        std::size_t width = spec.input;
        for (const auto& l : spec.layers) {
            if (l.kind == LayerKind::dense || l.kind == LayerKind::lstm) width = l.size;
            out_width = width;
        }
    }

    const std::size_t batch = 2;
    Batch x(batch);
    std::vector<std::vector<double>> target(batch), mask(batch);
    for (std::size_t b = 0; b < batch; ++b) {
        x[b].assign(seq_len, std::vector<double>(spec.input));
        for (auto& v : x[b])
            for (auto& e : v) e = data_rng.gauss();
        target[b].resize(out_width);
        for (auto& e : target[b]) e = data_rng.gauss();
        mask[b].assign(out_width, 1.0);
    }

    // Analytic gradients: inference-mode forward (no dropout, frozen batch
    // norm) followed by a full backward pass.
    net.zero_grads();
    Batch y = net.forward(x, false, nullptr);
    Batch dy;
    last_step_mse(y, target, mask, &dy);
    auto layers = net.layers();
    for (std::size_t i = layers.size(); i-- > 0;) dy = layers[i]->backward(dy);

    std::vector<std::vector<double>> analytic;
    for (auto* l : layers) analytic.push_back(l->grads());

    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        auto& p = layers[i]->params();
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double keep = p[k];
            p[k] = keep + h;
            const double hi = net.loss(x, target, mask);
            p[k] = keep - h;
            const double lo = net.loss(x, target, mask);
            p[k] = keep;
            const double numeric = (hi - lo) / (2.0 * h);
            const double g = analytic[i][k];
            if (!std::isfinite(g) || !std::isfinite(numeric))
                throw NumericalError("non-finite gradient in grad_check");
            const double err = std::fabs(g - numeric) /
                               std::max(1.0, std::fabs(g) + std::fabs(numeric));
            worst = std::max(worst, err);
        }
    }
    return worst;
}

}  // namespace sentinel::nn
