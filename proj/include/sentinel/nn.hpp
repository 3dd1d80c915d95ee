#ifndef SENTINEL_NN_HPP
#define SENTINEL_NN_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentinel/rng.hpp"

namespace sentinel::nn {

/// batch -> time -> features
using Batch = std::vector<std::vector<std::vector<double>>>;

enum class Activation { linear, relu, tanh_act, sigmoid };

enum class LayerKind { dense, lstm, batch_norm, dropout };

struct LayerSpec {
    LayerKind kind = LayerKind::dense;
    std::size_t size = 0;             // output width (ignored for batch_norm/dropout)
    Activation activation = Activation::linear;
    double rate = 0.0;                // dropout rate
};

/// Architecture description: input width plus an ordered layer list. LSTM
/// layers must precede any dense layer; the loss is always mean squared error.
struct NetworkSpec {
    std::size_t input = 0;
    std::vector<LayerSpec> layers;

    nlohmann::json to_json() const;
    static NetworkSpec from_json(const nlohmann::json& j);
};

class Layer {
  public:
    virtual ~Layer() = default;
    virtual LayerKind kind() const = 0;
    virtual std::size_t out_width(std::size_t in_width) const = 0;
    /// Forward over a batch of sequences; caches activations for backward.
    virtual Batch forward(const Batch& x, bool training, Rng* rng) = 0;
    /// Gradient of the loss w.r.t. this layer's input; accumulates parameter
    /// gradients internally.
    virtual Batch backward(const Batch& dy) = 0;
    virtual std::vector<double>& params() = 0;
    virtual std::vector<double>& grads() = 0;
};

class Network {
  public:
    explicit Network(const NetworkSpec& spec, Rng init_rng);

    const NetworkSpec& spec() const { return spec_; }

    /// Output sequence of the final layer for every batch element.
    Batch forward(const Batch& x, bool training = false, Rng* dropout_rng = nullptr);

    /// Masked MSE over the last timestep of each sequence; entries with
    /// mask 0 contribute nothing. Returns the loss and runs backward.
    double train_step(const Batch& x, const std::vector<std::vector<double>>& target,
                      const std::vector<std::vector<double>>& mask, Rng* dropout_rng);

    /// Loss without a parameter update (dropout off, batch norm frozen).
    double loss(const Batch& x, const std::vector<std::vector<double>>& target,
                const std::vector<std::vector<double>>& mask);

    /// Masked MSE over every timestep (targets shaped like the output batch);
    /// used by sequence models that emit one prediction per step.
    double train_step_sequence(const Batch& x, const Batch& target, const Batch& mask,
                               Rng* dropout_rng);
    double loss_sequence(const Batch& x, const Batch& target, const Batch& mask);

    std::vector<Layer*> layers();
    void zero_grads();

    nlohmann::json weights_to_json() const;
    void weights_from_json(const nlohmann::json& j);

  private:
    NetworkSpec spec_;
    std::vector<std::unique_ptr<Layer>> layers_;
};

/// Adaptive-moments optimizer over all parameters of a network.
class Adam {
  public:
    explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                  double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(Network& net);
    void set_learning_rate(double lr) { lr_ = lr; }

  private:
    double lr_, beta1_, beta2_, eps_;
    std::size_t t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

/**
 * Maximum relative error between analytic gradients and central finite
 * differences (h = 1e-5) on a random input/target pair. Dropout is disabled
 * and batch norm runs in inference mode. Throws NumericalError on non-finite
 * gradients.
 */
double grad_check(const NetworkSpec& spec, std::uint64_t seed, std::size_t seq_len = 1);

}  // namespace sentinel::nn

#endif
