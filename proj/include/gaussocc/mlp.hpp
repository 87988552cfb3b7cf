#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace gaussocc {

/// Small fully-connected net with tanh hidden layers and a linear output.
/// Weights are seeded uniform in +-1/sqrt(fan_in) so every transcript is
/// reproducible.
struct Mlp {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    static Mlp seeded(const std::vector<int>& layer_sizes, std::uint64_t seed);
    static Mlp zeros(const std::vector<int>& layer_sizes);

    int input_dim() const { return static_cast<int>(weights.front().cols()); }
    int output_dim() const { return static_cast<int>(weights.back().rows()); }

    Eigen::VectorXd forward(const Eigen::VectorXd& x) const;

    /// d(grad_out . output)/d(input) via backprop.
    Eigen::VectorXd input_gradient(const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& grad_out) const;
};

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

/// Pullback through softmax: given g = dL/dw returns dL/dlogits.
Eigen::VectorXd softmax_pullback(const Eigen::VectorXd& weights, const Eigen::VectorXd& g);

}  // namespace gaussocc
