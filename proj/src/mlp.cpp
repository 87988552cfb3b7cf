#include "gaussocc/mlp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace gaussocc {

Mlp Mlp::seeded(const std::vector<int>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2) {
        throw std::invalid_argument("Mlp: need at least input and output sizes");
    }
    Mlp net;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
        const int fan_in = layer_sizes[i];
        const int fan_out = layer_sizes[i + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        net.weights.push_back(
            Eigen::MatrixXd::NullaryExpr(fan_out, fan_in, [&] { return dist(rng); }));
        net.biases.push_back(
            Eigen::VectorXd::NullaryExpr(fan_out, [&] { return dist(rng); }));
    }
    return net;
}

Mlp Mlp::zeros(const std::vector<int>& layer_sizes) {
    Mlp net;
    for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
        net.weights.push_back(Eigen::MatrixXd::Zero(layer_sizes[i + 1], layer_sizes[i]));
        net.biases.push_back(Eigen::VectorXd::Zero(layer_sizes[i + 1]));
    }
    return net;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
    Eigen::VectorXd h = x;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        h = weights[l] * h + biases[l];
        if (l + 1 < weights.size()) {
            h = h.array().tanh();
        }
    }
    return h;
}

Eigen::VectorXd Mlp::input_gradient(const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& grad_out) const {
    std::vector<Eigen::VectorXd> acts;  // post-activation of each hidden layer
    Eigen::VectorXd h = x;
    for (std::size_t l = 0; l + 1 < weights.size(); ++l) {
        h = (weights[l] * h + biases[l]).array().tanh();
        acts.push_back(h);
    }
    Eigen::VectorXd g = weights.back().transpose() * grad_out;
    for (std::size_t l = weights.size() - 1; l-- > 0;) {
        g = g.cwiseProduct(Eigen::VectorXd::Ones(g.size()) - acts[l].cwiseProduct(acts[l]));
        g = weights[l].transpose() * g;
    }
    return g;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    const double m = logits.maxCoeff();
    Eigen::VectorXd e = (logits.array() - m).exp();
    return e / e.sum();
}

Eigen::VectorXd softmax_pullback(const Eigen::VectorXd& weights, const Eigen::VectorXd& g) {
    const double dot = weights.dot(g);
    return weights.cwiseProduct(g - Eigen::VectorXd::Constant(g.size(), dot));
}

}  // namespace gaussocc
