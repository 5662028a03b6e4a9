// Copyright 2026 The gentrify authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "gentrify/common.hpp"

namespace gentrify::nn {

/// Probabilities are clipped to [kProbEps, 1-kProbEps] before taking logs.
inline constexpr double kProbEps = 1e-7;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double clip_probability(double p) {
    return std::min(std::max(p, kProbEps), 1.0 - kProbEps);
}

/// -[y log p + (1-y) log(1-p)] with eps clipping; >= 0 always.
inline double binary_cross_entropy(double p, int y) {
    const double pc = clip_probability(p);
    return -(y == 1 ? std::log(pc) : std::log(1.0 - pc));
}

/// Uniform Xavier/Glorot init in +-sqrt(6 / (fan_in + fan_out)).
void xavier_uniform(Eigen::MatrixXd& m, double fan_in, double fan_out, Rng& rng);

/// Uniform He/Kaiming init in +-sqrt(6 / fan_in), for ReLU layers.
void he_uniform(Eigen::MatrixXd& m, double fan_in, Rng& rng);

/// Parameter tensors addressed as an ordered pointer list; the order defines
/// the optimizer-state, serialization, and finite-difference layouts.
using TensorPtrs = std::vector<Eigen::MatrixXd*>;
using ConstTensorPtrs = std::vector<const Eigen::MatrixXd*>;

/// Adaptive moment estimation with bias correction and optional decoupled
/// weight decay (the AdamW scheme: theta -= lr * wd * theta after the
/// moment update).
class Adam {
public:
    explicit Adam(double lr, double weight_decay = 0.0) : lr_(lr), weight_decay_(weight_decay) {}

    void step(const TensorPtrs& params, const ConstTensorPtrs& grads);

private:
    double lr_;
    double weight_decay_;
    double beta1_ = 0.9;
    double beta2_ = 0.999;
    double eps_ = 1e-8;
    long t_ = 0;
    std::vector<Eigen::MatrixXd> m_, v_;
};

inline void zero_like(const ConstTensorPtrs& shapes, std::vector<Eigen::MatrixXd>& out) {
    out.clear();
    out.reserve(shapes.size());
    for (const auto* t : shapes) {
        out.push_back(Eigen::MatrixXd::Zero(t->rows(), t->cols()));
    }
}

} // namespace gentrify::nn
