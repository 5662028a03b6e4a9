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

#include "gentrify/nn.hpp"

namespace gentrify::nn {

void xavier_uniform(Eigen::MatrixXd& m, double fan_in, double fan_out, Rng& rng) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            m(i, j) = rng.uniform(-bound, bound);
        }
    }
}

void he_uniform(Eigen::MatrixXd& m, double fan_in, Rng& rng) {
    const double bound = std::sqrt(6.0 / fan_in);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            m(i, j) = rng.uniform(-bound, bound);
        }
    }
}

void Adam::step(const TensorPtrs& params, const ConstTensorPtrs& grads) {
    if (params.size() != grads.size()) {
        throw Error("Adam::step: parameter/gradient count mismatch");
    }
    if (m_.empty()) {
        zero_like(grads, m_);
        zero_like(grads, v_);
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& m = m_[i];
        auto& v = v_[i];
        const auto& g = *grads[i];
        m = beta1_ * m + (1.0 - beta1_) * g;
        v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
        *params[i] -= (lr_ * (m / bc1).array() / ((v / bc2).array().sqrt() + eps_)).matrix();
        if (weight_decay_ > 0.0) {
            *params[i] *= 1.0 - lr_ * weight_decay_;
        }
    }
}

} // namespace gentrify::nn
