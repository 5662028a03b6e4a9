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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gentrify/encoder.hpp"
#include "gentrify/ingest.hpp"
#include "gentrify/nn.hpp"

namespace gentrify::mil {

// ---------------------------------------------------------------------------
// Gated attention aggregator
//
//   a_i = softmax_i( w^T (tanh(V h_i) (*) sigm(U h_i)) )
//   n   = sum_i a_i h_i
//   P   = sigmoid(beta^T n)

struct AttentionParams {
    Eigen::MatrixXd V;    // W x M
    Eigen::MatrixXd U;    // W x M
    Eigen::MatrixXd w;    // W x 1
    Eigen::MatrixXd beta; // M x 1
    std::uint64_t seed = 0;

    [[nodiscard]] int attn_width() const { return static_cast<int>(V.rows()); }
    [[nodiscard]] int embedding_dim() const { return static_cast<int>(V.cols()); }
};

/// V, U uniform in +-sqrt(6/(W+M)); w and beta zero, so every instance starts
/// at uniform attention and every bag at probability 0.5.
AttentionParams init_attention(int attn_width, int embedding_dim, std::uint64_t seed);

nn::TensorPtrs tensors(AttentionParams& p);
nn::ConstTensorPtrs tensors(const AttentionParams& p);
AttentionParams zero_grads_like(const AttentionParams& p);

/// Instance embeddings as columns: H is M x K.
Eigen::VectorXd attention_weights(const Eigen::MatrixXd& H, const AttentionParams& params);
Eigen::VectorXd attention_weights(const std::vector<Eigen::VectorXd>& hs, const AttentionParams& params);

/// n = sum_i a_i h_i.
Eigen::VectorXd aggregate(const Eigen::MatrixXd& H, const Eigen::VectorXd& a);

/// sigmoid(beta^T n).
double neighborhood_score(const Eigen::VectorXd& n, const Eigen::MatrixXd& beta);

double bag_bce_loss(double P, int Y);

// ---------------------------------------------------------------------------
// Bags

struct Bag {
    std::string tract_id;
    Eigen::MatrixXd H; // M x K instance embeddings
    std::vector<std::string> pair_ids;
    int label = 0; // 1 = gentrifying
};

/// Binary-label bags from cached embeddings. Containers must be gentrifiable
/// (gentrifying / non_gentrifying); anything else is rejected.
std::vector<Bag> make_bags(const std::vector<ingest::NeighborhoodContainer>& containers,
                           const enc::EmbeddingCache& cache);

enum class MilMode { full, mean_pool, pretrained_mean_pool, e2e };

std::string to_string(MilMode mode);
MilMode mil_mode_from_string(std::string_view text);

/// Bag probability. Mean-pooling modes fix a_i = 1/K.
double predict_bag(const Bag& bag, const AttentionParams& params, MilMode mode);

// ---------------------------------------------------------------------------
// Training

struct MilConfig {
    int attn_width = 128; // W
    int epochs = 200;
    int batch_bags = 8; // minibatch size, in bags
    double lr = 1e-3;
    double weight_decay = 0.02; // decoupled (AdamW); regularizes all trained tensors
    std::uint64_t seed = 11;
    MilMode mode = MilMode::full;
    bool class_weights = true; // inverse-frequency bag weights
    double split_ratio = 0.7;
    std::uint64_t split_seed = 13;
    /// Slice of the train fold held out for epoch selection. The 30% test
    /// fold never touches training or selection.
    double selection_fraction = 0.2;
    int e2e_epochs = 10;
};

struct MilEpochLog {
    int epoch = 0;
    double train_loss = 0.0;
    double val_balanced_acc = 0.0;
};

struct MilTrainResult {
    AttentionParams params;
    std::vector<MilEpochLog> log;
    double best_val_balanced_acc = 0.0; // on the internal selection slice
    int best_epoch = 0;
    std::optional<enc::EncoderParams> encoder; // e2e mode only
};

/// Trains on frozen embeddings. full optimizes V, U, w, beta; the
/// mean-pooling modes fix a_i = 1/K and optimize beta only (the two mean
/// modes differ upstream, in which encoder produced the cache). Stratified
/// 70/30 bag split; epochs are selected on an internal slice of the train
/// fold (first epoch reaching the best balanced accuracy). e2e mode is
/// rejected here (it needs pixels, not a cache) - use train_mil_e2e.
MilTrainResult train_mil(const std::vector<Bag>& bags, const MilConfig& config);

/// Spec-shaped convenience overload over a cache + containers.
MilTrainResult train_mil(const enc::EmbeddingCache& cache,
                         const std::vector<ingest::NeighborhoodContainer>& containers,
                         const MilConfig& config);

/// End-to-end baseline: joint gradient flow from the bag loss through the
/// attention block and a freshly initialized backbone; pair labels unused.
MilTrainResult train_mil_e2e(const std::vector<ingest::NeighborhoodContainer>& containers,
                             const enc::EncoderConfig& encoder_config, const MilConfig& config);

void write_mil_train_log_csv(const std::string& path, const std::vector<MilEpochLog>& log);

/// Max relative error between analytic gradients of the summed bag BCE and
/// central finite differences, over every entry of V, U, w, beta.
/// mutate_gradient injects a deliberate error to sanity-check the harness.
double grad_check(const AttentionParams& params, const std::vector<Bag>& batch, double eps = 1e-5,
                  bool mutate_gradient = false);

// ---------------------------------------------------------------------------
// Serialization (same versioned binary + JSON sidecar scheme as the encoder)

void save_attention(const std::string& path, const AttentionParams& params);
AttentionParams load_attention(const std::string& path);
std::string serialize_attention(const AttentionParams& params);
std::uint64_t params_hash(const AttentionParams& params);

} // namespace gentrify::mil
