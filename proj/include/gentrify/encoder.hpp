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
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gentrify/image.hpp"
#include "gentrify/ingest.hpp"
#include "gentrify/nn.hpp"

namespace gentrify::enc {

// ---------------------------------------------------------------------------
// Parameters
//
// Reference backbone: four 3x3 stride-2 conv blocks with channel doubling,
// ReLU, global average pooling, then a linear head to R^d. Both pair members
// go through the same parameter set (Siamese twins share weights by
// construction: there is only one copy).

struct ConvLayer {
    Eigen::MatrixXd weight; // out_c x (in_c * 9)
    Eigen::MatrixXd bias;   // out_c x 1
    int in_channels = 0;
    int out_channels = 0;
};

struct EncoderParams {
    std::vector<ConvLayer> convs;
    Eigen::MatrixXd head_weight; // d x last_channels
    Eigen::MatrixXd head_bias;   // d x 1
    Eigen::MatrixXd alpha;       // M x 1, pair-level classifier
    int image_side = 0;
    int d = 0;
    int M = 0; // 3d
    std::uint64_t seed = 0;

    /// Conv blocks plus the linear head.
    [[nodiscard]] int depth() const { return static_cast<int>(convs.size()) + 1; }
};

struct EncoderConfig {
    int image_side = 64;
    int d = 64;          // paper-compatible runs use d=512
    int base_channels = 8;
    int conv_blocks = 4;
    int epochs = 50;
    int batch = 32;
    double lr = 1e-3;
    double val_fraction = 0.3; // 70/30 split
    std::uint64_t seed = 7;
};

EncoderParams init_encoder(const EncoderConfig& config);

nn::TensorPtrs tensors(EncoderParams& p);
nn::ConstTensorPtrs tensors(const EncoderParams& p);

/// Zero-valued gradient holder with the same shapes.
EncoderParams zero_grads_like(const EncoderParams& p);

// ---------------------------------------------------------------------------
// Forward / backward

Eigen::VectorXd encode_image(const ImageTensor& img, const EncoderParams& params);

/// h = [h_l - h_e; h_l; h_e], dimension 3d.
Eigen::VectorXd pair_embedding(const Eigen::VectorXd& h_e, const Eigen::VectorXd& h_l);

/// sigmoid(alpha^T h).
double change_score(const Eigen::VectorXd& h, const Eigen::MatrixXd& alpha);

double pair_bce_loss(double p, int y);

/// 1 iff p >= threshold (boundary counts as change).
int classify_pair(double p, double threshold = 0.5);

/// Layer activations captured during a forward pass, for backprop.
struct ForwardTrace {
    std::vector<Eigen::MatrixXd> activations; // input plane then post-ReLU maps
    Eigen::VectorXd pooled;
};

Eigen::VectorXd encode_with_trace(const ImageTensor& img, const EncoderParams& params,
                                  ForwardTrace& trace);

/// Accumulates d(loss)/d(backbone params) given d(loss)/d(embedding).
void backbone_backward(const ForwardTrace& trace, const EncoderParams& params,
                       const Eigen::VectorXd& d_embedding, EncoderParams& grads);

/// Splits a pair-embedding gradient into the two image-embedding gradients
/// (h = [h_l - h_e; h_l; h_e]).
void split_pair_gradient(const Eigen::VectorXd& dh, int d, Eigen::VectorXd& dh_e,
                         Eigen::VectorXd& dh_l);

// ---------------------------------------------------------------------------
// Training

struct LabeledPairImages {
    ImageTensor earlier;
    ImageTensor later;
    int y = 0;
};

struct EpochLog {
    int epoch = 0;
    double train_loss = 0.0;
    double val_acc = 0.0;
};

struct TrainResult {
    EncoderParams params; // parameters at best validation accuracy
    std::vector<EpochLog> log;
    double best_val_acc = 0.0;
    int best_epoch = 0;
};

/// 70/30 seeded shuffle split, minibatch Adam on mean pair BCE; returns the
/// parameters of the best-validation epoch. Refuses single-class datasets.
TrainResult train_change_detector(const std::vector<LabeledPairImages>& dataset,
                                  const EncoderConfig& config);

/// Same, loading image pixels from the pairs' pixels_ref paths.
TrainResult train_change_detector(const std::vector<std::pair<ingest::TimedPair, ingest::PairLabel>>& dataset,
                                  const EncoderConfig& config);

void write_train_log_csv(const std::string& path, const std::vector<EpochLog>& log);

/// Finite-difference check of d(pair BCE)/d(alpha) on a random d=8 instance.
/// mutate_gradient injects a deliberate error to sanity-check the harness.
double alpha_grad_check(std::uint64_t seed, double eps = 1e-5, bool mutate_gradient = false);

// ---------------------------------------------------------------------------
// Serialization (versioned binary + JSON sidecar at <path>.json)

void save_encoder(const std::string& path, const EncoderParams& params);
EncoderParams load_encoder(const std::string& path);
std::string serialize_encoder(const EncoderParams& params);
std::uint64_t params_hash(const EncoderParams& params);

// ---------------------------------------------------------------------------
// Embedding cache

struct EmbeddingCache {
    std::uint64_t encoder_hash = 0;
    int M = 0;
    std::map<std::string, Eigen::VectorXd> by_pair_id;
};

EmbeddingCache embed_containers(const std::vector<ingest::NeighborhoodContainer>& containers,
                                const EncoderParams& params);
void save_embedding_cache(const std::string& path, const EmbeddingCache& cache);
EmbeddingCache load_embedding_cache(const std::string& path);

/// Loads the cache when present and fresh (matching encoder hash); otherwise
/// recomputes and persists it.
EmbeddingCache ensure_embedding_cache(const std::string& path,
                                      const std::vector<ingest::NeighborhoodContainer>& containers,
                                      const EncoderParams& params);

} // namespace gentrify::enc
