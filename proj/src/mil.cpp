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

#include "gentrify/mil.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gentrify/eval.hpp"

using nlohmann::json;

namespace gentrify::mil {

namespace {

struct BagForward {
    Eigen::MatrixXd T;    // tanh(V H), W x K
    Eigen::MatrixXd G;    // sigm(U H), W x K
    Eigen::MatrixXd gate; // T (*) G
    Eigen::VectorXd scores;
    Eigen::VectorXd a;
    Eigen::VectorXd n;
    double P = 0.0;
};

Eigen::VectorXd stable_softmax(const Eigen::VectorXd& scores) {
    const double m = scores.maxCoeff();
    Eigen::VectorXd e = (scores.array() - m).exp();
    return e / e.sum();
}

BagForward forward_bag(const Eigen::MatrixXd& H, const AttentionParams& p) {
    BagForward f;
    f.T = (p.V * H).array().tanh();
    f.G = (p.U * H).unaryExpr([](double x) { return nn::sigmoid(x); });
    f.gate = f.T.cwiseProduct(f.G);
    f.scores = f.gate.transpose() * p.w.col(0);
    f.a = stable_softmax(f.scores);
    f.n = H * f.a;
    f.P = nn::sigmoid(p.beta.col(0).dot(f.n));
    return f;
}

/// Accumulates gradients of `weight * bce(P, Y)` into `grads`; optionally
/// also returns d(loss)/dH for end-to-end training.
void backward_bag(const Eigen::MatrixXd& H, int Y, double weight, const AttentionParams& p,
                  const BagForward& f, AttentionParams& grads, Eigen::MatrixXd* dH) {
    const double dz = weight * (f.P - static_cast<double>(Y));
    grads.beta.col(0) += dz * f.n;
    const Eigen::VectorXd dn = dz * p.beta.col(0);
    const Eigen::VectorXd da = H.transpose() * dn;
    const double mix = f.a.dot(da);
    const Eigen::VectorXd ds = f.a.cwiseProduct(da.array().matrix() - Eigen::VectorXd::Constant(f.a.size(), mix));
    const Eigen::MatrixXd dgate = p.w.col(0) * ds.transpose();            // W x K
    const Eigen::MatrixXd dpreV = dgate.cwiseProduct(f.G).cwiseProduct(
        (1.0 - f.T.array().square()).matrix());                           // tanh'
    const Eigen::MatrixXd dpreU = dgate.cwiseProduct(f.T).cwiseProduct(
        f.G.cwiseProduct((1.0 - f.G.array()).matrix()));                  // sigm'
    grads.V += dpreV * H.transpose();
    grads.U += dpreU * H.transpose();
    grads.w.col(0) += f.gate * ds;
    if (dH != nullptr) {
        *dH = p.V.transpose() * dpreV + p.U.transpose() * dpreU + dn * f.a.transpose();
    }
}

double mean_pool_probability(const Eigen::MatrixXd& H, const AttentionParams& p) {
    const Eigen::VectorXd n = H.rowwise().mean();
    return nn::sigmoid(p.beta.col(0).dot(n));
}

std::vector<int> bag_labels(const std::vector<Bag>& bags) {
    std::vector<int> labels;
    labels.reserve(bags.size());
    for (const auto& b : bags) {
        labels.push_back(b.label);
    }
    return labels;
}

/// Weighted mean BCE over a bag subset: the epoch-selection criterion.
double validation_loss(const std::vector<Bag>& bags, const std::vector<std::size_t>& idx,
                       const AttentionParams& params, MilMode mode,
                       const std::map<int, double>& class_w) {
    double loss = 0.0;
    for (const std::size_t i : idx) {
        loss += class_w.at(bags[i].label) * bag_bce_loss(predict_bag(bags[i], params, mode),
                                                         bags[i].label);
    }
    return idx.empty() ? 0.0 : loss / static_cast<double>(idx.size());
}

double validation_balanced_accuracy(const std::vector<Bag>& bags, const std::vector<std::size_t>& idx,
                                    const AttentionParams& params, MilMode mode) {
    std::vector<int> y_true;
    std::vector<int> y_pred;
    for (const std::size_t i : idx) {
        y_true.push_back(bags[i].label);
        y_pred.push_back(predict_bag(bags[i], params, mode) >= 0.5 ? 1 : 0);
    }
    // A degenerate validation fold (single class) reports plain accuracy.
    const bool both = std::count(y_true.begin(), y_true.end(), 1) > 0 &&
                      std::count(y_true.begin(), y_true.end(), 0) > 0;
    if (!both) {
        std::size_t ok = 0;
        for (std::size_t i = 0; i < y_true.size(); ++i) {
            ok += y_true[i] == y_pred[i];
        }
        return y_true.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(y_true.size());
    }
    return eval::compute_metrics(y_true, y_pred).balanced_accuracy;
}

std::map<int, double> inverse_frequency_weights(const std::vector<Bag>& bags,
                                                const std::vector<std::size_t>& train_idx) {
    std::map<int, std::size_t> counts;
    for (const std::size_t i : train_idx) {
        ++counts[bags[i].label];
    }
    std::map<int, double> weights;
    for (const auto& [label, count] : counts) {
        weights[label] = static_cast<double>(train_idx.size()) /
                         (static_cast<double>(counts.size()) * static_cast<double>(count));
    }
    return weights;
}

constexpr std::uint32_t kParamsMagic = 0x4d525047; // "GPRM"
constexpr std::uint32_t kParamsVersion = 1;
constexpr std::uint32_t kKindAttention = 2;

} // namespace

AttentionParams init_attention(int attn_width, int embedding_dim, std::uint64_t seed) {
    if (attn_width <= 0 || embedding_dim <= 0) {
        throw ValidationError("init_attention: dimensions must be positive");
    }
    AttentionParams p;
    p.seed = seed;
    Rng rng(derive_seed(seed, "attention-init"));
    p.V.resize(attn_width, embedding_dim);
    p.U.resize(attn_width, embedding_dim);
    nn::xavier_uniform(p.V, embedding_dim, attn_width, rng);
    nn::xavier_uniform(p.U, embedding_dim, attn_width, rng);
    p.w = Eigen::MatrixXd::Zero(attn_width, 1);
    p.beta = Eigen::MatrixXd::Zero(embedding_dim, 1);
    return p;
}

nn::TensorPtrs tensors(AttentionParams& p) {
    return {&p.V, &p.U, &p.w, &p.beta};
}

nn::ConstTensorPtrs tensors(const AttentionParams& p) {
    return {&p.V, &p.U, &p.w, &p.beta};
}

AttentionParams zero_grads_like(const AttentionParams& p) {
    AttentionParams g = p;
    for (auto* t : tensors(g)) {
        t->setZero();
    }
    return g;
}

Eigen::VectorXd attention_weights(const Eigen::MatrixXd& H, const AttentionParams& params) {
    if (H.cols() < 1) {
        throw ValidationError("attention_weights: need at least one instance");
    }
    if (H.rows() != params.V.cols()) {
        throw ValidationError("attention_weights: embedding dim mismatch");
    }
    return forward_bag(H, params).a;
}

Eigen::VectorXd attention_weights(const std::vector<Eigen::VectorXd>& hs, const AttentionParams& params) {
    if (hs.empty()) {
        throw ValidationError("attention_weights: need at least one instance");
    }
    Eigen::MatrixXd H(hs.front().size(), static_cast<Eigen::Index>(hs.size()));
    for (std::size_t i = 0; i < hs.size(); ++i) {
        H.col(static_cast<Eigen::Index>(i)) = hs[i];
    }
    return attention_weights(H, params);
}

Eigen::VectorXd aggregate(const Eigen::MatrixXd& H, const Eigen::VectorXd& a) {
    if (H.cols() != a.size()) {
        throw ValidationError("aggregate: weight count does not match instance count");
    }
    return H * a;
}

double neighborhood_score(const Eigen::VectorXd& n, const Eigen::MatrixXd& beta) {
    if (n.size() != beta.rows() || beta.cols() != 1) {
        throw ValidationError("neighborhood_score: beta shape mismatch");
    }
    return nn::sigmoid(beta.col(0).dot(n));
}

double bag_bce_loss(double P, int Y) {
    return nn::binary_cross_entropy(P, Y);
}

std::vector<Bag> make_bags(const std::vector<ingest::NeighborhoodContainer>& containers,
                           const enc::EmbeddingCache& cache) {
    std::vector<Bag> bags;
    bags.reserve(containers.size());
    for (const auto& c : containers) {
        if (c.label == ingest::TractLabel::non_gentrifiable) {
            throw ValidationError("non-gentrifiable tract " + c.tract.tract_id +
                                  " cannot enter bag training");
        }
        Bag bag;
        bag.tract_id = c.tract.tract_id;
        bag.label = c.label == ingest::TractLabel::gentrifying ? 1 : 0;
        bag.H.resize(cache.M, static_cast<Eigen::Index>(c.pairs.size()));
        for (std::size_t i = 0; i < c.pairs.size(); ++i) {
            const std::string id = c.pairs[i].pair_id();
            const auto it = cache.by_pair_id.find(id);
            if (it == cache.by_pair_id.end()) {
                throw Error("embedding cache is missing pair " + id + " (re-run the embed stage)");
            }
            bag.H.col(static_cast<Eigen::Index>(i)) = it->second;
            bag.pair_ids.push_back(id);
        }
        bags.push_back(std::move(bag));
    }
    return bags;
}

std::string to_string(MilMode mode) {
    switch (mode) {
    case MilMode::full: return "full";
    case MilMode::mean_pool: return "mean_pool";
    case MilMode::pretrained_mean_pool: return "pretrained_mean_pool";
    case MilMode::e2e: return "e2e";
    }
    return "full";
}

MilMode mil_mode_from_string(std::string_view text) {
    if (text == "full") return MilMode::full;
    if (text == "mean_pool") return MilMode::mean_pool;
    if (text == "pretrained_mean_pool") return MilMode::pretrained_mean_pool;
    if (text == "e2e") return MilMode::e2e;
    throw ValidationError("unknown MIL mode '" + std::string(text) +
                          "' (expected full|mean_pool|pretrained_mean_pool|e2e)");
}

double predict_bag(const Bag& bag, const AttentionParams& params, MilMode mode) {
    if (mode == MilMode::mean_pool || mode == MilMode::pretrained_mean_pool) {
        return mean_pool_probability(bag.H, params);
    }
    return forward_bag(bag.H, params).P;
}

MilTrainResult train_mil(const std::vector<Bag>& bags, const MilConfig& config) {
    if (config.mode == MilMode::e2e) {
        throw ValidationError("e2e mode trains from pixels; use train_mil_e2e");
    }
    if (bags.empty()) {
        throw ValidationError("train_mil: no bags");
    }
    const auto labels = bag_labels(bags);
    if (std::count(labels.begin(), labels.end(), 1) == 0 ||
        std::count(labels.begin(), labels.end(), 0) == 0) {
        throw ValidationError("train_mil: bags must contain both classes");
    }
    const int M = static_cast<int>(bags.front().H.rows());
    for (const auto& b : bags) {
        if (b.H.rows() != M) {
            throw ValidationError("train_mil: inconsistent embedding dimension across bags");
        }
    }

    const auto split = eval::stratified_split(labels, config.split_ratio, config.split_seed);

    // Epoch selection happens on a slice of the train fold; the test fold
    // stays untouched until the eval stage.
    std::vector<std::size_t> fit_idx = split.train;
    std::vector<std::size_t> selection_idx;
    if (config.selection_fraction > 0.0 && split.train.size() >= 5) {
        std::vector<int> train_labels;
        train_labels.reserve(split.train.size());
        for (const std::size_t i : split.train) {
            train_labels.push_back(bags[i].label);
        }
        const auto inner = eval::stratified_split(train_labels, 1.0 - config.selection_fraction,
                                                  derive_seed(config.split_seed, "mil-selection"));
        fit_idx.clear();
        for (const std::size_t local : inner.train) {
            fit_idx.push_back(split.train[local]);
        }
        for (const std::size_t local : inner.test) {
            selection_idx.push_back(split.train[local]);
        }
    }
    const auto class_w = config.class_weights
                             ? inverse_frequency_weights(bags, fit_idx)
                             : std::map<int, double>{{0, 1.0}, {1, 1.0}};

    AttentionParams params = init_attention(config.attn_width, M, config.seed);
    const bool train_attention = config.mode == MilMode::full;
    nn::Adam opt(config.lr, config.weight_decay);

    MilTrainResult result;
    result.params = params;
    result.best_val_balanced_acc = 0.0;
    double best_loss = std::numeric_limits<double>::infinity();

    Rng epoch_rng(derive_seed(config.seed, "mil-epochs"));
    std::vector<std::size_t> order = fit_idx;
    const auto batch_size = static_cast<std::size_t>(std::max(1, config.batch_bags));
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        epoch_rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const std::size_t end = std::min(order.size(), start + batch_size);
            AttentionParams grads = zero_grads_like(params);
            const double inv_batch = 1.0 / static_cast<double>(end - start);
            for (std::size_t k = start; k < end; ++k) {
                const auto& bag = bags[order[k]];
                const double weight = class_w.at(bag.label) * inv_batch;
                if (train_attention) {
                    const BagForward f = forward_bag(bag.H, params);
                    loss_sum += weight * bag_bce_loss(f.P, bag.label);
                    backward_bag(bag.H, bag.label, weight, params, f, grads, nullptr);
                } else {
                    const Eigen::VectorXd n = bag.H.rowwise().mean();
                    const double P = nn::sigmoid(params.beta.col(0).dot(n));
                    loss_sum += weight * bag_bce_loss(P, bag.label);
                    grads.beta.col(0) += weight * (P - static_cast<double>(bag.label)) * n;
                }
            }
            if (train_attention) {
                opt.step(tensors(params), tensors(std::as_const(grads)));
            } else {
                nn::TensorPtrs p{&params.beta};
                nn::ConstTensorPtrs g{&grads.beta};
                opt.step(p, g);
            }
        }
        const auto& sel = selection_idx.empty() ? fit_idx : selection_idx;
        const double val_loss = validation_loss(bags, sel, params, config.mode, class_w);
        const double val_acc = validation_balanced_accuracy(bags, sel, params, config.mode);
        const auto n_batches = (order.size() + batch_size - 1) / batch_size;
        result.log.push_back({epoch, loss_sum / static_cast<double>(n_batches), val_acc});
        if (val_loss < best_loss) {
            best_loss = val_loss;
            result.best_val_balanced_acc = val_acc;
            result.best_epoch = epoch;
            result.params = params;
        }
    }
    return result;
}

MilTrainResult train_mil(const enc::EmbeddingCache& cache,
                         const std::vector<ingest::NeighborhoodContainer>& containers,
                         const MilConfig& config) {
    return train_mil(make_bags(containers, cache), config);
}

MilTrainResult train_mil_e2e(const std::vector<ingest::NeighborhoodContainer>& containers,
                             const enc::EncoderConfig& encoder_config, const MilConfig& config) {
    if (containers.empty()) {
        throw ValidationError("train_mil_e2e: no containers");
    }
    // Load every bag's pixels up front; bags are the minibatch unit.
    struct PixelBag {
        std::string tract_id;
        std::vector<std::pair<ImageTensor, ImageTensor>> pairs;
        int label = 0;
    };
    std::vector<PixelBag> bags;
    std::vector<int> labels;
    for (const auto& c : containers) {
        if (c.label == ingest::TractLabel::non_gentrifiable) {
            throw ValidationError("non-gentrifiable tract " + c.tract.tract_id +
                                  " cannot enter bag training");
        }
        PixelBag bag;
        bag.tract_id = c.tract.tract_id;
        bag.label = c.label == ingest::TractLabel::gentrifying ? 1 : 0;
        for (const auto& pair : c.pairs) {
            bag.pairs.emplace_back(read_png_rgb8(pair.earlier.pixels_ref),
                                   read_png_rgb8(pair.later.pixels_ref));
        }
        labels.push_back(bag.label);
        bags.push_back(std::move(bag));
    }
    if (std::count(labels.begin(), labels.end(), 1) == 0 ||
        std::count(labels.begin(), labels.end(), 0) == 0) {
        throw ValidationError("train_mil_e2e: bags must contain both classes");
    }

    enc::EncoderParams encoder = enc::init_encoder(encoder_config);
    AttentionParams attention = init_attention(config.attn_width, encoder.M, config.seed);
    const auto split = eval::stratified_split(labels, config.split_ratio, config.split_seed);

    std::vector<std::size_t> fit_idx = split.train;
    std::vector<std::size_t> selection_idx;
    if (config.selection_fraction > 0.0 && split.train.size() >= 5) {
        std::vector<int> train_labels;
        for (const std::size_t i : split.train) {
            train_labels.push_back(labels[i]);
        }
        const auto inner = eval::stratified_split(train_labels, 1.0 - config.selection_fraction,
                                                  derive_seed(config.split_seed, "mil-selection"));
        fit_idx.clear();
        for (const std::size_t local : inner.train) {
            fit_idx.push_back(split.train[local]);
        }
        for (const std::size_t local : inner.test) {
            selection_idx.push_back(split.train[local]);
        }
    }
    const auto class_w = config.class_weights ? inverse_frequency_weights(
                                                    [&] {
                                                        std::vector<Bag> shims(bags.size());
                                                        for (std::size_t i = 0; i < bags.size(); ++i) {
                                                            shims[i].label = bags[i].label;
                                                        }
                                                        return shims;
                                                    }(),
                                                    fit_idx)
                                              : std::map<int, double>{{0, 1.0}, {1, 1.0}};

    nn::Adam enc_opt(encoder_config.lr);
    nn::Adam attn_opt(config.lr, config.weight_decay);
    Rng epoch_rng(derive_seed(config.seed, "e2e-epochs"));
    std::vector<std::size_t> order = fit_idx;

    auto embed_bag = [&](const PixelBag& bag, std::vector<enc::ForwardTrace>* traces) {
        Eigen::MatrixXd H(encoder.M, static_cast<Eigen::Index>(bag.pairs.size()));
        for (std::size_t i = 0; i < bag.pairs.size(); ++i) {
            Eigen::VectorXd h_e;
            Eigen::VectorXd h_l;
            if (traces != nullptr) {
                h_e = enc::encode_with_trace(bag.pairs[i].first, encoder, (*traces)[2 * i]);
                h_l = enc::encode_with_trace(bag.pairs[i].second, encoder, (*traces)[2 * i + 1]);
            } else {
                h_e = enc::encode_image(bag.pairs[i].first, encoder);
                h_l = enc::encode_image(bag.pairs[i].second, encoder);
            }
            H.col(static_cast<Eigen::Index>(i)) = enc::pair_embedding(h_e, h_l);
        }
        return H;
    };

    MilTrainResult result;
    result.params = attention;
    result.encoder = encoder;
    result.best_val_balanced_acc = 0.0;
    double best_loss = std::numeric_limits<double>::infinity();

    const int epochs = config.e2e_epochs;
    for (int epoch = 1; epoch <= epochs; ++epoch) {
        epoch_rng.shuffle(order);
        double loss_sum = 0.0;
        for (const std::size_t bi : order) {
            const auto& bag = bags[bi];
            std::vector<enc::ForwardTrace> traces(bag.pairs.size() * 2);
            const Eigen::MatrixXd H = embed_bag(bag, &traces);
            const BagForward f = forward_bag(H, attention);
            const double weight = class_w.at(bag.label);
            loss_sum += weight * bag_bce_loss(f.P, bag.label);

            AttentionParams attn_grads = zero_grads_like(attention);
            Eigen::MatrixXd dH;
            backward_bag(H, bag.label, weight, attention, f, attn_grads, &dH);

            enc::EncoderParams enc_grads = enc::zero_grads_like(encoder);
            for (std::size_t i = 0; i < bag.pairs.size(); ++i) {
                Eigen::VectorXd dh_e;
                Eigen::VectorXd dh_l;
                enc::split_pair_gradient(dH.col(static_cast<Eigen::Index>(i)), encoder.d, dh_e, dh_l);
                enc::backbone_backward(traces[2 * i], encoder, dh_e, enc_grads);
                enc::backbone_backward(traces[2 * i + 1], encoder, dh_l, enc_grads);
            }
            // alpha receives no gradient in e2e (pair labels are unused).
            attn_opt.step(tensors(attention), tensors(std::as_const(attn_grads)));
            enc_opt.step(enc::tensors(encoder), enc::tensors(std::as_const(enc_grads)));
        }

        std::vector<int> y_true;
        std::vector<int> y_pred;
        double val_loss = 0.0;
        const auto& sel = selection_idx.empty() ? fit_idx : selection_idx;
        for (const std::size_t i : sel) {
            const Eigen::MatrixXd H = embed_bag(bags[i], nullptr);
            const double P = forward_bag(H, attention).P;
            val_loss += class_w.at(bags[i].label) * bag_bce_loss(P, bags[i].label);
            y_true.push_back(bags[i].label);
            y_pred.push_back(P >= 0.5 ? 1 : 0);
        }
        val_loss /= static_cast<double>(sel.size());
        double val = 0.0;
        const bool both = std::count(y_true.begin(), y_true.end(), 1) > 0 &&
                          std::count(y_true.begin(), y_true.end(), 0) > 0;
        if (both) {
            val = eval::compute_metrics(y_true, y_pred).balanced_accuracy;
        } else if (!y_true.empty()) {
            std::size_t ok = 0;
            for (std::size_t i = 0; i < y_true.size(); ++i) {
                ok += y_true[i] == y_pred[i];
            }
            val = static_cast<double>(ok) / static_cast<double>(y_true.size());
        }
        result.log.push_back({epoch, loss_sum / static_cast<double>(order.size()), val});
        if (val_loss < best_loss) {
            best_loss = val_loss;
            result.best_val_balanced_acc = val;
            result.best_epoch = epoch;
            result.params = attention;
            result.encoder = encoder;
        }
    }
    return result;
}

void write_mil_train_log_csv(const std::string& path, const std::vector<MilEpochLog>& log) {
    std::ostringstream out;
    out << "epoch,train_loss,val_balanced_acc\n";
    for (const auto& row : log) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g\n", row.epoch, row.train_loss, row.val_balanced_acc);
        out << buf;
    }
    write_file_atomic(path, out.str());
}

double grad_check(const AttentionParams& params, const std::vector<Bag>& batch, double eps,
                  bool mutate_gradient) {
    if (batch.empty()) {
        throw ValidationError("grad_check: empty batch");
    }
    auto loss_at = [&batch](const AttentionParams& p) {
        double loss = 0.0;
        for (const auto& bag : batch) {
            loss += bag_bce_loss(forward_bag(bag.H, p).P, bag.label);
        }
        return loss;
    };

    AttentionParams grads = zero_grads_like(params);
    for (const auto& bag : batch) {
        const BagForward f = forward_bag(bag.H, params);
        backward_bag(bag.H, bag.label, 1.0, params, f, grads, nullptr);
    }
    if (mutate_gradient) {
        grads.V(0, 0) += 0.1 * std::max(1.0, std::abs(grads.V(0, 0)));
    }

    AttentionParams probe = params;
    const nn::TensorPtrs probe_tensors = tensors(probe);
    const nn::ConstTensorPtrs grad_tensors = tensors(std::as_const(grads));
    double max_rel = 0.0;
    for (std::size_t t = 0; t < probe_tensors.size(); ++t) {
        Eigen::MatrixXd& tensor = *probe_tensors[t];
        const Eigen::MatrixXd& g = *grad_tensors[t];
        for (Eigen::Index j = 0; j < tensor.cols(); ++j) {
            for (Eigen::Index i = 0; i < tensor.rows(); ++i) {
                const double saved = tensor(i, j);
                tensor(i, j) = saved + eps;
                const double up = loss_at(probe);
                tensor(i, j) = saved - eps;
                const double down = loss_at(probe);
                tensor(i, j) = saved;
                const double fd = (up - down) / (2.0 * eps);
                const double denom = std::max({1e-8, std::abs(fd), std::abs(g(i, j))});
                max_rel = std::max(max_rel, std::abs(fd - g(i, j)) / denom);
            }
        }
    }
    return max_rel;
}

// ---------------------------------------------------------------------------
// Serialization

std::string serialize_attention(const AttentionParams& params) {
    std::string buf;
    auto u32 = [&buf](std::uint32_t v) { buf.append(reinterpret_cast<const char*>(&v), sizeof v); };
    auto u64 = [&buf](std::uint64_t v) { buf.append(reinterpret_cast<const char*>(&v), sizeof v); };
    u32(kParamsMagic);
    u32(kParamsVersion);
    u32(kKindAttention);
    u64(params.seed);
    u32(static_cast<std::uint32_t>(params.attn_width()));
    u32(static_cast<std::uint32_t>(params.embedding_dim()));
    for (const auto* t : tensors(params)) {
        u32(static_cast<std::uint32_t>(t->rows()));
        u32(static_cast<std::uint32_t>(t->cols()));
        buf.append(reinterpret_cast<const char*>(t->data()),
                   static_cast<std::size_t>(t->size()) * sizeof(double));
    }
    return buf;
}

std::uint64_t params_hash(const AttentionParams& params) {
    return fnv1a64(serialize_attention(params));
}

void save_attention(const std::string& path, const AttentionParams& params) {
    const std::string payload = serialize_attention(params);
    write_file_atomic(path, payload);
    const json sidecar = {
        {"type", "attention"},
        {"version", kParamsVersion},
        {"W", params.attn_width()},
        {"M", params.embedding_dim()},
        {"seed", params.seed},
        {"content_hash", to_hex(fnv1a64(payload))},
    };
    write_file_atomic(path + ".json", sidecar.dump(2) + "\n");
}

AttentionParams load_attention(const std::string& path) {
    const std::string payload = read_file(path);
    std::size_t pos = 0;
    auto u32 = [&payload, &pos]() {
        std::uint32_t v = 0;
        if (pos + sizeof v > payload.size()) {
            throw Error("truncated parameter file");
        }
        std::memcpy(&v, payload.data() + pos, sizeof v);
        pos += sizeof v;
        return v;
    };
    auto u64 = [&payload, &pos]() {
        std::uint64_t v = 0;
        if (pos + sizeof v > payload.size()) {
            throw Error("truncated parameter file");
        }
        std::memcpy(&v, payload.data() + pos, sizeof v);
        pos += sizeof v;
        return v;
    };
    if (u32() != kParamsMagic) {
        throw Error("not a parameter file: " + path);
    }
    if (u32() != kParamsVersion) {
        throw Error("unsupported parameter file version: " + path);
    }
    if (u32() != kKindAttention) {
        throw Error("parameter file is not an attention model: " + path);
    }
    AttentionParams p;
    p.seed = u64();
    u32(); // attn_width, implied by tensor shapes
    u32(); // embedding_dim
    for (auto* t : tensors(p)) {
        const auto rows = u32();
        const auto cols = u32();
        t->resize(rows, cols);
        const std::size_t bytes = static_cast<std::size_t>(t->size()) * sizeof(double);
        if (pos + bytes > payload.size()) {
            throw Error("truncated parameter file");
        }
        std::memcpy(t->data(), payload.data() + pos, bytes);
        pos += bytes;
    }
    return p;
}

} // namespace gentrify::mil
