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

#include "gentrify/encoder.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace gentrify::enc {

namespace {

constexpr int kKernel = 3;
constexpr int kStride = 2;
constexpr int kPad = 1;

int conv_out_side(int in_side) { return (in_side + 2 * kPad - kKernel) / kStride + 1; }

// Patch matrix for a 3x3 stride-2 pad-1 convolution: (in_c*9) x (out_h*out_w).
Eigen::MatrixXd im2col(const Eigen::MatrixXd& x, int side) {
    const int in_c = static_cast<int>(x.rows());
    const int out_side = conv_out_side(side);
    Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(in_c) * kKernel * kKernel,
                                                 static_cast<Eigen::Index>(out_side) * out_side);
    for (int oy = 0; oy < out_side; ++oy) {
        for (int ox = 0; ox < out_side; ++ox) {
            const Eigen::Index col = static_cast<Eigen::Index>(oy) * out_side + ox;
            for (int ky = 0; ky < kKernel; ++ky) {
                const int y = oy * kStride - kPad + ky;
                if (y < 0 || y >= side) {
                    continue;
                }
                for (int kx = 0; kx < kKernel; ++kx) {
                    const int x_px = ox * kStride - kPad + kx;
                    if (x_px < 0 || x_px >= side) {
                        continue;
                    }
                    const Eigen::Index pix = static_cast<Eigen::Index>(y) * side + x_px;
                    for (int c = 0; c < in_c; ++c) {
                        cols((static_cast<Eigen::Index>(c) * kKernel + ky) * kKernel + kx, col) = x(c, pix);
                    }
                }
            }
        }
    }
    return cols;
}

// Scatter-add adjoint of im2col.
Eigen::MatrixXd col2im(const Eigen::MatrixXd& dcols, int in_c, int side) {
    const int out_side = conv_out_side(side);
    Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(in_c, static_cast<Eigen::Index>(side) * side);
    for (int oy = 0; oy < out_side; ++oy) {
        for (int ox = 0; ox < out_side; ++ox) {
            const Eigen::Index col = static_cast<Eigen::Index>(oy) * out_side + ox;
            for (int ky = 0; ky < kKernel; ++ky) {
                const int y = oy * kStride - kPad + ky;
                if (y < 0 || y >= side) {
                    continue;
                }
                for (int kx = 0; kx < kKernel; ++kx) {
                    const int x_px = ox * kStride - kPad + kx;
                    if (x_px < 0 || x_px >= side) {
                        continue;
                    }
                    const Eigen::Index pix = static_cast<Eigen::Index>(y) * side + x_px;
                    for (int c = 0; c < in_c; ++c) {
                        dx(c, pix) += dcols((static_cast<Eigen::Index>(c) * kKernel + ky) * kKernel + kx, col);
                    }
                }
            }
        }
    }
    return dx;
}

Eigen::MatrixXd image_to_plane(const ImageTensor& img) {
    Eigen::MatrixXd x(3, static_cast<Eigen::Index>(img.side) * img.side);
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < img.side * img.side; ++i) {
            x(c, i) = img.data[static_cast<std::size_t>(c) * img.side * img.side + i] / 255.0;
        }
    }
    return x;
}

void check_image(const ImageTensor& img, const EncoderParams& params) {
    if (img.side != params.image_side) {
        throw ValidationError("image side " + std::to_string(img.side) + " does not match encoder input side " +
                              std::to_string(params.image_side));
    }
}

struct BinaryWriter {
    std::string buf;

    void u32(std::uint32_t v) { buf.append(reinterpret_cast<const char*>(&v), sizeof v); }
    void u64(std::uint64_t v) { buf.append(reinterpret_cast<const char*>(&v), sizeof v); }
    void i32(std::int32_t v) { buf.append(reinterpret_cast<const char*>(&v), sizeof v); }
    void matrix(const Eigen::MatrixXd& m) {
        u32(static_cast<std::uint32_t>(m.rows()));
        u32(static_cast<std::uint32_t>(m.cols()));
        buf.append(reinterpret_cast<const char*>(m.data()),
                   static_cast<std::size_t>(m.size()) * sizeof(double));
    }
};

struct BinaryReader {
    const std::string& buf;
    std::size_t pos = 0;

    void raw(void* out, std::size_t n) {
        if (pos + n > buf.size()) {
            throw Error("truncated parameter file");
        }
        std::memcpy(out, buf.data() + pos, n);
        pos += n;
    }
    std::uint32_t u32() { std::uint32_t v = 0; raw(&v, sizeof v); return v; }
    std::uint64_t u64() { std::uint64_t v = 0; raw(&v, sizeof v); return v; }
    std::int32_t i32() { std::int32_t v = 0; raw(&v, sizeof v); return v; }
    Eigen::MatrixXd matrix() {
        const auto rows = u32();
        const auto cols = u32();
        Eigen::MatrixXd m(rows, cols);
        raw(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
        return m;
    }
};

constexpr std::uint32_t kParamsMagic = 0x4d525047; // "GPRM"
constexpr std::uint32_t kParamsVersion = 1;
constexpr std::uint32_t kKindEncoder = 1;

ImageTensor load_pixels(const std::string& path) {
    if (path.empty()) {
        throw Error("pair image has no pixels_ref");
    }
    return read_png_rgb8(path);
}

} // namespace

EncoderParams init_encoder(const EncoderConfig& config) {
    if (config.d <= 0 || config.image_side <= 0 || config.conv_blocks <= 0) {
        throw ValidationError("init_encoder: d, image_side and conv_blocks must be positive");
    }
    int side = config.image_side;
    for (int i = 0; i < config.conv_blocks; ++i) {
        if (side < 2) {
            throw ValidationError("image side too small for " + std::to_string(config.conv_blocks) +
                                  " stride-2 conv blocks");
        }
        side = conv_out_side(side);
    }

    EncoderParams p;
    p.image_side = config.image_side;
    p.d = config.d;
    p.M = 3 * config.d;
    p.seed = config.seed;

    Rng rng(derive_seed(config.seed, "encoder-init"));
    int in_c = 3;
    int out_c = config.base_channels;
    for (int i = 0; i < config.conv_blocks; ++i) {
        ConvLayer layer;
        layer.in_channels = in_c;
        layer.out_channels = out_c;
        layer.weight.resize(out_c, static_cast<Eigen::Index>(in_c) * kKernel * kKernel);
        const double fan_in = static_cast<double>(in_c) * kKernel * kKernel;
        nn::he_uniform(layer.weight, fan_in, rng); // ReLU blocks
        layer.bias = Eigen::MatrixXd::Zero(out_c, 1);
        p.convs.push_back(std::move(layer));
        in_c = out_c;
        out_c *= 2;
    }
    p.head_weight.resize(config.d, in_c);
    nn::xavier_uniform(p.head_weight, in_c, config.d, rng);
    p.head_bias = Eigen::MatrixXd::Zero(config.d, 1);
    p.alpha.resize(p.M, 1);
    nn::xavier_uniform(p.alpha, p.M, 1, rng);
    return p;
}

nn::TensorPtrs tensors(EncoderParams& p) {
    nn::TensorPtrs out;
    for (auto& c : p.convs) {
        out.push_back(&c.weight);
        out.push_back(&c.bias);
    }
    out.push_back(&p.head_weight);
    out.push_back(&p.head_bias);
    out.push_back(&p.alpha);
    return out;
}

nn::ConstTensorPtrs tensors(const EncoderParams& p) {
    nn::ConstTensorPtrs out;
    for (const auto& c : p.convs) {
        out.push_back(&c.weight);
        out.push_back(&c.bias);
    }
    out.push_back(&p.head_weight);
    out.push_back(&p.head_bias);
    out.push_back(&p.alpha);
    return out;
}

EncoderParams zero_grads_like(const EncoderParams& p) {
    EncoderParams g = p;
    for (auto* t : tensors(g)) {
        t->setZero();
    }
    return g;
}

Eigen::VectorXd encode_with_trace(const ImageTensor& img, const EncoderParams& params,
                                  ForwardTrace& trace) {
    check_image(img, params);
    trace.activations.clear();
    trace.activations.push_back(image_to_plane(img));

    int side = params.image_side;
    for (const auto& layer : params.convs) {
        const Eigen::MatrixXd cols = im2col(trace.activations.back(), side);
        Eigen::MatrixXd pre = layer.weight * cols;
        pre.colwise() += layer.bias.col(0);
        trace.activations.push_back(pre.cwiseMax(0.0));
        side = conv_out_side(side);
    }
    trace.pooled = trace.activations.back().rowwise().mean();
    return params.head_weight * trace.pooled + params.head_bias.col(0);
}

Eigen::VectorXd encode_image(const ImageTensor& img, const EncoderParams& params) {
    ForwardTrace trace;
    return encode_with_trace(img, params, trace);
}

void backbone_backward(const ForwardTrace& trace, const EncoderParams& params,
                       const Eigen::VectorXd& d_embedding, EncoderParams& grads) {
    grads.head_weight += d_embedding * trace.pooled.transpose();
    grads.head_bias.col(0) += d_embedding;

    const Eigen::VectorXd d_pooled = params.head_weight.transpose() * d_embedding;
    const auto& last = trace.activations.back();
    Eigen::MatrixXd d_act =
        (d_pooled / static_cast<double>(last.cols())).replicate(1, last.cols());

    // Input sides per layer, recovered from the configured input resolution.
    std::vector<int> sides(params.convs.size());
    int side = params.image_side;
    for (std::size_t l = 0; l < params.convs.size(); ++l) {
        sides[l] = side;
        side = conv_out_side(side);
    }

    for (std::size_t l = params.convs.size(); l-- > 0;) {
        const auto& layer = params.convs[l];
        const auto& input = trace.activations[l];
        const auto& output = trace.activations[l + 1];
        const Eigen::MatrixXd d_pre = d_act.cwiseProduct((output.array() > 0.0).cast<double>().matrix());
        const Eigen::MatrixXd cols = im2col(input, sides[l]);
        grads.convs[l].weight += d_pre * cols.transpose();
        grads.convs[l].bias.col(0) += d_pre.rowwise().sum();
        if (l > 0) {
            const Eigen::MatrixXd d_cols = layer.weight.transpose() * d_pre;
            d_act = col2im(d_cols, layer.in_channels, sides[l]);
        }
    }
}

Eigen::VectorXd pair_embedding(const Eigen::VectorXd& h_e, const Eigen::VectorXd& h_l) {
    if (h_e.size() != h_l.size()) {
        throw ValidationError("pair_embedding: dimension mismatch");
    }
    const Eigen::Index d = h_e.size();
    Eigen::VectorXd h(3 * d);
    h.segment(0, d) = h_l - h_e;
    h.segment(d, d) = h_l;
    h.segment(2 * d, d) = h_e;
    return h;
}

void split_pair_gradient(const Eigen::VectorXd& dh, int d, Eigen::VectorXd& dh_e,
                         Eigen::VectorXd& dh_l) {
    dh_l = dh.segment(0, d) + dh.segment(d, d);
    dh_e = -dh.segment(0, d) + dh.segment(2 * d, d);
}

double change_score(const Eigen::VectorXd& h, const Eigen::MatrixXd& alpha) {
    if (h.size() != alpha.rows() || alpha.cols() != 1) {
        throw ValidationError("change_score: alpha shape mismatch");
    }
    return nn::sigmoid(alpha.col(0).dot(h));
}

double pair_bce_loss(double p, int y) {
    return nn::binary_cross_entropy(p, y);
}

int classify_pair(double p, double threshold) {
    return p >= threshold ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Training

namespace {

double evaluate_accuracy(const std::vector<LabeledPairImages>& dataset,
                         const std::vector<std::size_t>& indices, const EncoderParams& params) {
    if (indices.empty()) {
        return 0.0;
    }
    std::size_t correct = 0;
    for (const std::size_t i : indices) {
        const auto& s = dataset[i];
        const Eigen::VectorXd h_e = encode_image(s.earlier, params);
        const Eigen::VectorXd h_l = encode_image(s.later, params);
        const double p = change_score(pair_embedding(h_e, h_l), params.alpha);
        if (classify_pair(p) == s.y) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(indices.size());
}

} // namespace

TrainResult train_change_detector(const std::vector<LabeledPairImages>& dataset,
                                  const EncoderConfig& config) {
    if (dataset.empty()) {
        throw ValidationError("train_change_detector: empty dataset");
    }
    const bool has_pos = std::any_of(dataset.begin(), dataset.end(), [](const auto& s) { return s.y == 1; });
    const bool has_neg = std::any_of(dataset.begin(), dataset.end(), [](const auto& s) { return s.y == 0; });
    if (!has_pos || !has_neg) {
        throw ValidationError("train_change_detector: dataset must contain both classes");
    }

    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    Rng split_rng(derive_seed(config.seed, "step1-split"));
    split_rng.shuffle(order);
    const auto n_train = static_cast<std::size_t>(
        std::llround(static_cast<double>(dataset.size()) * (1.0 - config.val_fraction)));
    std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> val_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());

    EncoderParams params = init_encoder(config);
    nn::Adam opt(config.lr);
    Rng epoch_rng(derive_seed(config.seed, "step1-epochs"));

    TrainResult result;
    result.params = params;
    result.best_val_acc = -1.0;

    const int d = params.d;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        epoch_rng.shuffle(train_idx);
        double loss_sum = 0.0;
        std::size_t loss_count = 0;
        for (std::size_t start = 0; start < train_idx.size(); start += static_cast<std::size_t>(config.batch)) {
            const std::size_t end = std::min(train_idx.size(), start + static_cast<std::size_t>(config.batch));
            EncoderParams grads = zero_grads_like(params);
            const double inv_batch = 1.0 / static_cast<double>(end - start);
            for (std::size_t k = start; k < end; ++k) {
                const auto& s = dataset[train_idx[k]];
                ForwardTrace trace_e;
                ForwardTrace trace_l;
                const Eigen::VectorXd h_e = encode_with_trace(s.earlier, params, trace_e);
                const Eigen::VectorXd h_l = encode_with_trace(s.later, params, trace_l);
                const Eigen::VectorXd h = pair_embedding(h_e, h_l);
                const double p = change_score(h, params.alpha);
                loss_sum += pair_bce_loss(p, s.y);
                ++loss_count;

                const double dlogit = (p - static_cast<double>(s.y)) * inv_batch;
                grads.alpha.col(0) += dlogit * h;
                const Eigen::VectorXd dh = dlogit * params.alpha.col(0);
                Eigen::VectorXd dh_e;
                Eigen::VectorXd dh_l;
                split_pair_gradient(dh, d, dh_e, dh_l);
                backbone_backward(trace_e, params, dh_e, grads);
                backbone_backward(trace_l, params, dh_l, grads);
            }
            opt.step(tensors(params), tensors(std::as_const(grads)));
        }
        const double val_acc = evaluate_accuracy(dataset, val_idx, params);
        result.log.push_back({epoch, loss_sum / static_cast<double>(loss_count), val_acc});
        if (val_acc > result.best_val_acc) {
            result.best_val_acc = val_acc;
            result.best_epoch = epoch;
            result.params = params;
        }
    }
    return result;
}

TrainResult train_change_detector(
    const std::vector<std::pair<ingest::TimedPair, ingest::PairLabel>>& dataset,
    const EncoderConfig& config) {
    std::vector<LabeledPairImages> samples;
    samples.reserve(dataset.size());
    for (const auto& [pair, label] : dataset) {
        samples.push_back({load_pixels(pair.earlier.pixels_ref), load_pixels(pair.later.pixels_ref),
                           label.y});
    }
    return train_change_detector(samples, config);
}

void write_train_log_csv(const std::string& path, const std::vector<EpochLog>& log) {
    std::ostringstream out;
    out << "epoch,train_loss,val_acc\n";
    for (const auto& row : log) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g\n", row.epoch, row.train_loss, row.val_acc);
        out << buf;
    }
    write_file_atomic(path, out.str());
}

double alpha_grad_check(std::uint64_t seed, double eps, bool mutate_gradient) {
    constexpr int d = 8;
    constexpr int M = 3 * d;
    Rng rng(seed);
    Eigen::VectorXd h_e(d);
    Eigen::VectorXd h_l(d);
    for (int i = 0; i < d; ++i) {
        h_e(i) = rng.uniform(-1.0, 1.0);
        h_l(i) = rng.uniform(-1.0, 1.0);
    }
    Eigen::MatrixXd alpha(M, 1);
    for (int i = 0; i < M; ++i) {
        alpha(i, 0) = rng.uniform(-0.5, 0.5);
    }
    const int y = rng.uniform_int(2) == 0 ? 0 : 1;
    const Eigen::VectorXd h = pair_embedding(h_e, h_l);

    const double p = change_score(h, alpha);
    Eigen::VectorXd analytic = (p - static_cast<double>(y)) * h;
    if (mutate_gradient) {
        analytic(0) += 0.1 * std::max(1.0, std::abs(analytic(0)));
    }

    double max_rel = 0.0;
    for (int i = 0; i < M; ++i) {
        Eigen::MatrixXd a_plus = alpha;
        Eigen::MatrixXd a_minus = alpha;
        a_plus(i, 0) += eps;
        a_minus(i, 0) -= eps;
        const double fd =
            (pair_bce_loss(change_score(h, a_plus), y) - pair_bce_loss(change_score(h, a_minus), y)) /
            (2.0 * eps);
        const double denom = std::max({1e-8, std::abs(fd), std::abs(analytic(i))});
        max_rel = std::max(max_rel, std::abs(fd - analytic(i)) / denom);
    }
    return max_rel;
}

// ---------------------------------------------------------------------------
// Serialization

std::string serialize_encoder(const EncoderParams& params) {
    BinaryWriter w;
    w.u32(kParamsMagic);
    w.u32(kParamsVersion);
    w.u32(kKindEncoder);
    w.u64(params.seed);
    w.i32(params.image_side);
    w.i32(params.d);
    w.i32(params.M);
    w.i32(static_cast<std::int32_t>(params.convs.size()));
    for (const auto& c : params.convs) {
        w.i32(c.in_channels);
        w.i32(c.out_channels);
    }
    for (const auto* t : tensors(params)) {
        w.matrix(*t);
    }
    return std::move(w.buf);
}

std::uint64_t params_hash(const EncoderParams& params) {
    return fnv1a64(serialize_encoder(params));
}

void save_encoder(const std::string& path, const EncoderParams& params) {
    const std::string payload = serialize_encoder(params);
    write_file_atomic(path, payload);
    const json sidecar = {
        {"type", "encoder"},         {"version", kParamsVersion},
        {"d", params.d},             {"M", params.M},
        {"L", params.depth()},       {"image_side", params.image_side},
        {"seed", params.seed},       {"content_hash", to_hex(fnv1a64(payload))},
    };
    write_file_atomic(path + ".json", sidecar.dump(2) + "\n");
}

EncoderParams load_encoder(const std::string& path) {
    const std::string payload = read_file(path);
    BinaryReader r{payload};
    if (r.u32() != kParamsMagic) {
        throw Error("not a parameter file: " + path);
    }
    if (r.u32() != kParamsVersion) {
        throw Error("unsupported parameter file version: " + path);
    }
    if (r.u32() != kKindEncoder) {
        throw Error("parameter file is not an encoder: " + path);
    }
    EncoderParams p;
    p.seed = r.u64();
    p.image_side = r.i32();
    p.d = r.i32();
    p.M = r.i32();
    const int n_convs = r.i32();
    p.convs.resize(static_cast<std::size_t>(n_convs));
    for (auto& c : p.convs) {
        c.in_channels = r.i32();
        c.out_channels = r.i32();
    }
    for (auto* t : tensors(p)) {
        *t = r.matrix();
    }
    return p;
}

// ---------------------------------------------------------------------------
// Embedding cache

namespace {

constexpr std::uint32_t kCacheMagic = 0x424d4547; // "GEMB"
constexpr std::uint32_t kCacheVersion = 1;

} // namespace

EmbeddingCache embed_containers(const std::vector<ingest::NeighborhoodContainer>& containers,
                                const EncoderParams& params) {
    EmbeddingCache cache;
    cache.encoder_hash = params_hash(params);
    cache.M = params.M;
    for (const auto& container : containers) {
        for (const auto& pair : container.pairs) {
            const std::string id = pair.pair_id();
            if (cache.by_pair_id.count(id)) {
                continue;
            }
            const Eigen::VectorXd h_e = encode_image(load_pixels(pair.earlier.pixels_ref), params);
            const Eigen::VectorXd h_l = encode_image(load_pixels(pair.later.pixels_ref), params);
            cache.by_pair_id.emplace(id, pair_embedding(h_e, h_l));
        }
    }
    return cache;
}

void save_embedding_cache(const std::string& path, const EmbeddingCache& cache) {
    BinaryWriter w;
    w.u32(kCacheMagic);
    w.u32(kCacheVersion);
    w.u64(cache.encoder_hash);
    w.i32(cache.M);
    w.u64(cache.by_pair_id.size());
    for (const auto& [id, vec] : cache.by_pair_id) {
        w.u32(static_cast<std::uint32_t>(id.size()));
        w.buf.append(id);
        w.buf.append(reinterpret_cast<const char*>(vec.data()),
                     static_cast<std::size_t>(vec.size()) * sizeof(double));
    }
    write_file_atomic(path, w.buf);
    const json sidecar = {{"type", "embedding_cache"},
                          {"version", kCacheVersion},
                          {"encoder_hash", to_hex(cache.encoder_hash)},
                          {"M", cache.M},
                          {"count", cache.by_pair_id.size()}};
    write_file_atomic(path + ".json", sidecar.dump(2) + "\n");
}

EmbeddingCache load_embedding_cache(const std::string& path) {
    const std::string payload = read_file(path);
    BinaryReader r{payload};
    if (r.u32() != kCacheMagic || r.u32() != kCacheVersion) {
        throw Error("not an embedding cache: " + path);
    }
    EmbeddingCache cache;
    cache.encoder_hash = r.u64();
    cache.M = r.i32();
    const std::uint64_t count = r.u64();
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint32_t len = r.u32();
        std::string id(len, '\0');
        r.raw(id.data(), len);
        Eigen::VectorXd vec(cache.M);
        r.raw(vec.data(), static_cast<std::size_t>(cache.M) * sizeof(double));
        cache.by_pair_id.emplace(std::move(id), std::move(vec));
    }
    return cache;
}

EmbeddingCache ensure_embedding_cache(const std::string& path,
                                      const std::vector<ingest::NeighborhoodContainer>& containers,
                                      const EncoderParams& params) {
    if (file_exists(path)) {
        try {
            EmbeddingCache cache = load_embedding_cache(path);
            if (cache.encoder_hash == params_hash(params)) {
                return cache;
            }
        } catch (const Error&) {
            // fall through to recompute
        }
    }
    EmbeddingCache cache = embed_containers(containers, params);
    save_embedding_cache(path, cache);
    return cache;
}

} // namespace gentrify::enc
