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

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "gentrify/analysis.hpp"
#include "gentrify/encoder.hpp"
#include "gentrify/eval.hpp"
#include "gentrify/geo.hpp"
#include "gentrify/mil.hpp"
#include "gentrify/pipeline.hpp"
#include "gentrify/synthcity.hpp"

namespace py = pybind11;
using namespace gentrify;

namespace {

using LatLon = std::pair<double, double>;

geo::GeoCoordinate coord(const LatLon& p) { return geo::make_coordinate(p.first, p.second); }

geo::TractPolygon ring_to_polygon(const std::vector<LatLon>& ring) {
    geo::TractPolygon poly;
    poly.tract_id = "ring";
    for (const auto& p : ring) {
        poly.ring.push_back(coord(p));
    }
    return poly;
}

mil::AttentionParams pack_attention(const Eigen::MatrixXd& V, const Eigen::MatrixXd& U,
                                    const Eigen::VectorXd& w, const Eigen::VectorXd& beta) {
    mil::AttentionParams params;
    params.V = V;
    params.U = U;
    params.w = w;
    params.beta = beta;
    return params;
}

/// Instances arrive numpy-style as rows (K, M); the core wants columns.
Eigen::MatrixXd instances_to_columns(const Eigen::MatrixXd& H_rows) {
    return H_rows.transpose();
}

py::array_t<std::uint8_t> image_to_numpy(const ImageTensor& img) {
    py::array_t<std::uint8_t> arr({img.side, img.side, 3});
    auto view = arr.mutable_unchecked<3>();
    for (int y = 0; y < img.side; ++y) {
        for (int x = 0; x < img.side; ++x) {
            for (int c = 0; c < 3; ++c) {
                view(y, x, c) = img.at(c, y, x);
            }
        }
    }
    return arr;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Street-level gentrification detection: Siamese change detection plus "
              "gated-attention multi-instance pooling.";

    py::register_exception<ValidationError>(m, "GentrifyValidationError", PyExc_ValueError);

    // ---- geodesy -----------------------------------------------------------
    m.def(
        "haversine_distance",
        [](const LatLon& a, const LatLon& b) { return geo::haversine_distance(coord(a), coord(b)); },
        py::arg("a"), py::arg("b"),
        "Great-circle distance in meters between (lat, lon) pairs.");

    m.def(
        "point_in_tract",
        [](const LatLon& p, const std::vector<LatLon>& ring) {
            return geo::point_in_tract(coord(p), ring_to_polygon(ring));
        },
        py::arg("point"), py::arg("ring"),
        "Even-odd containment of a (lat, lon) point in a closed ring; boundary counts as inside.");

    m.def(
        "sample_road_points",
        [](const std::vector<std::vector<LatLon>>& segments, double spacing_m, std::uint64_t seed,
           bool jitter) {
            geo::RoadNetwork network;
            for (const auto& line : segments) {
                std::vector<geo::GeoCoordinate> polyline;
                for (const auto& p : line) {
                    polyline.push_back(coord(p));
                }
                network.segments.push_back(std::move(polyline));
            }
            std::vector<LatLon> out;
            for (const auto& p : geo::sample_road_points(network, spacing_m, seed, jitter)) {
                out.emplace_back(p.lat, p.lon);
            }
            return out;
        },
        py::arg("segments"), py::arg("spacing_m") = 75.0, py::arg("seed") = 0,
        py::arg("jitter") = false, "Arc-length walk over road polylines of (lat, lon) vertices.");

    // ---- pair scoring (step 1) ---------------------------------------------
    m.def(
        "pair_embedding",
        [](const Eigen::VectorXd& h_e, const Eigen::VectorXd& h_l) {
            return enc::pair_embedding(h_e, h_l);
        },
        py::arg("h_earlier"), py::arg("h_later"),
        "Block vector [later - earlier; later; earlier] of dimension 3d.");

    m.def(
        "change_score",
        [](const Eigen::VectorXd& h, const Eigen::VectorXd& alpha) {
            return enc::change_score(h, Eigen::MatrixXd(alpha));
        },
        py::arg("h"), py::arg("alpha"), "sigmoid(alpha . h)");

    m.def("pair_bce_loss", &enc::pair_bce_loss, py::arg("p"), py::arg("y"));
    m.def("classify_pair", &enc::classify_pair, py::arg("p"), py::arg("threshold") = 0.5);
    m.def("alpha_grad_check", &enc::alpha_grad_check, py::arg("seed"), py::arg("eps") = 1e-5,
          py::arg("mutate_gradient") = false);

    // ---- gated attention (step 2) ------------------------------------------
    m.def(
        "attention_weights",
        [](const Eigen::MatrixXd& instances, const Eigen::MatrixXd& V, const Eigen::MatrixXd& U,
           const Eigen::VectorXd& w) {
            Eigen::VectorXd beta = Eigen::VectorXd::Zero(V.cols());
            return mil::attention_weights(instances_to_columns(instances),
                                          pack_attention(V, U, w, beta));
        },
        py::arg("instances"), py::arg("V"), py::arg("U"), py::arg("w"),
        "Gated-attention weights for instances given as a (K, M) array.");

    m.def(
        "aggregate",
        [](const Eigen::MatrixXd& instances, const Eigen::VectorXd& a) {
            return mil::aggregate(instances_to_columns(instances), a);
        },
        py::arg("instances"), py::arg("weights"), "Weighted instance sum over a (K, M) array.");

    m.def(
        "neighborhood_score",
        [](const Eigen::VectorXd& n, const Eigen::VectorXd& beta) {
            return mil::neighborhood_score(n, Eigen::MatrixXd(beta));
        },
        py::arg("n"), py::arg("beta"), "sigmoid(beta . n)");

    m.def("bag_bce_loss", &mil::bag_bce_loss, py::arg("P"), py::arg("Y"));

    m.def(
        "init_attention",
        [](int attn_width, int embedding_dim, std::uint64_t seed) {
            const mil::AttentionParams p = mil::init_attention(attn_width, embedding_dim, seed);
            return py::make_tuple(p.V, p.U, Eigen::VectorXd(p.w.col(0)),
                                  Eigen::VectorXd(p.beta.col(0)));
        },
        py::arg("attn_width"), py::arg("embedding_dim"), py::arg("seed"),
        "Returns (V, U, w, beta) with the reference initialization.");

    m.def(
        "attention_grad_check",
        [](std::uint64_t seed, double eps, bool mutate) {
            Rng rng(seed);
            std::vector<mil::Bag> batch;
            for (int b = 0; b < 2; ++b) {
                mil::Bag bag;
                bag.tract_id = "bag";
                bag.label = b % 2;
                bag.H.resize(8, 5);
                for (int j = 0; j < 5; ++j) {
                    for (int i = 0; i < 8; ++i) {
                        bag.H(i, j) = rng.uniform(-1, 1);
                    }
                }
                batch.push_back(std::move(bag));
            }
            mil::AttentionParams params = mil::init_attention(4, 8, rng.next());
            for (Eigen::Index i = 0; i < params.w.rows(); ++i) {
                params.w(i, 0) = rng.uniform(-1, 1);
            }
            for (Eigen::Index i = 0; i < params.beta.rows(); ++i) {
                params.beta(i, 0) = rng.uniform(-1, 1);
            }
            return mil::grad_check(params, batch, eps, mutate);
        },
        py::arg("seed"), py::arg("eps") = 1e-5, py::arg("mutate_gradient") = false,
        "Max relative error of the attention backward pass vs central differences on a K=5, "
        "M=8, W=4 instance.");

    // ---- evaluation ----------------------------------------------------------
    m.def(
        "compute_metrics",
        [](const std::vector<int>& y_true, const std::vector<int>& y_pred) {
            const eval::Metrics metrics = eval::compute_metrics(y_true, y_pred);
            py::dict out;
            out["accuracy"] = metrics.accuracy;
            out["balanced_accuracy"] = metrics.balanced_accuracy;
            out["recall"] = metrics.recall;
            out["tp"] = metrics.tp;
            out["fp"] = metrics.fp;
            out["tn"] = metrics.tn;
            out["fn"] = metrics.fn;
            return out;
        },
        py::arg("y_true"), py::arg("y_pred"));

    m.def(
        "stratified_split",
        [](const std::vector<int>& labels, double ratio, std::uint64_t seed) {
            const eval::SplitResult split = eval::stratified_split(labels, ratio, seed);
            return py::make_tuple(split.train, split.test, split.stratified);
        },
        py::arg("labels"), py::arg("ratio") = 0.7, py::arg("seed") = 13,
        "Returns (train_indices, test_indices, stratified).");

    // ---- synthetic oracle ----------------------------------------------------
    m.def(
        "render_scene_pair",
        [](std::uint64_t seed, bool change, int image_side, double nuisance_level) {
            synth::SynthConfig config;
            config.image_side = image_side;
            config.nuisance_level = nuisance_level;
            const synth::ScenePair pair = synth::render_scene_pair(seed, change, config);
            return py::make_tuple(image_to_numpy(pair.earlier), image_to_numpy(pair.later),
                                  pair.label);
        },
        py::arg("seed"), py::arg("change"), py::arg("image_side") = 64,
        py::arg("nuisance_level") = 0.6,
        "Deterministic synthetic pair as (earlier, later, label) with (H, W, 3) uint8 arrays.");

    // ---- pipeline -------------------------------------------------------------
    m.def(
        "run_stage",
        [](const std::string& stage, const std::string& config_json) {
            const pipeline::PipelineConfig config =
                pipeline::PipelineConfig::from_json(nlohmann::json::parse(config_json));
            return pipeline::run_stage(config, stage).dump();
        },
        py::arg("stage"), py::arg("config_json") = "{}",
        "Runs one pipeline stage (synth | train-step1 | embed | train-step2 | eval | analyze | "
        "map | ingest | fetch) and returns its JSON summary.");

    m.def("default_config", [] { return pipeline::PipelineConfig{}.to_json().dump(); });

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
