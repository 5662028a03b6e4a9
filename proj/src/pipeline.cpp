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

#include "gentrify/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "gentrify/analysis.hpp"
#include "gentrify/eval.hpp"
#include "gentrify/geo.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace gentrify::pipeline {

namespace {

std::string art(const PipelineConfig& config, const char* name) {
    return config.work_dir + "/" + name;
}

void require_artifact(const std::string& path, const char* producer) {
    if (!file_exists(path)) {
        throw ValidationError("missing artifact " + path + "; run " + producer + " first");
    }
}

/// Manifests store image paths relative to the work dir; resolve for loading.
template <typename Fixup>
void fixup_pixel_refs(const std::string& work_dir, Fixup&& fix) {
    fix([&work_dir](std::string& ref) {
        if (!ref.empty() && !fs::path(ref).is_absolute()) {
            ref = work_dir + "/" + ref;
        }
    });
}

std::vector<std::pair<ingest::TimedPair, ingest::PairLabel>> load_step1_pairs(
    const PipelineConfig& config) {
    const std::string path = art(config, "step1_pairs.jsonl");
    require_artifact(path, "synth (or ingest)");
    auto pairs = ingest::read_pairs_jsonl(path);
    fixup_pixel_refs(config.work_dir, [&pairs](auto&& fix) {
        for (auto& [pair, label] : pairs) {
            fix(pair.earlier.pixels_ref);
            fix(pair.later.pixels_ref);
        }
    });
    return pairs;
}

std::vector<ingest::NeighborhoodContainer> load_containers(const PipelineConfig& config) {
    const std::string path = art(config, "containers.jsonl");
    require_artifact(path, "synth (or ingest)");
    auto containers = ingest::read_containers_jsonl(path);
    fixup_pixel_refs(config.work_dir, [&containers](auto&& fix) {
        for (auto& c : containers) {
            for (auto& p : c.pairs) {
                fix(p.earlier.pixels_ref);
                fix(p.later.pixels_ref);
            }
        }
    });
    return containers;
}

std::vector<ingest::NeighborhoodContainer> gentrifiable_only(
    std::vector<ingest::NeighborhoodContainer> containers) {
    containers.erase(std::remove_if(containers.begin(), containers.end(),
                                    [](const auto& c) {
                                        return c.label == ingest::TractLabel::non_gentrifiable;
                                    }),
                     containers.end());
    return containers;
}

std::string model_display_name(mil::MilMode mode) {
    switch (mode) {
    case mil::MilMode::full: return "Full model";
    case mil::MilMode::mean_pool: return "No attention";
    case mil::MilMode::pretrained_mean_pool: return "Pre-trained & no attention";
    case mil::MilMode::e2e: return "E2E";
    }
    return "Full model";
}

/// Embeddings the configured mode predicts from. full/mean_pool share the
/// Step-1 cache; pretrained_mean_pool uses a freshly initialized reference
/// backbone; e2e uses the jointly trained backbone.
enc::EmbeddingCache mode_cache(const PipelineConfig& config,
                               const std::vector<ingest::NeighborhoodContainer>& containers) {
    switch (config.mil.mode) {
    case mil::MilMode::full:
    case mil::MilMode::mean_pool: {
        const std::string cache_path = art(config, "embeddings.bin");
        require_artifact(cache_path, "embed");
        const std::string enc_path = art(config, "encoder.bin");
        require_artifact(enc_path, "train-step1");
        enc::EmbeddingCache cache = enc::load_embedding_cache(cache_path);
        if (cache.encoder_hash != enc::params_hash(enc::load_encoder(enc_path))) {
            throw ValidationError("embedding cache is stale (encoder changed); run embed first");
        }
        return cache;
    }
    case mil::MilMode::pretrained_mean_pool: {
        const enc::EncoderParams reference = enc::init_encoder(config.encoder);
        return enc::ensure_embedding_cache(art(config, "embeddings_ref.bin"), containers, reference);
    }
    case mil::MilMode::e2e: {
        const std::string enc_path = art(config, "encoder_e2e.bin");
        require_artifact(enc_path, "train-step2");
        return enc::ensure_embedding_cache(art(config, "embeddings_e2e.bin"), containers,
                                           enc::load_encoder(enc_path));
    }
    }
    throw Error("unreachable");
}

json run_synth(const PipelineConfig& config) {
    synth::SynthConfig sc = config.synth;
    const synth::GenResult res = synth::gen_city(sc, config.work_dir);
    return json{{"stage", "synth"},
                {"tracts", res.n_tracts},
                {"bag_pairs", res.n_bag_pairs},
                {"step1_pairs", res.n_step1_pairs},
                {"planted_positives", res.n_planted}};
}

json run_ingest(const PipelineConfig& config) {
    const auto& paths = config.paths;
    if (paths.permits_csv.empty() || paths.businesses_csv.empty() || paths.tracts_geojson.empty() ||
        paths.labels_csv.empty() || paths.archive_manifest.empty() || paths.cpi_table.empty()) {
        throw ValidationError(
            "ingest needs paths.permits_csv, paths.businesses_csv, paths.tracts_geojson, "
            "paths.labels_csv, paths.archive_manifest and paths.cpi_table in the config");
    }
    ensure_dir(config.work_dir);

    const ingest::CpiTable cpi = ingest::read_cpi_table(paths.cpi_table);
    const auto permits = ingest::parse_permits_csv(read_csv(paths.permits_csv));
    ingest::PermitFilterConfig pf;
    pf.min_value = config.ingest.min_value;
    pf.base_year = config.ingest.base_year;
    auto events = ingest::filter_permits(permits.records, cpi, pf);

    const ingest::NaicsMapping mapping = paths.naics_mapping.empty()
                                             ? ingest::default_naics_mapping()
                                             : ingest::read_naics_mapping(paths.naics_mapping);
    const auto businesses = ingest::parse_businesses_csv(read_csv(paths.businesses_csv));
    const auto conversions = ingest::detect_business_conversions(businesses.records, mapping);
    events.insert(events.end(), conversions.begin(), conversions.end());

    const auto archive = ingest::read_archive_manifest(paths.archive_manifest);
    const auto weak = ingest::build_weak_labeled_pairs(events, archive, config.ingest.radius_m);

    const auto tracts = geo::read_tracts_geojson(paths.tracts_geojson);
    const auto labels = ingest::read_labels_csv(paths.labels_csv);
    ingest::ContainerBuildConfig cb;
    cb.k_min = config.ingest.k_min;
    cb.k_max = config.ingest.k_max;
    cb.seed = config.ingest.seed;
    const auto build = ingest::build_neighborhood_containers(archive, tracts, labels, cb);

    ingest::write_events_jsonl(art(config, "events.jsonl"), events);
    ingest::write_pairs_jsonl(art(config, "step1_pairs.jsonl"), weak.pairs);
    ingest::write_containers_jsonl(art(config, "containers.jsonl"), build.containers);
    write_file_atomic(art(config, "tracts.geojson"), geo::tracts_to_geojson(tracts));
    ingest::write_labels_csv(art(config, "labels.csv"), labels);

    json skip_reasons = json::array();
    for (const auto& [index, reason] : weak.skipped) {
        skip_reasons.push_back({{"event_index", index}, {"reason", ingest::to_string(reason)}});
    }
    const json report{{"stage", "ingest"},
                      {"permit_rows_skipped", permits.skipped_rows},
                      {"business_rows_skipped", businesses.skipped_rows},
                      {"events", events.size()},
                      {"weak_pairs", weak.pairs.size()},
                      {"events_skipped", skip_reasons},
                      {"containers", build.containers.size()},
                      {"excluded_tracts", build.excluded_tracts}};
    write_file_atomic(art(config, "ingest_report.json"), report.dump(2) + "\n");
    return report;
}

json run_train_step1(const PipelineConfig& config) {
    const auto pairs = load_step1_pairs(config);
    const enc::TrainResult result = enc::train_change_detector(pairs, config.encoder);
    enc::save_encoder(art(config, "encoder.bin"), result.params);
    enc::write_train_log_csv(art(config, "step1_train_log.csv"), result.log);
    return json{{"stage", "train-step1"},
                {"pairs", pairs.size()},
                {"best_val_acc", result.best_val_acc},
                {"best_epoch", result.best_epoch},
                {"params", art(config, "encoder.bin")}};
}

json run_embed(const PipelineConfig& config) {
    const std::string enc_path = art(config, "encoder.bin");
    require_artifact(enc_path, "train-step1");
    const auto containers = load_containers(config);
    const enc::EncoderParams params = enc::load_encoder(enc_path);
    const enc::EmbeddingCache cache =
        enc::ensure_embedding_cache(art(config, "embeddings.bin"), containers, params);
    return json{{"stage", "embed"},
                {"pairs", cache.by_pair_id.size()},
                {"M", cache.M},
                {"encoder_hash", to_hex(cache.encoder_hash)}};
}

json run_train_step2(const PipelineConfig& config) {
    const auto containers = gentrifiable_only(load_containers(config));
    mil::MilConfig mc = config.mil;
    mc.split_ratio = config.split.ratio;
    mc.split_seed = config.split.seed;

    mil::MilTrainResult result;
    if (mc.mode == mil::MilMode::e2e) {
        result = mil::train_mil_e2e(containers, config.encoder, mc);
        enc::save_encoder(art(config, "encoder_e2e.bin"), *result.encoder);
    } else {
        enc::EmbeddingCache cache;
        if (mc.mode == mil::MilMode::pretrained_mean_pool) {
            const enc::EncoderParams reference = enc::init_encoder(config.encoder);
            cache = enc::ensure_embedding_cache(art(config, "embeddings_ref.bin"), containers, reference);
        } else {
            cache = mode_cache(config, containers);
        }
        result = mil::train_mil(cache, containers, mc);
    }
    mil::save_attention(art(config, "attention.bin"), result.params);
    mil::write_mil_train_log_csv(art(config, "step2_train_log.csv"), result.log);
    return json{{"stage", "train-step2"},
                {"mode", mil::to_string(mc.mode)},
                {"bags", containers.size()},
                {"best_val_balanced_acc", result.best_val_balanced_acc},
                {"best_epoch", result.best_epoch},
                {"params", art(config, "attention.bin")}};
}

json run_eval(const PipelineConfig& config) {
    const std::string attn_path = art(config, "attention.bin");
    require_artifact(attn_path, "train-step2");
    const auto containers = gentrifiable_only(load_containers(config));
    const enc::EmbeddingCache cache = mode_cache(config, containers);
    const mil::AttentionParams params = mil::load_attention(attn_path);
    const auto bags = mil::make_bags(containers, cache);

    std::vector<int> labels;
    labels.reserve(bags.size());
    for (const auto& b : bags) {
        labels.push_back(b.label);
    }
    const auto split = eval::stratified_split(labels, config.split.ratio, config.split.seed);

    std::vector<int> y_true;
    std::vector<int> y_pred;
    std::ostringstream preds;
    preds << "tract_id,label,prediction,probability,in_test\n";
    std::vector<bool> in_test(bags.size(), false);
    for (const std::size_t i : split.test) {
        in_test[i] = true;
    }
    for (std::size_t i = 0; i < bags.size(); ++i) {
        const double p = mil::predict_bag(bags[i], params, config.mil.mode);
        const int pred = p >= 0.5 ? 1 : 0;
        if (in_test[i]) {
            y_true.push_back(bags[i].label);
            y_pred.push_back(pred);
        }
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.9g,%d\n", bags[i].tract_id.c_str(),
                      bags[i].label == 1 ? "gentrifying" : "non_gentrifying",
                      pred == 1 ? "gentrifying" : "non_gentrifying", p, in_test[i] ? 1 : 0);
        preds << buf;
    }
    const eval::Metrics metrics = eval::compute_metrics(y_true, y_pred);
    const eval::ReportRow row{config.city, model_display_name(config.mil.mode), metrics};

    write_file_atomic(art(config, "predictions.csv"), preds.str());
    write_file_atomic(art(config, "metrics.json"), eval::metrics_to_json(row) + "\n");
    write_file_atomic(art(config, "metrics_table.txt"), eval::format_metrics_table({row}));

    return json{{"stage", "eval"},
                {"eval_city", row.city},
                {"model", row.model},
                {"test_bags", y_true.size()},
                {"accuracy", metrics.accuracy},
                {"balanced_accuracy", metrics.balanced_accuracy},
                {"recall", metrics.recall}};
}

json run_analyze(const PipelineConfig& config) {
    const std::string attn_path = art(config, "attention.bin");
    require_artifact(attn_path, "train-step2");
    const auto containers = gentrifiable_only(load_containers(config));
    const enc::EmbeddingCache cache = mode_cache(config, containers);
    const mil::AttentionParams params = mil::load_attention(attn_path);
    const auto bags = mil::make_bags(containers, cache);

    // Per-instance weights, ungrouped.
    std::ostringstream weights;
    weights << "tract_id,pair_id,a_i\n";
    for (const auto& bag : bags) {
        const Eigen::VectorXd a = mil::attention_weights(bag.H, params);
        for (std::size_t i = 0; i < bag.pair_ids.size(); ++i) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%s,%s,%.12g\n", bag.tract_id.c_str(),
                          bag.pair_ids[i].c_str(), a(static_cast<Eigen::Index>(i)));
            weights << buf;
        }
    }
    write_file_atomic(art(config, "weights.csv"), weights.str());

    const analysis::CurveReport report = analysis::curve_report(bags, params);
    write_file_atomic(art(config, "curves.csv"), report.curves_csv);
    write_file_atomic(art(config, "curve_summary.csv"), report.summary_csv);
    analysis::render_curve_plot(art(config, "curves.svg"), bags, params);

    // Evidence pairs: image refs for the extreme weights of every bag.
    std::map<std::string, std::pair<std::string, std::string>> refs;
    for (const auto& c : containers) {
        for (const auto& p : c.pairs) {
            refs[p.pair_id()] = {p.earlier.pixels_ref, p.later.pixels_ref};
        }
    }
    json extremes = json::array();
    for (const auto& bag : bags) {
        const analysis::ExtremePairs ex = analysis::extreme_pairs(bag, params);
        auto dump_side = [&refs](const std::vector<analysis::WeightedPair>& side) {
            json arr = json::array();
            for (const auto& wp : side) {
                const auto& [earlier_ref, later_ref] = refs.at(wp.pair_id);
                arr.push_back({{"pair_id", wp.pair_id},
                               {"weight", wp.weight},
                               {"earlier", earlier_ref},
                               {"later", later_ref}});
            }
            return arr;
        };
        extremes.push_back({{"tract_id", bag.tract_id},
                            {"truncated", ex.truncated},
                            {"top", dump_side(ex.top)},
                            {"bottom", dump_side(ex.bottom)}});
    }
    write_file_atomic(art(config, "extreme_pairs.json"), extremes.dump(2) + "\n");

    return json{{"stage", "analyze"},
                {"bags", bags.size()},
                {"curves_csv", art(config, "curves.csv")},
                {"weights_csv", art(config, "weights.csv")}};
}

json run_map(const PipelineConfig& config) {
    const std::string preds_path = art(config, "predictions.csv");
    require_artifact(preds_path, "eval");
    const auto containers = gentrifiable_only(load_containers(config));

    const CsvTable preds = read_csv(preds_path);
    const int c_id = preds.column("tract_id");
    const int c_label = preds.column("label");
    const int c_pred = preds.column("prediction");
    if (c_id < 0 || c_label < 0 || c_pred < 0) {
        throw Error("predictions.csv is malformed; re-run eval");
    }
    std::map<std::string, std::string> labels;
    std::map<std::string, std::string> predictions;
    for (const auto& row : preds.rows) {
        labels[row.at(static_cast<std::size_t>(c_id))] = row.at(static_cast<std::size_t>(c_label));
        predictions[row.at(static_cast<std::size_t>(c_id))] = row.at(static_cast<std::size_t>(c_pred));
    }
    const auto classes = analysis::discrepancy_classes(labels, predictions);

    std::vector<geo::TractPolygon> tracts;
    tracts.reserve(containers.size());
    for (const auto& c : containers) {
        tracts.push_back(c.tract);
    }
    write_file_atomic(art(config, "discrepancy_map.geojson"), analysis::export_map(tracts, classes));

    std::map<std::string, int> counts;
    for (const auto& rec : classes) {
        ++counts[rec.klass];
    }
    return json{{"stage", "map"}, {"tracts", classes.size()}, {"class_counts", counts}};
}

json run_fetch(const PipelineConfig& config) {
    if (config.paths.roads_geojson.empty()) {
        throw ValidationError("fetch needs paths.roads_geojson to pick sample coordinates");
    }
    ensure_dir(config.work_dir);
    const geo::RoadNetwork roads = geo::read_roads_geojson(config.paths.roads_geojson);
    const auto coords = geo::sample_road_points(roads, config.ingest.spacing_m, config.ingest.seed);
    fetch::FetchConfig fc = config.fetch;
    if (fc.cache_dir.empty()) {
        fc.cache_dir = art(config, "fetch_cache");
    }
    const fetch::FetchResult result = fetch::fetch_street_views(coords, fetch::DateRange{}, fc);
    fetch::write_fetch_manifest(art(config, "fetch_manifest.jsonl"), result);
    return json{{"stage", "fetch"},
                {"coordinates", coords.size()},
                {"images", result.images.size()},
                {"failures", result.failures.size()},
                {"network_requests", result.network_requests},
                {"cache_hits", result.cache_hits},
                {"quota_stopped", result.quota_stopped},
                {"resume_cursor", result.resume_cursor}};
}

} // namespace

PipelineConfig PipelineConfig::from_json(const json& j) {
    PipelineConfig c;
    c.city = j.value("city", c.city);
    c.work_dir = j.value("work_dir", c.work_dir);
    if (j.contains("paths")) {
        const auto& p = j["paths"];
        c.paths.archive_manifest = p.value("archive_manifest", "");
        c.paths.permits_csv = p.value("permits_csv", "");
        c.paths.businesses_csv = p.value("businesses_csv", "");
        c.paths.tracts_geojson = p.value("tracts_geojson", "");
        c.paths.roads_geojson = p.value("roads_geojson", "");
        c.paths.labels_csv = p.value("labels_csv", "");
        c.paths.naics_mapping = p.value("naics_mapping", "");
        c.paths.cpi_table = p.value("cpi_table", "");
    }
    if (j.contains("synth")) {
        const auto& s = j["synth"];
        c.synth.seed = s.value("seed", c.synth.seed);
        c.synth.n_tracts = s.value("n_tracts", c.synth.n_tracts);
        c.synth.k = s.value("k", c.synth.k);
        c.synth.rho_gentrifying = s.value("rho_gentrifying", c.synth.rho_gentrifying);
        c.synth.rho_non = s.value("rho_non", c.synth.rho_non);
        c.synth.image_side = s.value("image_side", c.synth.image_side);
        c.synth.nuisance_level = s.value("nuisance_level", c.synth.nuisance_level);
        c.synth.step1_pairs = s.value("step1_pairs", c.synth.step1_pairs);
    }
    if (j.contains("encoder")) {
        const auto& e = j["encoder"];
        c.encoder.image_side = e.value("image_side", c.encoder.image_side);
        c.encoder.d = e.value("d", c.encoder.d);
        c.encoder.base_channels = e.value("base_channels", c.encoder.base_channels);
        c.encoder.conv_blocks = e.value("conv_blocks", c.encoder.conv_blocks);
        c.encoder.epochs = e.value("epochs", c.encoder.epochs);
        c.encoder.batch = e.value("batch", c.encoder.batch);
        c.encoder.lr = e.value("lr", c.encoder.lr);
        c.encoder.val_fraction = e.value("val_fraction", c.encoder.val_fraction);
        c.encoder.seed = e.value("seed", c.encoder.seed);
    }
    if (j.contains("mil")) {
        const auto& m = j["mil"];
        c.mil.attn_width = m.value("W", c.mil.attn_width);
        c.mil.epochs = m.value("epochs", c.mil.epochs);
        c.mil.lr = m.value("lr", c.mil.lr);
        c.mil.weight_decay = m.value("weight_decay", c.mil.weight_decay);
        c.mil.seed = m.value("seed", c.mil.seed);
        c.mil.class_weights = m.value("class_weights", c.mil.class_weights);
        c.mil.e2e_epochs = m.value("e2e_epochs", c.mil.e2e_epochs);
        if (m.contains("mode")) {
            c.mil.mode = mil::mil_mode_from_string(m["mode"].get<std::string>());
        }
    }
    if (j.contains("ingest")) {
        const auto& i = j["ingest"];
        c.ingest.spacing_m = i.value("spacing_m", c.ingest.spacing_m);
        c.ingest.radius_m = i.value("radius_m", c.ingest.radius_m);
        c.ingest.min_value = i.value("min_value", c.ingest.min_value);
        c.ingest.base_year = i.value("base_year", c.ingest.base_year);
        c.ingest.k_min = i.value("k_min", c.ingest.k_min);
        c.ingest.k_max = i.value("k_max", c.ingest.k_max);
        c.ingest.seed = i.value("seed", c.ingest.seed);
    }
    if (j.contains("split")) {
        c.split.ratio = j["split"].value("ratio", c.split.ratio);
        c.split.seed = j["split"].value("seed", c.split.seed);
    }
    if (j.contains("fetch")) {
        const auto& f = j["fetch"];
        c.fetch.base_url = f.value("base_url", "");
        c.fetch.api_key_env = f.value("api_key_env", c.fetch.api_key_env);
        c.fetch.rate_limit_rps = f.value("rate_limit_rps", c.fetch.rate_limit_rps);
        c.fetch.cache_dir = f.value("cache_dir", "");
        c.fetch.max_retries = f.value("max_retries", c.fetch.max_retries);
        c.fetch.backoff_initial_s = f.value("backoff_initial_s", c.fetch.backoff_initial_s);
        c.fetch.heading = f.value("heading", c.fetch.heading);
    }
    return c;
}

PipelineConfig PipelineConfig::from_json_file(const std::string& path) {
    try {
        return from_json(json::parse(read_file(path)));
    } catch (const json::parse_error& e) {
        throw ValidationError("invalid config JSON in " + path + ": " + e.what());
    }
}

json PipelineConfig::to_json() const {
    return json{
        {"city", city},
        {"work_dir", work_dir},
        {"paths",
         {{"archive_manifest", paths.archive_manifest},
          {"permits_csv", paths.permits_csv},
          {"businesses_csv", paths.businesses_csv},
          {"tracts_geojson", paths.tracts_geojson},
          {"roads_geojson", paths.roads_geojson},
          {"labels_csv", paths.labels_csv},
          {"naics_mapping", paths.naics_mapping},
          {"cpi_table", paths.cpi_table}}},
        {"synth",
         {{"seed", synth.seed},
          {"n_tracts", synth.n_tracts},
          {"k", synth.k},
          {"rho_gentrifying", synth.rho_gentrifying},
          {"rho_non", synth.rho_non},
          {"image_side", synth.image_side},
          {"nuisance_level", synth.nuisance_level},
          {"step1_pairs", synth.step1_pairs}}},
        {"encoder",
         {{"image_side", encoder.image_side},
          {"d", encoder.d},
          {"base_channels", encoder.base_channels},
          {"conv_blocks", encoder.conv_blocks},
          {"epochs", encoder.epochs},
          {"batch", encoder.batch},
          {"lr", encoder.lr},
          {"val_fraction", encoder.val_fraction},
          {"seed", encoder.seed}}},
        {"mil",
         {{"W", mil.attn_width},
          {"mode", mil::to_string(mil.mode)},
          {"epochs", mil.epochs},
          {"lr", mil.lr},
          {"weight_decay", mil.weight_decay},
          {"seed", mil.seed},
          {"class_weights", mil.class_weights},
          {"e2e_epochs", mil.e2e_epochs}}},
        {"ingest",
         {{"spacing_m", ingest.spacing_m},
          {"radius_m", ingest.radius_m},
          {"min_value", ingest.min_value},
          {"base_year", ingest.base_year},
          {"k_min", ingest.k_min},
          {"k_max", ingest.k_max},
          {"seed", ingest.seed}}},
        {"split", {{"ratio", split.ratio}, {"seed", split.seed}}},
        {"fetch",
         {{"base_url", fetch.base_url},
          {"api_key_env", fetch.api_key_env},
          {"rate_limit_rps", fetch.rate_limit_rps},
          {"cache_dir", fetch.cache_dir},
          {"max_retries", fetch.max_retries},
          {"backoff_initial_s", fetch.backoff_initial_s},
          {"heading", fetch.heading}}},
    };
}

json run_stage(const PipelineConfig& config, const std::string& stage) {
    if (stage == "synth") return run_synth(config);
    if (stage == "ingest") return run_ingest(config);
    if (stage == "train-step1") return run_train_step1(config);
    if (stage == "embed") return run_embed(config);
    if (stage == "train-step2") return run_train_step2(config);
    if (stage == "eval") return run_eval(config);
    if (stage == "analyze") return run_analyze(config);
    if (stage == "map") return run_map(config);
    if (stage == "fetch") return run_fetch(config);
    throw ValidationError("unknown stage '" + stage + "'");
}

} // namespace gentrify::pipeline
