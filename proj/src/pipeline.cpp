#include "cascade/pipeline.hpp"

#include <algorithm>
#include <fstream>

#include "cascade/errors.hpp"
#include "cascade/log.hpp"

namespace cascade {

namespace {

void merge_mfcc(MfccConfig& mfcc, const Json& j) {
    for (const auto& [key, value] : j.items()) {
        if (key == "preemphasis_alpha") mfcc.preemphasis_alpha = value.get<double>();
        else if (key == "frame_length_ms") mfcc.frame_length_ms = value.get<double>();
        else if (key == "hop_ms") mfcc.hop_ms = value.get<double>();
        else if (key == "fft_size") mfcc.fft_size = value.get<std::size_t>();
        else if (key == "mel_filter_count") mfcc.mel_filter_count = value.get<std::size_t>();
        else if (key == "static_coeff_count") mfcc.static_coeff_count = value.get<std::size_t>();
        else if (key == "delta_window") mfcc.delta_window = value.get<std::size_t>();
        else if (key == "include_c0") mfcc.include_c0 = value.get<bool>();
        else if (key == "cepstral_mean_normalization") mfcc.cepstral_mean_normalization = value.get<bool>();
        else throw SchemaError("unknown mfcc field '" + key + "'");
    }
}

void merge_train(TrainOptions& t, const Json& j) {
    for (const auto& [key, value] : j.items()) {
        if (key == "hmm_states") t.hmm_states = value.get<std::size_t>();
        else if (key == "hmm_mixtures") t.hmm_mixtures = value.get<std::size_t>();
        else if (key == "hmm_max_iters") t.hmm_max_iters = value.get<std::size_t>();
        else if (key == "hmm_rel_tol") t.hmm_rel_tol = value.get<double>();
        else if (key == "gmm_mixtures") t.gmm_mixtures = value.get<std::size_t>();
        else if (key == "gmm_max_iters") t.gmm_max_iters = value.get<std::size_t>();
        else if (key == "gmm_rel_tol") t.gmm_rel_tol = value.get<double>();
        else if (key == "vq_codebook_size") t.vq_codebook_size = value.get<std::size_t>();
        else if (key == "svm_c") t.svm_c = value.get<double>();
        else if (key == "svm_epochs") t.svm_epochs = value.get<std::size_t>();
        else throw SchemaError("unknown train field '" + key + "'");
    }
}

void merge_synth(SynthSpec& s, const Json& j) {
    for (const auto& [key, value] : j.items()) {
        if (key == "speaker_count") s.speaker_count = value.get<std::size_t>();
        else if (key == "emotions") {
            s.emotions.clear();
            for (const auto& e : value) {
                const auto parsed = emotion_from_name(e.get<std::string>());
                if (!parsed) throw ValidationError("unknown emotion '" + e.get<std::string>() + "'");
                s.emotions.push_back(*parsed);
            }
        } else if (key == "sentence_count") s.sentence_count = value.get<std::size_t>();
        else if (key == "repetition_count") s.repetition_count = value.get<std::size_t>();
        else if (key == "sample_rate") s.sample_rate = value.get<std::uint32_t>();
        else if (key == "utterance_seconds") s.utterance_seconds = value.get<double>();
        else if (key == "speaker_separation") s.speaker_separation = value.get<double>();
        else if (key == "emotion_separation") s.emotion_separation = value.get<double>();
        else if (key == "noise_level") s.noise_level = value.get<double>();
        else if (key == "seed") s.seed = value.get<std::uint64_t>();
        else throw SchemaError("unknown synth field '" + key + "'");
    }
}

std::filesystem::path feature_path(const std::filesystem::path& features_dir,
                                   const std::string& record_path) {
    return features_dir / (std::filesystem::path(record_path).stem().string() + ".feat");
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

Json accuracy_to_json(const AccuracyTable& table, const ConfusionMatrix& cm) {
    Json j;
    j["labels"] = table.labels;
    Json per = Json::object();
    for (std::size_t i = 0; i < table.labels.size(); ++i) per[table.labels[i]] = table.accuracy_pct[i];
    j["per_label_pct"] = std::move(per);
    j["mean_pct"] = table.mean_pct;
    j["confusion_labels"] = cm.labels;
    j["confusion"] = cm.counts;
    return j;
}

}  // namespace

RunConfig run_config_from_json_file(const std::filesystem::path& path) {
    const Json j = read_json_file(path);
    if (!j.is_object()) throw SchemaError("run config must be a JSON object");
    RunConfig c;
    for (const auto& [key, value] : j.items()) {
        if (key == "corpus_dir") c.corpus_dir = value.get<std::string>();
        else if (key == "features_dir") c.features_dir = value.get<std::string>();
        else if (key == "model_dir") c.model_dir = value.get<std::string>();
        else if (key == "report_dir") c.report_dir = value.get<std::string>();
        else if (key == "classifier") c.classifier = classifier_kind_from_name(value.get<std::string>());
        else if (key == "mfcc") merge_mfcc(c.mfcc, value);
        else if (key == "train") merge_train(c.train, value);
        else if (key == "synth") merge_synth(c.synth, value);
        else if (key == "seed") c.seed = value.get<std::uint64_t>();
        else throw SchemaError("unknown config field '" + key + "'");
    }
    return c;
}

std::vector<FeatureSequence> load_or_compute_features(const CorpusManifest& manifest,
                                                      const std::filesystem::path& corpus_dir,
                                                      const std::filesystem::path& features_dir,
                                                      const MfccConfig& mfcc) {
    ensure_dir(features_dir);
    const auto total = static_cast<std::ptrdiff_t>(manifest.records.size());
    std::vector<FeatureSequence> features(manifest.records.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < total; ++i) {
        const auto& r = manifest.records[static_cast<std::size_t>(i)];
        const std::filesystem::path cache = feature_path(features_dir, r.path);
        if (std::filesystem::exists(cache)) {
            features[static_cast<std::size_t>(i)] = read_feature_cache(cache);
        } else {
            const AudioClip clip = read_wav(corpus_dir / r.path);
            features[static_cast<std::size_t>(i)] = compute_features(clip, mfcc);
            write_feature_cache(cache, features[static_cast<std::size_t>(i)]);
        }
    }
    return features;
}

std::filesystem::path cmd_generate(const SynthSpec& spec, const std::filesystem::path& out_dir) {
    generate_corpus(spec, out_dir);
    return out_dir / "manifest.jsonl";
}

std::size_t cmd_featurize(const RunConfig& config) {
    const CorpusManifest manifest = load_manifest(config.corpus_dir / "manifest.jsonl");
    load_or_compute_features(manifest, config.corpus_dir, config.features_dir, config.mfcc);
    return manifest.records.size();
}

std::filesystem::path cmd_train(const RunConfig& config) {
    const CorpusManifest manifest = load_manifest(config.corpus_dir / "manifest.jsonl");
    const auto [train_half, test_half] = split_published_protocol(manifest);
    (void)test_half;
    const std::vector<FeatureSequence> features =
        load_or_compute_features(train_half, config.corpus_dir, config.features_dir, config.mfcc);
    const TrainedSystem system =
        train_system(train_half, features, config.classifier, config.train, config.seed);
    save_system(system, config.model_dir);

    Json run;
    run["version"] = 1;
    run["seed"] = config.seed;
    run["classifier"] = classifier_kind_name(config.classifier);
    run["train_utterances"] = train_half.records.size();
    write_json_file(run, config.model_dir / "train_run.json");
    return config.model_dir;
}

EvaluationOutput cmd_evaluate(const RunConfig& config) {
    const CorpusManifest manifest = load_manifest(config.corpus_dir / "manifest.jsonl");
    const auto [train_half, test_half] = split_published_protocol(manifest);

    TrainedSystem system;
    if (std::filesystem::exists(config.model_dir / "index.json")) {
        system = load_system(config.model_dir);
        if (system.kind != config.classifier)
            throw ValidationError("saved system is '" + classifier_kind_name(system.kind) +
                                  "' but config asks for '" + classifier_kind_name(config.classifier) +
                                  "'");
    } else {
        log_info("no saved system under " + config.model_dir.string() + "; training now");
        const std::vector<FeatureSequence> train_features =
            load_or_compute_features(train_half, config.corpus_dir, config.features_dir, config.mfcc);
        system = train_system(train_half, train_features, config.classifier, config.train, config.seed);
        save_system(system, config.model_dir);
    }

    const std::vector<FeatureSequence> features =
        load_or_compute_features(test_half, config.corpus_dir, config.features_dir, config.mfcc);

    EvaluationOutput out;
    const auto total = static_cast<std::ptrdiff_t>(test_half.records.size());
    out.two_stage.resize(test_half.records.size());
    out.one_stage.resize(test_half.records.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < total; ++i) {
        const auto u = static_cast<std::size_t>(i);
        Prediction two = recognize_two_stage(system, features[u]);
        Prediction one = recognize_one_stage(system, features[u]);
        two.true_speaker = one.true_speaker = test_half.records[u].speaker_id;
        two.true_emotion = one.true_emotion = test_half.records[u].emotion;
        out.two_stage[u] = std::move(two);
        out.one_stage[u] = std::move(one);
    }

    const auto [two_cm, two_acc] = confusion_and_accuracy(out.two_stage, EvalAxis::emotion);
    const auto [one_cm, one_acc] = confusion_and_accuracy(out.one_stage, EvalAxis::emotion);
    const auto [spk_cm, spk_acc] = confusion_and_accuracy(out.two_stage, EvalAxis::speaker);

    Json report;
    report["version"] = 1;
    report["seed"] = config.seed;
    report["classifier"] = classifier_kind_name(config.classifier);
    report["train_utterances"] = train_half.records.size();
    report["test_utterances"] = test_half.records.size();
    report["speaker_identification"] = accuracy_to_json(spk_acc, spk_cm);
    report["two_stage"] = accuracy_to_json(two_acc, two_cm);
    report["one_stage"] = accuracy_to_json(one_acc, one_cm);
    out.report = report;

    ensure_dir(config.report_dir);
    const std::string stem = "evaluation_" + classifier_kind_name(config.classifier);
    out.report_json = config.report_dir / (stem + ".json");
    out.report_text = config.report_dir / (stem + ".txt");
    write_json_file(report, out.report_json);

    std::ofstream text(out.report_text, std::ios::binary);
    if (!text) throw IoError("cannot open " + out.report_text.string() + " for writing");
    text << "classifier: " << classifier_kind_name(config.classifier) << "\nseed: " << config.seed
         << "\n\nstage-1 speaker identification, mean accuracy "
         << spk_acc.mean_pct << "%\n\n"
         << "two-stage emotion recognition\n"
         << render_accuracy_table(two_acc, "Emotion") << '\n'
         << render_confusion(two_cm) << '\n'
         << "one-stage emotion recognition\n"
         << render_accuracy_table(one_acc, "Emotion") << '\n'
         << render_confusion(one_cm);
    if (!text) throw IoError("failed writing " + out.report_text.string());
    text.close();

    save_predictions(out.two_stage, config.report_dir / ("predictions_two_stage_" +
                                                         classifier_kind_name(config.classifier) +
                                                         ".jsonl"));
    save_predictions(out.one_stage, config.report_dir / ("predictions_one_stage_" +
                                                         classifier_kind_name(config.classifier) +
                                                         ".jsonl"));
    return out;
}

AccuracyTable accuracy_table_from_report(const Json& report, const std::string& table) {
    if (table != "two_stage" && table != "one_stage")
        throw ValidationError("unknown table '" + table + "' (expected two_stage or one_stage)");
    if (!report.is_object() || !report.contains(table)) throw SchemaError("report lacks table '" + table + "'");
    const Json& t = report[table];
    if (!t.contains("labels") || !t.contains("per_label_pct")) throw SchemaError("malformed accuracy table");
    std::vector<std::string> labels;
    std::vector<double> acc;
    for (const auto& l : t["labels"]) {
        labels.push_back(l.get<std::string>());
        acc.push_back(t["per_label_pct"].at(labels.back()).get<double>());
    }
    return make_accuracy_table(labels, acc);
}

ComparisonOutput cmd_compare(const std::filesystem::path& report_a,
                             const std::filesystem::path& report_b, const std::string& table_a,
                             const std::string& table_b, const std::filesystem::path& out_file,
                             SdConvention convention) {
    const Json a = read_json_file(report_a);
    const Json b = read_json_file(report_b);
    const AccuracyTable ta = accuracy_table_from_report(a, table_a);
    const AccuracyTable tb = accuracy_table_from_report(b, table_b);

    ComparisonOutput out;
    out.verdict = compare_accuracy_tables(ta, tb, convention);

    Json j;
    j["version"] = 1;
    j["table_a"] = table_a;
    j["table_b"] = table_b;
    j["labels"] = ta.labels;
    j["accuracies_a"] = ta.accuracy_pct;
    j["accuracies_b"] = tb.accuracy_pct;
    j["mean_a"] = out.verdict.t.mean_x;
    j["mean_b"] = out.verdict.t.mean_y;
    j["sd_convention"] = convention == SdConvention::standard_error ? "standard_error" : "sample_sd";
    j["sd_a"] = out.verdict.t.sd_x;
    j["sd_b"] = out.verdict.t.sd_y;
    j["sd_pooled"] = out.verdict.t.sd_pooled;
    j["t_value"] = out.verdict.t.t_value;  // serialized as null when infinite
    j["infinite"] = out.verdict.t.infinite;
    j["threshold"] = out.verdict.threshold;
    j["significant"] = out.verdict.significant;
    out.report = j;
    if (!out_file.empty()) {
        if (out_file.has_parent_path()) ensure_dir(out_file.parent_path());
        write_json_file(j, out_file);
    }
    return out;
}

}  // namespace cascade
