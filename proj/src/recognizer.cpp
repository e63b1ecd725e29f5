#include "cascade/recognizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "cascade/errors.hpp"
#include "cascade/log.hpp"
#include "cascade/model_json.hpp"
#include "cascade/rng.hpp"

namespace cascade {

namespace {

std::size_t argmax_first(const std::vector<double>& scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;  // strict: first maximum wins ties
    return best;
}

Matrix pool_frames(const std::vector<FeatureSequence>& seqs) {
    std::size_t total = 0;
    for (const auto& s : seqs) total += s.rows;
    const std::size_t D = seqs.empty() ? 0 : seqs.front().cols;
    Matrix pooled(total, D);
    std::size_t at = 0;
    for (const auto& s : seqs) {
        std::copy(s.data.begin(), s.data.end(), pooled.data.begin() + static_cast<std::ptrdiff_t>(at * D));
        at += s.rows;
    }
    return pooled;
}

std::vector<std::pair<std::string, double>> labeled(const std::vector<std::string>& labels,
                                                    const std::vector<double>& scores) {
    std::vector<std::pair<std::string, double>> out;
    out.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) out.emplace_back(labels[i], scores[i]);
    return out;
}

Emotion emotion_from_label(const std::string& name) {
    const auto e = emotion_from_name(name);
    if (!e) throw ContractError("unknown emotion label '" + name + "'");
    return *e;
}

}  // namespace

std::string classifier_kind_name(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::hmm: return "hmm";
        case ClassifierKind::gmm: return "gmm";
        case ClassifierKind::svm: return "svm";
        case ClassifierKind::vq: return "vq";
    }
    throw ContractError("invalid classifier kind");
}

ClassifierKind classifier_kind_from_name(const std::string& name) {
    if (name == "hmm") return ClassifierKind::hmm;
    if (name == "gmm") return ClassifierKind::gmm;
    if (name == "svm") return ClassifierKind::svm;
    if (name == "vq") return ClassifierKind::vq;
    throw ValidationError("unknown classifier kind '" + name + "'");
}

std::vector<double> ModelSet::scores(const FeatureSequence& obs) const {
    std::vector<double> out;
    switch (kind) {
        case ClassifierKind::hmm:
            out.reserve(hmms.size());
            for (const auto& m : hmms) out.push_back(forward_log_likelihood(m, obs));
            break;
        case ClassifierKind::gmm:
            out.reserve(gmms.size());
            for (const auto& m : gmms) out.push_back(gmm_log_likelihood(m, obs));
            break;
        case ClassifierKind::vq:
            out.reserve(codebooks.size());
            for (const auto& m : codebooks) out.push_back(-vq_distortion(m, obs));
            break;
        case ClassifierKind::svm:
            out = svm_scores(svm, aggregate_utterance(obs));
            break;
    }
    if (out.size() != labels.size()) throw ContractError("model set has no model for some label");
    return out;
}

ModelSet train_model_set(ClassifierKind kind, const std::vector<std::string>& labels,
                         const std::vector<std::vector<FeatureSequence>>& datasets,
                         const TrainOptions& options, std::uint64_t seed) {
    if (labels.size() != datasets.size()) throw ContractError("one dataset per label required");
    if (labels.empty()) throw ContractError("empty label set");
    for (const auto& ds : datasets)
        if (ds.empty()) throw TrainingError("a label has no training utterances");

    ModelSet set;
    set.kind = kind;
    set.labels = labels;

    switch (kind) {
        case ClassifierKind::hmm:
            for (std::size_t i = 0; i < labels.size(); ++i) {
                HmmInitConfig init;
                init.state_count = options.hmm_states;
                init.mixture_count = options.hmm_mixtures;
                init.seed = derive_seed(seed, labels[i]);
                HmmModel m = init_hmm(datasets[i], init);
                auto [trained, report] = baum_welch_train(m, datasets[i], options.hmm_max_iters,
                                                          options.hmm_rel_tol);
                log_debug("hmm '" + labels[i] + "': " + std::to_string(report.iterations) +
                          " iterations, converged=" + std::to_string(report.converged));
                set.hmms.push_back(std::move(trained));
            }
            break;
        case ClassifierKind::gmm:
            for (std::size_t i = 0; i < labels.size(); ++i)
                set.gmms.push_back(train_gmm(pool_frames(datasets[i]), options.gmm_mixtures,
                                             derive_seed(seed, labels[i]), options.gmm_max_iters,
                                             options.gmm_rel_tol));
            break;
        case ClassifierKind::vq:
            for (std::size_t i = 0; i < labels.size(); ++i)
                set.codebooks.push_back(train_vq_codebook(pool_frames(datasets[i]),
                                                          options.vq_codebook_size,
                                                          derive_seed(seed, labels[i])));
            break;
        case ClassifierKind::svm: {
            std::size_t total = 0;
            for (const auto& ds : datasets) total += ds.size();
            const std::size_t D = datasets.front().front().cols;
            Matrix vectors(total, 2 * D);
            std::vector<std::size_t> y;
            y.reserve(total);
            std::size_t at = 0;
            for (std::size_t i = 0; i < labels.size(); ++i)
                for (const auto& seq : datasets[i]) {
                    const std::vector<double> agg = aggregate_utterance(seq);
                    std::copy(agg.begin(), agg.end(), vectors.row(at++));
                    y.push_back(i);
                }
            set.svm = train_svm_ovr(vectors, y, labels, options.svm_c, options.svm_epochs, seed);
            break;
        }
    }
    return set;
}

TrainingGroups group_training_records(const CorpusManifest& manifest) {
    TrainingGroups g;
    std::set<std::string> speakers;
    for (const auto& r : manifest.records) speakers.insert(r.speaker_id);
    g.speakers.assign(speakers.begin(), speakers.end());

    for (const auto& spk : g.speakers) g.by_speaker_emotion[spk] = {};
    for (std::size_t i = 0; i < manifest.records.size(); ++i) {
        const auto& r = manifest.records[i];
        const auto e = static_cast<std::size_t>(r.emotion);
        if (r.emotion == Emotion::Neutral) g.speaker_neutral[r.speaker_id].push_back(i);
        g.by_speaker_emotion[r.speaker_id][e].push_back(i);
        g.pooled_by_emotion[e].push_back(i);
    }
    for (Emotion e : all_emotions())
        if (!g.pooled_by_emotion[static_cast<std::size_t>(e)].empty()) g.emotions.push_back(e);

    for (const auto& spk : g.speakers) {
        if (g.speaker_neutral[spk].empty())
            throw ProtocolError("speaker '" + spk + "' has no neutral training utterances");
        for (Emotion e : g.emotions)
            if (g.by_speaker_emotion[spk][static_cast<std::size_t>(e)].empty())
                throw ProtocolError("speaker '" + spk + "' has no training utterances for emotion '" +
                                    emotion_name(e) + "'");
    }
    return g;
}

TrainedSystem train_system(const CorpusManifest& manifest, const std::vector<FeatureSequence>& features,
                           ClassifierKind kind, const TrainOptions& options, std::uint64_t seed) {
    if (features.size() != manifest.records.size())
        throw ContractError("one feature sequence per manifest record required");

    const TrainingGroups groups = group_training_records(manifest);
    auto gather = [&](const std::vector<std::size_t>& idx) {
        std::vector<FeatureSequence> out;
        out.reserve(idx.size());
        for (std::size_t i : idx) out.push_back(features[i]);
        return out;
    };

    TrainedSystem system;
    system.kind = kind;
    system.speakers = groups.speakers;
    for (Emotion e : groups.emotions) system.emotion_labels.emplace_back(emotion_name(e));

    {
        std::vector<std::vector<FeatureSequence>> datasets;
        for (const auto& spk : groups.speakers) datasets.push_back(gather(groups.speaker_neutral.at(spk)));
        system.speaker_models =
            train_model_set(kind, groups.speakers, datasets, options, derive_seed(seed, "speakers"));
    }
    for (const auto& spk : groups.speakers) {
        std::vector<std::vector<FeatureSequence>> datasets;
        for (Emotion e : groups.emotions)
            datasets.push_back(gather(groups.by_speaker_emotion.at(spk)[static_cast<std::size_t>(e)]));
        system.emotion_models_by_speaker[spk] = train_model_set(
            kind, system.emotion_labels, datasets, options, derive_seed(seed, "emotions/" + spk));
    }
    {
        std::vector<std::vector<FeatureSequence>> datasets;
        for (Emotion e : groups.emotions)
            datasets.push_back(gather(groups.pooled_by_emotion[static_cast<std::size_t>(e)]));
        system.pooled_emotion_models = train_model_set(kind, system.emotion_labels, datasets, options,
                                                       derive_seed(seed, "pooled"));
    }
    return system;
}

std::string identify_speaker(const TrainedSystem& system, const FeatureSequence& obs) {
    if (system.speaker_models.labels.empty()) throw ContractError("system has no speaker models");
    return system.speaker_models.labels[argmax_first(system.speaker_models.scores(obs))];
}

Emotion identify_emotion_given_speaker(const TrainedSystem& system, const std::string& speaker_id,
                                       const FeatureSequence& obs) {
    const auto it = system.emotion_models_by_speaker.find(speaker_id);
    if (it == system.emotion_models_by_speaker.end())
        throw ContractError("unknown speaker '" + speaker_id + "'");
    const ModelSet& set = it->second;
    return emotion_from_label(set.labels[argmax_first(set.scores(obs))]);
}

Prediction recognize_two_stage(const TrainedSystem& system, const FeatureSequence& obs) {
    Prediction p;
    const std::vector<double> spk_scores = system.speaker_models.scores(obs);
    const std::size_t spk = argmax_first(spk_scores);
    p.predicted_speaker = system.speaker_models.labels[spk];
    p.speaker_scores = labeled(system.speaker_models.labels, spk_scores);

    const ModelSet& emo_set = system.emotion_models_by_speaker.at(*p.predicted_speaker);
    const std::vector<double> emo_scores = emo_set.scores(obs);
    p.predicted_emotion = emotion_from_label(emo_set.labels[argmax_first(emo_scores)]);
    p.emotion_scores = labeled(emo_set.labels, emo_scores);
    return p;
}

Prediction recognize_one_stage(const TrainedSystem& system, const FeatureSequence& obs) {
    Prediction p;
    const std::vector<double> emo_scores = system.pooled_emotion_models.scores(obs);
    p.predicted_emotion =
        emotion_from_label(system.pooled_emotion_models.labels[argmax_first(emo_scores)]);
    p.emotion_scores = labeled(system.pooled_emotion_models.labels, emo_scores);
    return p;
}

namespace {

Json model_set_entry_to_json(const ModelSet& set, std::size_t i) {
    switch (set.kind) {
        case ClassifierKind::hmm: return hmm_to_json(set.hmms[i]);
        case ClassifierKind::gmm: return gmm_to_json(set.gmms[i]);
        case ClassifierKind::vq: return vq_to_json(set.codebooks[i]);
        case ClassifierKind::svm: break;
    }
    throw ContractError("svm sets serialize as one joint document");
}

// sanitized filename stem per model key: letters, digits, '-', '_'
std::string stem_for(const std::string& key) {
    std::string s;
    for (char c : key) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return s;
}

void save_model_set(const ModelSet& set, const std::string& key_prefix,
                    const std::filesystem::path& dir, Json& index_models) {
    if (set.kind == ClassifierKind::svm) {
        const std::string file = stem_for(key_prefix) + ".json";
        write_json_file(svm_to_json(set.svm), dir / file);
        index_models[key_prefix] = file;
        return;
    }
    for (std::size_t i = 0; i < set.labels.size(); ++i) {
        const std::string key = key_prefix + "/" + set.labels[i];
        const std::string file = stem_for(key) + ".json";
        write_json_file(model_set_entry_to_json(set, i), dir / file);
        index_models[key] = file;
    }
}

ModelSet load_model_set(ClassifierKind kind, const std::vector<std::string>& labels,
                        const std::string& key_prefix, const std::filesystem::path& dir,
                        const Json& index_models) {
    ModelSet set;
    set.kind = kind;
    set.labels = labels;
    auto file_for = [&](const std::string& key) {
        if (!index_models.contains(key)) throw SchemaError("index missing model entry '" + key + "'");
        return dir / index_models[key].get<std::string>();
    };
    if (kind == ClassifierKind::svm) {
        set.svm = svm_from_json(read_json_file(file_for(key_prefix)));
        if (set.svm.class_labels != labels) throw SchemaError("svm class labels disagree with index");
        return set;
    }
    for (const auto& label : labels) {
        const Json j = read_json_file(file_for(key_prefix + "/" + label));
        switch (kind) {
            case ClassifierKind::hmm: set.hmms.push_back(hmm_from_json(j)); break;
            case ClassifierKind::gmm: set.gmms.push_back(gmm_from_json(j)); break;
            case ClassifierKind::vq: set.codebooks.push_back(vq_from_json(j)); break;
            case ClassifierKind::svm: break;
        }
    }
    return set;
}

}  // namespace

void save_system(const TrainedSystem& system, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    Json index;
    index["version"] = 1;
    index["classifier"] = classifier_kind_name(system.kind);
    index["speakers"] = system.speakers;
    index["emotions"] = system.emotion_labels;
    Json models = Json::object();
    save_model_set(system.speaker_models, "speaker", dir, models);
    for (const auto& [spk, set] : system.emotion_models_by_speaker)
        save_model_set(set, "emotion/" + spk, dir, models);
    save_model_set(system.pooled_emotion_models, "pooled", dir, models);
    index["models"] = std::move(models);
    write_json_file(index, dir / "index.json");
}

TrainedSystem load_system(const std::filesystem::path& dir) {
    const Json index = read_json_file(dir / "index.json");
    if (!index.is_object() || !index.contains("version") || !index.contains("classifier") ||
        !index.contains("speakers") || !index.contains("emotions") || !index.contains("models"))
        throw SchemaError("malformed system index");
    if (index["version"].get<int>() != 1)
        throw UnsupportedFormatError("unsupported system index version");

    TrainedSystem system;
    system.kind = classifier_kind_from_name(index["classifier"].get<std::string>());
    for (const auto& s : index["speakers"]) system.speakers.push_back(s.get<std::string>());
    for (const auto& e : index["emotions"]) {
        system.emotion_labels.push_back(e.get<std::string>());
        emotion_from_label(system.emotion_labels.back());  // validates the name
    }

    const Json& models = index["models"];
    system.speaker_models = load_model_set(system.kind, system.speakers, "speaker", dir, models);
    for (const auto& spk : system.speakers)
        system.emotion_models_by_speaker[spk] =
            load_model_set(system.kind, system.emotion_labels, "emotion/" + spk, dir, models);
    system.pooled_emotion_models =
        load_model_set(system.kind, system.emotion_labels, "pooled", dir, models);
    return system;
}

void save_predictions(const std::vector<Prediction>& predictions, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot open " + file.string() + " for writing");
    for (const auto& p : predictions) {
        Json j;
        j["true_speaker"] = p.true_speaker;
        if (p.predicted_speaker) j["predicted_speaker"] = *p.predicted_speaker;
        j["true_emotion"] = emotion_name(p.true_emotion);
        j["predicted_emotion"] = emotion_name(p.predicted_emotion);
        Json spk = Json::object();
        for (const auto& [k, v] : p.speaker_scores) spk[k] = v;
        Json emo = Json::object();
        for (const auto& [k, v] : p.emotion_scores) emo[k] = v;
        j["speaker_scores"] = std::move(spk);
        j["emotion_scores"] = std::move(emo);
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("failed writing " + file.string());
}

std::vector<Prediction> load_predictions(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file.string());
    std::vector<Prediction> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw SchemaError(file.string() + ": " + e.what());
        }
        Prediction p;
        p.true_speaker = j.value("true_speaker", std::string{});
        if (j.contains("predicted_speaker")) p.predicted_speaker = j["predicted_speaker"].get<std::string>();
        p.true_emotion = emotion_from_label(j.at("true_emotion").get<std::string>());
        p.predicted_emotion = emotion_from_label(j.at("predicted_emotion").get<std::string>());
        if (j.contains("speaker_scores"))
            for (const auto& [k, v] : j["speaker_scores"].items()) p.speaker_scores.emplace_back(k, v.get<double>());
        if (j.contains("emotion_scores"))
            for (const auto& [k, v] : j["emotion_scores"].items()) p.emotion_scores.emplace_back(k, v.get<double>());
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace cascade
