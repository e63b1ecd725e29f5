#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cascade/audio.hpp"
#include "cascade/baselines.hpp"
#include "cascade/hmm.hpp"
#include "cascade/matrix.hpp"

namespace cascade {

enum class ClassifierKind { hmm, gmm, svm, vq };

std::string classifier_kind_name(ClassifierKind kind);
ClassifierKind classifier_kind_from_name(const std::string& name);

struct TrainOptions {
    std::size_t hmm_states = 6;
    std::size_t hmm_mixtures = 3;
    std::size_t hmm_max_iters = 12;
    double hmm_rel_tol = 1e-4;
    std::size_t gmm_mixtures = 16;
    std::size_t gmm_max_iters = 100;
    double gmm_rel_tol = 1e-5;
    std::size_t vq_codebook_size = 64;
    double svm_c = 1.0;
    std::size_t svm_epochs = 200;
};

// One closed-set decision: an ordered label list plus one scoring model per
// label (HMM, GMM, VQ) or one joint margin model over all labels (SVM).
// Label order is the tie-break order: the first maximum wins.
struct ModelSet {
    ClassifierKind kind = ClassifierKind::hmm;
    std::vector<std::string> labels;
    std::vector<HmmModel> hmms;
    std::vector<GmmModel> gmms;
    std::vector<VqCodebook> codebooks;
    SvmOvrModel svm;

    // one score per label, higher is better (VQ distortion negated)
    std::vector<double> scores(const FeatureSequence& obs) const;
    bool operator==(const ModelSet&) const = default;
};

// Per-label training data for one decision, in label order.
ModelSet train_model_set(ClassifierKind kind, const std::vector<std::string>& labels,
                         const std::vector<std::vector<FeatureSequence>>& datasets,
                         const TrainOptions& options, std::uint64_t seed);

// Record indices of the training manifest grouped per model, the counting
// side of the protocol: one neutral group per speaker, one group per
// (speaker, emotion) cell, one pooled group per emotion. Emotion slots are
// indexed by the enum; only emotions present in the manifest are filled.
struct TrainingGroups {
    std::vector<std::string> speakers;  // sorted
    std::vector<Emotion> emotions;      // present in the manifest, canonical order
    std::map<std::string, std::vector<std::size_t>> speaker_neutral;
    std::map<std::string, std::array<std::vector<std::size_t>, kEmotionCount>> by_speaker_emotion;
    std::array<std::vector<std::size_t>, kEmotionCount> pooled_by_emotion;
};

// Throws ProtocolError when any speaker is missing neutral data or when a
// (speaker, emotion) cell is empty for an emotion other speakers do have.
TrainingGroups group_training_records(const CorpusManifest& manifest);

struct TrainedSystem {
    ClassifierKind kind = ClassifierKind::hmm;
    std::vector<std::string> speakers;       // sorted
    std::vector<std::string> emotion_labels; // emotions the system was trained on
    ModelSet speaker_models;                 // trained on neutral utterances only
    std::map<std::string, ModelSet> emotion_models_by_speaker;
    ModelSet pooled_emotion_models;

    bool operator==(const TrainedSystem&) const = default;
};

// features must be parallel to manifest.records
TrainedSystem train_system(const CorpusManifest& manifest, const std::vector<FeatureSequence>& features,
                           ClassifierKind kind, const TrainOptions& options, std::uint64_t seed);

struct Prediction {
    std::string true_speaker;
    std::optional<std::string> predicted_speaker;  // absent for one-stage
    Emotion true_emotion = Emotion::Neutral;
    Emotion predicted_emotion = Emotion::Neutral;
    std::vector<std::pair<std::string, double>> speaker_scores;
    std::vector<std::pair<std::string, double>> emotion_scores;
};

std::string identify_speaker(const TrainedSystem& system, const FeatureSequence& obs);
Emotion identify_emotion_given_speaker(const TrainedSystem& system, const std::string& speaker_id,
                                       const FeatureSequence& obs);

// Stage 2 always keys on the stage-1 answer, right or wrong. True labels are
// left empty; the evaluation driver fills them from the manifest.
Prediction recognize_two_stage(const TrainedSystem& system, const FeatureSequence& obs);
Prediction recognize_one_stage(const TrainedSystem& system, const FeatureSequence& obs);

// Directory layout: index.json plus one JSON document per model (per decision
// set for SVM). save overwrites; load validates version and shape.
void save_system(const TrainedSystem& system, const std::filesystem::path& dir);
TrainedSystem load_system(const std::filesystem::path& dir);

void save_predictions(const std::vector<Prediction>& predictions, const std::filesystem::path& file);
std::vector<Prediction> load_predictions(const std::filesystem::path& file);

}  // namespace cascade
