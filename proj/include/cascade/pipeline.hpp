#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cascade/mfcc.hpp"
#include "cascade/model_json.hpp"
#include "cascade/recognizer.hpp"
#include "cascade/stats.hpp"
#include "cascade/synth.hpp"

namespace cascade {

// One experiment's knobs and directory layout. Every output artifact records
// the seed so any reported number can be regenerated.
struct RunConfig {
    std::filesystem::path corpus_dir = "corpus";
    std::filesystem::path features_dir = "features";
    std::filesystem::path model_dir = "models";
    std::filesystem::path report_dir = "reports";
    ClassifierKind classifier = ClassifierKind::hmm;
    MfccConfig mfcc;
    TrainOptions train;
    SynthSpec synth;
    std::uint64_t seed = 2026;
};

RunConfig run_config_from_json_file(const std::filesystem::path& path);

// Feature cache keyed by the utterance's WAV filename; misses are computed
// and written back. Returned sequences are parallel to manifest.records.
std::vector<FeatureSequence> load_or_compute_features(const CorpusManifest& manifest,
                                                      const std::filesystem::path& corpus_dir,
                                                      const std::filesystem::path& features_dir,
                                                      const MfccConfig& mfcc);

// Writes the synthetic corpus; returns the manifest path.
std::filesystem::path cmd_generate(const SynthSpec& spec, const std::filesystem::path& out_dir);

// Fills the feature cache for every manifest record; returns utterance count.
std::size_t cmd_featurize(const RunConfig& config);

// Trains on the first-half sentence split and saves the system; returns the
// model directory.
std::filesystem::path cmd_train(const RunConfig& config);

struct EvaluationOutput {
    Json report;
    std::filesystem::path report_json;
    std::filesystem::path report_text;
    std::vector<Prediction> two_stage;
    std::vector<Prediction> one_stage;
};

// Loads the saved system if present, otherwise trains it first. Scores the
// test split with both approaches and writes JSON + text reports and the
// per-utterance prediction logs.
EvaluationOutput cmd_evaluate(const RunConfig& config);

// Pulls one accuracy table out of an evaluation report JSON.
AccuracyTable accuracy_table_from_report(const Json& report, const std::string& table);

struct ComparisonOutput {
    Json report;
    SignificanceVerdict verdict;
};

// table_a / table_b name which accuracy table of each report enters the test
// ("two_stage" or "one_stage").
ComparisonOutput cmd_compare(const std::filesystem::path& report_a,
                             const std::filesystem::path& report_b, const std::string& table_a,
                             const std::string& table_b, const std::filesystem::path& out_file,
                             SdConvention convention = SdConvention::standard_error);

}  // namespace cascade
