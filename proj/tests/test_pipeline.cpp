#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cascade/errors.hpp"
#include "cascade/pipeline.hpp"

using namespace cascade;
namespace fs = std::filesystem;

namespace {

const fs::path kBase = fs::temp_directory_path() / "cascade_test_pipeline";

SynthSpec small_synth() {
    SynthSpec s;
    s.speaker_count = 2;
    s.sentence_count = 2;
    s.repetition_count = 3;
    s.utterance_seconds = 0.25;
    s.seed = 404;
    return s;
}

RunConfig small_config(const fs::path& root) {
    RunConfig c;
    c.corpus_dir = root / "corpus";
    c.features_dir = root / "features";
    c.model_dir = root / "models";
    c.report_dir = root / "reports";
    c.classifier = ClassifierKind::gmm;
    c.train.gmm_mixtures = 4;
    c.synth = small_synth();
    c.seed = 505;
    return c;
}

void write_text(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("run configs load every section and reject unknown keys") {
    const fs::path dir = kBase / "config";
    const fs::path good = dir / "good.json";
    write_text(good,
               "{\"corpus_dir\": \"c\", \"features_dir\": \"f\", \"model_dir\": \"m\",\n"
               " \"report_dir\": \"r\", \"classifier\": \"vq\", \"seed\": 123,\n"
               " \"mfcc\": {\"static_coeff_count\": 8, \"cepstral_mean_normalization\": true},\n"
               " \"train\": {\"vq_codebook_size\": 8, \"hmm_states\": 4},\n"
               " \"synth\": {\"speaker_count\": 3, \"emotions\": [\"neutral\", \"sad\"]}}\n");

    RunConfig c = run_config_from_json_file(good);
    CHECK(c.corpus_dir == fs::path("c"));
    CHECK(c.features_dir == fs::path("f"));
    CHECK(c.model_dir == fs::path("m"));
    CHECK(c.report_dir == fs::path("r"));
    CHECK(c.classifier == ClassifierKind::vq);
    CHECK(c.seed == 123);
    CHECK(c.mfcc.static_coeff_count == 8);
    CHECK(c.mfcc.cepstral_mean_normalization);
    CHECK(c.mfcc.mel_filter_count == 26);  // untouched default
    CHECK(c.train.vq_codebook_size == 8);
    CHECK(c.train.hmm_states == 4);
    CHECK(c.train.gmm_mixtures == 16);  // untouched default
    CHECK(c.synth.speaker_count == 3);
    CHECK(c.synth.emotions == std::vector<Emotion>{Emotion::Neutral, Emotion::Sad});

    const fs::path bad_top = dir / "bad_top.json";
    write_text(bad_top, "{\"classifierr\": \"hmm\"}\n");
    CHECK_THROWS_AS(run_config_from_json_file(bad_top), SchemaError);

    const fs::path bad_mfcc = dir / "bad_mfcc.json";
    write_text(bad_mfcc, "{\"mfcc\": {\"bogus\": 1}}\n");
    CHECK_THROWS_AS(run_config_from_json_file(bad_mfcc), SchemaError);

    const fs::path bad_train = dir / "bad_train.json";
    write_text(bad_train, "{\"train\": {\"bogus\": 1}}\n");
    CHECK_THROWS_AS(run_config_from_json_file(bad_train), SchemaError);

    const fs::path bad_synth = dir / "bad_synth.json";
    write_text(bad_synth, "{\"synth\": {\"bogus\": 1}}\n");
    CHECK_THROWS_AS(run_config_from_json_file(bad_synth), SchemaError);

    CHECK_THROWS_AS(run_config_from_json_file(dir / "absent.json"), IoError);
}

TEST_CASE("feature loading is parallel to the manifest and cache-stable") {
    const fs::path root = kBase / "features";
    fs::remove_all(root);
    SynthSpec spec = small_synth();
    CorpusManifest manifest = generate_corpus(spec, root / "corpus");

    MfccConfig mfcc;
    std::vector<FeatureSequence> first =
        load_or_compute_features(manifest, root / "corpus", root / "cache", mfcc);
    REQUIRE(first.size() == manifest.records.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].cols == 32);
        CHECK(first[i].rows > 0);
        const fs::path feat =
            (root / "cache") / (fs::path(manifest.records[i].path).stem().string() + ".feat");
        CHECK(fs::exists(feat));
    }

    // second pass reads every sequence back from the cache bit-for-bit
    std::vector<FeatureSequence> second =
        load_or_compute_features(manifest, root / "corpus", root / "cache", mfcc);
    REQUIRE(second.size() == first.size());
    for (std::size_t i = 0; i < first.size(); ++i) CHECK(second[i] == first[i]);
}

TEST_CASE("the command pipeline runs end to end") {
    const fs::path root = kBase / "e2e";
    fs::remove_all(root);
    RunConfig config = small_config(root);

    const fs::path manifest_path = cmd_generate(config.synth, config.corpus_dir);
    CHECK(manifest_path == config.corpus_dir / "manifest.jsonl");
    REQUIRE(fs::exists(manifest_path));

    CHECK(cmd_featurize(config) == 2 * 6 * 2 * 3);

    const fs::path model_dir = cmd_train(config);
    CHECK(model_dir == config.model_dir);
    CHECK(fs::exists(model_dir / "index.json"));
    REQUIRE(fs::exists(model_dir / "train_run.json"));
    const Json run = read_json_file(model_dir / "train_run.json");
    CHECK(run.at("seed").get<std::uint64_t>() == 505);
    CHECK(run.at("classifier").get<std::string>() == "gmm");
    CHECK(run.at("train_utterances").get<std::size_t>() == 36);  // sentence 1 half

    EvaluationOutput eval = cmd_evaluate(config);
    CHECK(fs::exists(eval.report_json));
    CHECK(fs::exists(eval.report_text));
    CHECK(fs::exists(config.report_dir / "predictions_two_stage_gmm.jsonl"));
    CHECK(fs::exists(config.report_dir / "predictions_one_stage_gmm.jsonl"));

    const Json& r = eval.report;
    CHECK(r.at("classifier").get<std::string>() == "gmm");
    CHECK(r.at("seed").get<std::uint64_t>() == 505);
    CHECK(r.at("train_utterances").get<std::size_t>() == 36);
    CHECK(r.at("test_utterances").get<std::size_t>() == 36);
    CHECK(r.at("two_stage").at("labels").size() == 6);
    CHECK(r.at("one_stage").at("labels").size() == 6);
    CHECK(r.at("speaker_identification").at("labels").size() == 2);
    CHECK(eval.two_stage.size() == 36);
    CHECK(eval.one_stage.size() == 36);
    for (const auto& p : eval.two_stage) REQUIRE(p.predicted_speaker.has_value());
    for (const auto& p : eval.one_stage) CHECK_FALSE(p.predicted_speaker.has_value());

    // no file in the report may mention where the experiment ran
    const std::string json_text = slurp(eval.report_json);
    CHECK(json_text.find(root.string()) == std::string::npos);
    CHECK(slurp(eval.report_text).find(root.string()) == std::string::npos);

    AccuracyTable two = accuracy_table_from_report(r, "two_stage");
    CHECK(two.mean_pct == doctest::Approx(r.at("two_stage").at("mean_pct").get<double>()));
    CHECK_THROWS_AS(accuracy_table_from_report(r, "speaker_identification"), ValidationError);
    CHECK_THROWS_AS(accuracy_table_from_report(Json::object(), "two_stage"), SchemaError);

    // a saved system of one kind refuses to evaluate under another
    RunConfig wrong = config;
    wrong.classifier = ClassifierKind::hmm;
    CHECK_THROWS_AS(cmd_evaluate(wrong), ValidationError);
}

TEST_CASE("identical configurations produce byte-identical reports") {
    const fs::path ra = kBase / "det_a";
    const fs::path rb = kBase / "det_b";
    fs::remove_all(ra);
    fs::remove_all(rb);

    RunConfig a = small_config(ra);
    RunConfig b = small_config(rb);
    cmd_generate(a.synth, a.corpus_dir);
    cmd_generate(b.synth, b.corpus_dir);
    EvaluationOutput ea = cmd_evaluate(a);
    EvaluationOutput eb = cmd_evaluate(b);

    CHECK(slurp(ea.report_json) == slurp(eb.report_json));
    CHECK(slurp(ea.report_text) == slurp(eb.report_text));
    CHECK(slurp(ra / "reports" / "predictions_two_stage_gmm.jsonl") ==
          slurp(rb / "reports" / "predictions_two_stage_gmm.jsonl"));
}

TEST_CASE("comparisons wrap the verdict and write a report") {
    const fs::path root = kBase / "e2e";  // reuse the end-to-end artifacts
    RunConfig config = small_config(root);
    const fs::path report = config.report_dir / "evaluation_gmm.json";
    REQUIRE(fs::exists(report));

    const fs::path out = root / "compare" / "self.json";
    ComparisonOutput self = cmd_compare(report, report, "two_stage", "two_stage", out);
    CHECK(self.verdict.t.t_value == 0.0);
    CHECK_FALSE(self.verdict.significant);
    CHECK_FALSE(self.verdict.t.infinite);
    REQUIRE(fs::exists(out));

    const Json written = read_json_file(out);
    CHECK(written.at("threshold").get<double>() == 1.645);
    CHECK(written.at("significant").get<bool>() == false);
    CHECK(written.at("sd_convention").get<std::string>() == "standard_error");
    CHECK(written.at("table_a").get<std::string>() == "two_stage");

    ComparisonOutput cross = cmd_compare(report, report, "two_stage", "one_stage", out,
                                         SdConvention::sample_sd);
    CHECK(cross.report.at("sd_convention").get<std::string>() == "sample_sd");
    CHECK(cross.verdict.t.t_value ==
          doctest::Approx(t_statistic(accuracy_table_from_report(read_json_file(report), "two_stage").accuracy_pct,
                                      accuracy_table_from_report(read_json_file(report), "one_stage").accuracy_pct,
                                      SdConvention::sample_sd)
                              .t_value));

    CHECK_THROWS_AS(cmd_compare(root / "nope.json", report, "two_stage", "two_stage", out), IoError);
}
