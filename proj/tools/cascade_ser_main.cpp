#include <cstdint>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "cascade/pipeline.hpp"

namespace {

// One value store shared by every subcommand (only one parses per run), but
// option presence must be read off the subcommand that actually parsed:
// each attach() makes distinct CLI::Option objects.
struct SharedFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string classifier;
    std::string corpus;
    std::string out;
    int jobs = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration JSON file");
        cmd->add_option("--seed", seed, "root random seed (overrides config)");
        cmd->add_option("--classifier", classifier, "classifier kind: hmm, gmm, svm, or vq");
        cmd->add_option("--corpus", corpus, "corpus directory (overrides config)");
        cmd->add_option("--out", out, "output location for this command");
        cmd->add_option("--jobs", jobs, "worker thread count (0 = library default)");
    }

    cascade::RunConfig make_config(const CLI::App& cmd) const {
        cascade::RunConfig c;
        if (!config_path.empty()) c = cascade::run_config_from_json_file(config_path);
        if (cmd.count("--seed") > 0) c.seed = seed;
        if (cmd.count("--classifier") > 0) c.classifier = cascade::classifier_kind_from_name(classifier);
        if (cmd.count("--corpus") > 0) c.corpus_dir = corpus;
        return c;
    }

    void apply_jobs() const {
#ifdef _OPENMP
        if (jobs > 0) omp_set_num_threads(jobs);
#endif
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-stage speaker-then-emotion recognition toolkit"};
    app.require_subcommand(1);

    SharedFlags flags;
    std::string spec_file;
    std::string report_a, report_b;
    std::string table_a = "two_stage", table_b = "two_stage";
    bool raw_sd = false;

    CLI::App* generate = app.add_subcommand("generate", "synthesize a corpus of WAV files + manifest");
    generate->add_option("--spec", spec_file, "synthesis spec JSON (otherwise the config's synth block)");
    flags.attach(generate);

    CLI::App* featurize = app.add_subcommand("featurize", "fill the feature cache for every utterance");
    flags.attach(featurize);

    CLI::App* train = app.add_subcommand("train", "train all model families on the training split");
    flags.attach(train);

    CLI::App* evaluate =
        app.add_subcommand("evaluate", "score the test split one- and two-stage and write reports");
    flags.attach(evaluate);

    CLI::App* compare = app.add_subcommand("compare", "significance test between two evaluation reports");
    compare->add_option("report_a", report_a, "first evaluation report JSON")->required();
    compare->add_option("report_b", report_b, "second evaluation report JSON")->required();
    compare->add_option("--table-a", table_a, "table from report_a: two_stage or one_stage");
    compare->add_option("--table-b", table_b, "table from report_b: two_stage or one_stage");
    compare->add_flag("--raw-sd", raw_sd, "pool raw sample SDs instead of standard errors");
    flags.attach(compare);

    CLI11_PARSE(app, argc, argv);

    try {
        flags.apply_jobs();
        if (*generate) {
            cascade::SynthSpec spec;
            if (!spec_file.empty()) {
                spec = cascade::synth_spec_from_json_file(spec_file);
            } else {
                const cascade::RunConfig c = flags.make_config(*generate);
                spec = c.synth;
                spec.seed = c.seed;
            }
            if (generate->count("--seed") > 0) spec.seed = flags.seed;
            std::filesystem::path dir = flags.make_config(*generate).corpus_dir;
            if (generate->count("--out") > 0) dir = flags.out;
            const auto manifest = cascade::cmd_generate(spec, dir);
            std::cout << manifest.string() << '\n';
        } else if (*featurize) {
            cascade::RunConfig c = flags.make_config(*featurize);
            if (featurize->count("--out") > 0) c.features_dir = flags.out;
            const std::size_t n = cascade::cmd_featurize(c);
            std::cout << n << " utterances featurized into " << c.features_dir.string() << '\n';
        } else if (*train) {
            cascade::RunConfig c = flags.make_config(*train);
            if (train->count("--out") > 0) c.model_dir = flags.out;
            const auto dir = cascade::cmd_train(c);
            std::cout << "system saved to " << dir.string() << '\n';
        } else if (*evaluate) {
            cascade::RunConfig c = flags.make_config(*evaluate);
            if (evaluate->count("--out") > 0) c.report_dir = flags.out;
            const cascade::EvaluationOutput out = cascade::cmd_evaluate(c);
            std::cout << "two-stage mean accuracy "
                      << out.report["two_stage"]["mean_pct"].get<double>() << "%, one-stage "
                      << out.report["one_stage"]["mean_pct"].get<double>() << "%, speaker id "
                      << out.report["speaker_identification"]["mean_pct"].get<double>() << "%\n"
                      << "report: " << out.report_json.string() << '\n';
        } else if (*compare) {
            std::filesystem::path out_file = "comparison.json";
            if (compare->count("--out") > 0) out_file = flags.out;
            const auto conv =
                raw_sd ? cascade::SdConvention::sample_sd : cascade::SdConvention::standard_error;
            const cascade::ComparisonOutput out =
                cascade::cmd_compare(report_a, report_b, table_a, table_b, out_file, conv);
            std::cout << "t = " << out.verdict.t.t_value << ", pooled sd = " << out.verdict.t.sd_pooled
                      << ", threshold " << out.verdict.threshold << " -> "
                      << (out.verdict.significant ? "significant" : "not significant") << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
