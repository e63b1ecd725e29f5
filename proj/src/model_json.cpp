#include "cascade/model_json.hpp"

#include <filesystem>
#include <fstream>

#include "cascade/errors.hpp"

namespace cascade {

namespace {

constexpr int kModelVersion = 1;

void require(bool ok, const std::string& what) {
    if (!ok) throw SchemaError(what);
}

void check_header(const Json& j, const char* type) {
    require(j.is_object(), "model document must be a JSON object");
    require(j.contains("version") && j["version"].is_number_integer(), "missing integer 'version'");
    require(j.contains("type") && j["type"].is_string(), "missing string 'type'");
    if (j["type"].get<std::string>() != type)
        throw UnsupportedFormatError("expected model type '" + std::string(type) + "', got '" +
                                     j["type"].get<std::string>() + "'");
    if (j["version"].get<int>() != kModelVersion)
        throw UnsupportedFormatError("unsupported model version " + std::to_string(j["version"].get<int>()));
}

std::vector<double> vector_from_json(const Json& j, const std::string& what) {
    require(j.is_array(), what + " must be an array");
    std::vector<double> v;
    v.reserve(j.size());
    for (const auto& e : j) {
        require(e.is_number(), what + " entries must be numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows; ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) {
    require(j.is_array(), "matrix must be an array of rows");
    const std::size_t rows = j.size();
    if (rows == 0) return Matrix();
    require(j[0].is_array(), "matrix rows must be arrays");
    const std::size_t cols = j[0].size();
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        require(j[r].is_array() && j[r].size() == cols, "matrix rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c) {
            require(j[r][c].is_number(), "matrix entries must be numbers");
            m(r, c) = j[r][c].get<double>();
        }
    }
    return m;
}

Json hmm_to_json(const HmmModel& model) {
    Json j;
    j["version"] = kModelVersion;
    j["type"] = "hmm";
    j["state_count"] = model.state_count;
    j["mixture_count"] = model.emissions.empty() ? 0 : model.emissions.front().mixture_count();
    j["dimension"] = model.dimension();
    j["pi"] = model.initial_probs;
    j["transitions"] = matrix_to_json(model.transitions);
    Json states = Json::array();
    for (const auto& g : model.emissions) {
        Json s;
        s["weights"] = g.weights;
        s["means"] = matrix_to_json(g.means);
        s["variances"] = matrix_to_json(g.variances);
        states.push_back(std::move(s));
    }
    j["states"] = std::move(states);
    return j;
}

HmmModel hmm_from_json(const Json& j) {
    check_header(j, "hmm");
    require(j.contains("state_count") && j.contains("pi") && j.contains("transitions") &&
                j.contains("states"),
            "hmm document missing fields");
    HmmModel m;
    m.state_count = j["state_count"].get<std::size_t>();
    m.initial_probs = vector_from_json(j["pi"], "pi");
    m.transitions = matrix_from_json(j["transitions"]);
    require(m.initial_probs.size() == m.state_count, "pi length must equal state_count");
    require(m.transitions.rows == m.state_count && m.transitions.cols == m.state_count,
            "transition matrix must be state_count x state_count");
    require(j["states"].is_array() && j["states"].size() == m.state_count,
            "states must list one emission per state");
    for (const auto& s : j["states"]) {
        require(s.is_object() && s.contains("weights") && s.contains("means") && s.contains("variances"),
                "state emission missing fields");
        GmmEmission g;
        g.weights = vector_from_json(s["weights"], "weights");
        g.means = matrix_from_json(s["means"]);
        g.variances = matrix_from_json(s["variances"]);
        require(g.means.rows == g.weights.size() && g.variances.rows == g.weights.size(),
                "emission row counts must match weight count");
        require(g.means.cols == g.variances.cols, "emission means and variances must share dimension");
        m.emissions.push_back(std::move(g));
    }
    return m;
}

Json gmm_to_json(const GmmModel& model) {
    Json j;
    j["version"] = kModelVersion;
    j["type"] = "gmm";
    j["mixture_count"] = model.mixture_count();
    j["dimension"] = model.dimension();
    j["weights"] = model.weights;
    j["means"] = matrix_to_json(model.means);
    j["variances"] = matrix_to_json(model.variances);
    return j;
}

GmmModel gmm_from_json(const Json& j) {
    check_header(j, "gmm");
    require(j.contains("weights") && j.contains("means") && j.contains("variances"),
            "gmm document missing fields");
    GmmModel g;
    g.weights = vector_from_json(j["weights"], "weights");
    g.means = matrix_from_json(j["means"]);
    g.variances = matrix_from_json(j["variances"]);
    require(g.means.rows == g.weights.size() && g.variances.rows == g.weights.size(),
            "gmm row counts must match weight count");
    require(g.means.cols == g.variances.cols, "gmm means and variances must share dimension");
    return g;
}

Json vq_to_json(const VqCodebook& model) {
    Json j;
    j["version"] = kModelVersion;
    j["type"] = "vq";
    j["codebook_size"] = model.size();
    j["dimension"] = model.dimension();
    j["codewords"] = matrix_to_json(model.codewords);
    return j;
}

VqCodebook vq_from_json(const Json& j) {
    check_header(j, "vq");
    require(j.contains("codewords"), "vq document missing codewords");
    VqCodebook cb{matrix_from_json(j["codewords"])};
    require(cb.size() >= 1, "codebook must hold at least one codeword");
    return cb;
}

Json svm_to_json(const SvmOvrModel& model) {
    Json j;
    j["version"] = kModelVersion;
    j["type"] = "svm";
    j["class_labels"] = model.class_labels;
    j["feature_count"] = model.feature_count();
    j["weights"] = matrix_to_json(model.weights);
    j["biases"] = model.biases;
    j["feature_mean"] = model.feature_mean;
    j["feature_scale"] = model.feature_scale;
    return j;
}

SvmOvrModel svm_from_json(const Json& j) {
    check_header(j, "svm");
    require(j.contains("class_labels") && j.contains("weights") && j.contains("biases") &&
                j.contains("feature_mean") && j.contains("feature_scale"),
            "svm document missing fields");
    SvmOvrModel m;
    require(j["class_labels"].is_array(), "class_labels must be an array");
    for (const auto& l : j["class_labels"]) {
        require(l.is_string(), "class labels must be strings");
        m.class_labels.push_back(l.get<std::string>());
    }
    m.weights = matrix_from_json(j["weights"]);
    m.biases = vector_from_json(j["biases"], "biases");
    m.feature_mean = vector_from_json(j["feature_mean"], "feature_mean");
    m.feature_scale = vector_from_json(j["feature_scale"], "feature_scale");
    require(m.weights.rows == m.class_labels.size() && m.biases.size() == m.class_labels.size(),
            "one weight row and bias per class required");
    require(m.feature_mean.size() == m.weights.cols && m.feature_scale.size() == m.weights.cols,
            "standardizer length must match feature count");
    return m;
}

void write_json_file(const Json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    return j;
}

}  // namespace cascade
