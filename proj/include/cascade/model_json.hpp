#pragma once

#include <filesystem>

#include <json.hpp>

#include "cascade/baselines.hpp"
#include "cascade/hmm.hpp"
#include "cascade/matrix.hpp"

namespace cascade {

// Insertion-ordered JSON keeps serialized documents byte-stable.
using Json = nlohmann::ordered_json;

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

// Versioned model documents. from_* throw SchemaError on malformed input and
// UnsupportedFormatError on an unknown version or type tag.
Json hmm_to_json(const HmmModel& model);
HmmModel hmm_from_json(const Json& j);

Json gmm_to_json(const GmmModel& model);
GmmModel gmm_from_json(const Json& j);

Json vq_to_json(const VqCodebook& model);
VqCodebook vq_from_json(const Json& j);

Json svm_to_json(const SvmOvrModel& model);
SvmOvrModel svm_from_json(const Json& j);

void write_json_file(const Json& j, const std::filesystem::path& path);
Json read_json_file(const std::filesystem::path& path);

}  // namespace cascade
