#pragma once

#include <stdexcept>
#include <string>

namespace cascade {

// Malformed container or header (bad RIFF magic, truncated chunk).
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Well-formed container but an encoding we do not handle.
struct UnsupportedFormatError : std::runtime_error {
    explicit UnsupportedFormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Manifest line missing a required field or of the wrong type.
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

// Data violates an invariant (duplicate keys, unknown emotion label).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Corpus does not fit the train/test protocol (odd sentence count, missing cell).
struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller broke a documented precondition (dimension mismatch, empty input).
struct ContractError : std::logic_error {
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

// Not enough data or degenerate data for the requested model.
struct TrainingError : std::runtime_error {
    explicit TrainingError(const std::string& msg) : std::runtime_error(msg) {}
};

// Input too short to yield even one feature frame.
struct EmptyFeatureError : std::runtime_error {
    explicit EmptyFeatureError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cascade
