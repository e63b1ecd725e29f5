#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cascade {

// Normalized mono samples in [-1, 1].
struct AudioClip {
    std::vector<double> samples;
    std::uint32_t sample_rate = 0;
};

enum class Emotion { Neutral, Happy, Sad, Disgust, Angry, Fear };

inline constexpr std::size_t kEmotionCount = 6;

// Fixed order; this is also the tie-break order for emotion decisions.
const std::array<Emotion, kEmotionCount>& all_emotions();

const std::string& emotion_name(Emotion e);
std::optional<Emotion> emotion_from_name(const std::string& name);

struct UtteranceRecord {
    std::string path;
    std::string speaker_id;
    Emotion emotion = Emotion::Neutral;
    int sentence_id = 0;  // 1-based
    int repetition = 0;   // 1-based

    bool operator==(const UtteranceRecord&) const = default;
};

struct CorpusManifest {
    std::vector<UtteranceRecord> records;
    int sentence_count = 0;
    int repetition_count = 0;
};

// 16-bit PCM RIFF/WAVE. Multi-channel input is averaged to mono and
// integer samples are divided by 32768.
AudioClip read_wav(const std::filesystem::path& path);

// Writes mono 16-bit PCM. Samples are clamped to [-1, 1] and rounded.
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

// JSON Lines, one record per line with fields path, speaker_id, emotion,
// sentence_id, repetition. Duplicate (speaker, emotion, sentence,
// repetition) keys are rejected; unknown fields are ignored with a warning.
CorpusManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const CorpusManifest& manifest);

// First half of sentence ids trains, second half tests. Requires an even
// sentence count.
std::pair<CorpusManifest, CorpusManifest> split_published_protocol(const CorpusManifest& manifest);

}  // namespace cascade
