#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "cascade/audio.hpp"

namespace cascade {

// Corpus layout: speaker_count x emotions x sentence_count x repetition_count
// utterances. Separation knobs scale how far voices and emotion modulations
// sit from a shared center profile; at 0 the corpus carries no class signal.
struct SynthSpec {
    std::size_t speaker_count = 6;
    std::vector<Emotion> emotions{all_emotions().begin(), all_emotions().end()};
    std::size_t sentence_count = 8;
    std::size_t repetition_count = 9;
    std::uint32_t sample_rate = 16000;
    double utterance_seconds = 1.0;
    double speaker_separation = 1.0;
    double emotion_separation = 1.0;
    double noise_level = 0.02;
    std::uint64_t seed = 2026;
};

struct VoiceProfile {
    double base_pitch_hz;
    double f1_hz, bw1_hz;  // first resonance
    double f2_hz, bw2_hz;  // second resonance
};

struct EmotionModulation {
    double pitch_mult = 1.0;
    double amp_mult = 1.0;
    double tremor_rate_hz = 0.0;
    double tremor_depth = 0.0;
};

// Deterministic per-speaker voice drawn around the center profile; deviation
// amplitude scales with spec.speaker_separation.
VoiceProfile make_voice_profile(const SynthSpec& spec, std::size_t speaker_index);

// Neutral is the identity at any separation; the others interpolate from the
// identity toward their full modulation as separation grows.
EmotionModulation emotion_modulation(Emotion emotion, double separation);

std::string synth_speaker_id(std::size_t speaker_index, std::size_t speaker_count);

// One utterance's samples; exposed for the generator's unit tests.
std::vector<double> synthesize_utterance(const SynthSpec& spec, std::size_t speaker_index,
                                         Emotion emotion, std::size_t sentence_id,
                                         std::size_t repetition);

// Writes all WAV files plus manifest.jsonl into out_dir and returns the
// manifest. Identical spec (seed included) reproduces identical bytes.
CorpusManifest generate_corpus(const SynthSpec& spec, const std::filesystem::path& out_dir);

SynthSpec synth_spec_from_json_file(const std::filesystem::path& path);

}  // namespace cascade
