#include "cascade/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "cascade/errors.hpp"
#include "cascade/rng.hpp"

namespace cascade {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMaxHarmonics = 30;

// shared center voice all speakers deviate from
constexpr VoiceProfile kCenterVoice{120.0, 500.0, 90.0, 1500.0, 150.0};

void validate(const SynthSpec& spec) {
    if (spec.speaker_count == 0 || spec.sentence_count == 0 || spec.repetition_count == 0)
        throw ValidationError("speaker, sentence, and repetition counts must be >= 1");
    if (spec.emotions.empty() ||
        std::find(spec.emotions.begin(), spec.emotions.end(), Emotion::Neutral) == spec.emotions.end())
        throw ValidationError("emotion list must be nonempty and include neutral");
    if (spec.speaker_separation < 0.0 || spec.emotion_separation < 0.0 || spec.noise_level < 0.0)
        throw ValidationError("separations and noise level must be >= 0");
    if (spec.utterance_seconds <= 0.0) throw ValidationError("utterance length must be positive");
    if (spec.sample_rate < 2000) throw ValidationError("sample rate must be at least 2000 Hz");
}

double lorentzian(double f, double center, double bw) {
    const double d = f - center;
    return bw * bw / (d * d + bw * bw);
}

// Full-strength modulations, interpolated toward identity by separation.
// Non-neutral emotions form two crowded wings away from the identity: a low
// flat-affect pair (sad, disgust) and a high aroused trio (happy, angry,
// fear). Within a wing the tremor is shared, so only the overlapping pitch
// shift separates the members; their larger tremor depth also drives wider
// utterance-to-utterance jitter. Neutral speech keeps a clear moat on both
// sides and stays the most recognizable class, while angry, squeezed
// mid-wing from both neighbours, is the least.
EmotionModulation full_modulation(Emotion e) {
    switch (e) {
        case Emotion::Neutral: return {1.0, 1.0, 0.0, 0.0};
        case Emotion::Happy: return {1.22, 1.15, 6.0, 0.07};
        case Emotion::Sad: return {0.78, 0.85, 3.2, 0.06};
        case Emotion::Disgust: return {0.825, 0.85, 3.2, 0.06};
        case Emotion::Angry: return {1.285, 1.15, 6.0, 0.07};
        case Emotion::Fear: return {1.35, 1.15, 6.0, 0.07};
    }
    throw ContractError("invalid emotion");
}

}  // namespace

VoiceProfile make_voice_profile(const SynthSpec& spec, std::size_t speaker_index) {
    Rng rng(derive_seed(spec.seed, "voice-" + std::to_string(speaker_index)));
    const double s = spec.speaker_separation;
    VoiceProfile p = kCenterVoice;
    p.base_pitch_hz *= 1.0 + 0.22 * s * (rng.uniform() * 2.0 - 1.0);
    p.f1_hz *= 1.0 + 0.28 * s * (rng.uniform() * 2.0 - 1.0);
    p.bw1_hz *= 1.0 + 0.20 * s * (rng.uniform() * 2.0 - 1.0);
    p.f2_hz *= 1.0 + 0.28 * s * (rng.uniform() * 2.0 - 1.0);
    p.bw2_hz *= 1.0 + 0.20 * s * (rng.uniform() * 2.0 - 1.0);

    const double nyquist = spec.sample_rate / 2.0;
    p.base_pitch_hz = std::clamp(p.base_pitch_hz, 60.0, 400.0);
    p.f1_hz = std::clamp(p.f1_hz, 120.0, 0.9 * nyquist);
    p.f2_hz = std::clamp(p.f2_hz, 120.0, 0.9 * nyquist);
    p.bw1_hz = std::clamp(p.bw1_hz, 20.0, 400.0);
    p.bw2_hz = std::clamp(p.bw2_hz, 20.0, 400.0);
    return p;
}

EmotionModulation emotion_modulation(Emotion emotion, double separation) {
    const EmotionModulation full = full_modulation(emotion);
    EmotionModulation m;
    m.pitch_mult = std::max(0.1, 1.0 + separation * (full.pitch_mult - 1.0));
    m.amp_mult = std::max(0.1, 1.0 + separation * (full.amp_mult - 1.0));
    m.tremor_rate_hz = full.tremor_rate_hz;
    m.tremor_depth = separation * full.tremor_depth;
    return m;
}

std::string synth_speaker_id(std::size_t speaker_index, std::size_t speaker_count) {
    int width = 2;
    for (std::size_t n = speaker_count; n > 99; n /= 10) ++width;
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%0*zu", width, speaker_index + 1);
    return buf;
}

std::vector<double> synthesize_utterance(const SynthSpec& spec, std::size_t speaker_index,
                                         Emotion emotion, std::size_t sentence_id,
                                         std::size_t repetition) {
    validate(spec);
    if (speaker_index >= spec.speaker_count) throw ContractError("speaker index out of range");

    const VoiceProfile voice = make_voice_profile(spec, speaker_index);
    const EmotionModulation mod = emotion_modulation(emotion, spec.emotion_separation);

    // per-sentence deterministic variation standing in for different texts
    const double k = static_cast<double>(sentence_id);
    const double sent_pitch = 1.0 + 0.05 * std::sin(kTwoPi * k / 7.0);
    const double sent_slope = 0.08 * std::cos(kTwoPi * k / 5.0);
    const double sent_f1 = 1.0 + 0.06 * std::sin(kTwoPi * k / 3.0);
    const double sent_len = 1.0 + 0.08 * std::sin(kTwoPi * k / 4.0);

    const std::string tag = synth_speaker_id(speaker_index, spec.speaker_count) + "/" +
                            emotion_name(emotion) + "/" + std::to_string(sentence_id) + "/" +
                            std::to_string(repetition);
    Rng rng(derive_seed(spec.seed, "utt/" + tag));
    // emotional speech varies more take to take; tremor depth carries the
    // emotion's intensity, so it also scales the per-utterance pitch jitter
    const double jitter_sd = 0.03 + 0.3 * mod.tremor_depth;
    const double rep_pitch = 1.0 + jitter_sd * rng.normal();
    const double tremor_phase = kTwoPi * rng.uniform();

    const double pitch = std::clamp(voice.base_pitch_hz * mod.pitch_mult * sent_pitch * rep_pitch,
                                    50.0, 0.4 * spec.sample_rate);
    const double rate = spec.sample_rate;
    const auto n = static_cast<std::size_t>(std::lround(spec.utterance_seconds * sent_len * rate));

    // spectral envelope sampled at the harmonics of the mean pitch
    const double f0_max = pitch * (1.0 + std::abs(sent_slope) / 2.0) * (1.0 + 0.3 * mod.tremor_depth);
    const std::size_t harmonics =
        std::clamp<std::size_t>(static_cast<std::size_t>(0.45 * rate / f0_max), 1, kMaxHarmonics);
    std::vector<double> amp(harmonics), phase(harmonics);
    double amp_total = 0.0;
    for (std::size_t h = 0; h < harmonics; ++h) {
        const double f = pitch * static_cast<double>(h + 1);
        amp[h] = (lorentzian(f, voice.f1_hz * sent_f1, voice.bw1_hz) +
                  0.7 * lorentzian(f, voice.f2_hz, voice.bw2_hz) + 0.05) /
                 std::pow(static_cast<double>(h + 1), 0.3);
        amp_total += amp[h];
        phase[h] = kTwoPi * rng.uniform();
    }
    for (double& a : amp) a *= 0.5 / amp_total;  // peak stays clear of 1 before modulation

    std::vector<double> x(n);
    double angle = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double u = static_cast<double>(t) / static_cast<double>(n);
        const double tremor = std::sin(kTwoPi * mod.tremor_rate_hz * static_cast<double>(t) / rate +
                                       tremor_phase);
        const double f0 = pitch * (1.0 + sent_slope * (u - 0.5)) * (1.0 + 0.3 * mod.tremor_depth * tremor);
        angle += kTwoPi * f0 / rate;
        double v = 0.0;
        for (std::size_t h = 0; h < harmonics; ++h)
            v += amp[h] * std::sin(static_cast<double>(h + 1) * angle + phase[h]);
        v *= mod.amp_mult * (1.0 + mod.tremor_depth * tremor);
        v += spec.noise_level * rng.normal();
        x[t] = v;
    }

    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::abs(v));
    if (peak > 0.99) {
        const double scale = 0.99 / peak;
        for (double& v : x) v *= scale;
    }
    return x;
}

CorpusManifest generate_corpus(const SynthSpec& spec, const std::filesystem::path& out_dir) {
    validate(spec);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    CorpusManifest manifest;
    manifest.sentence_count = static_cast<int>(spec.sentence_count);
    manifest.repetition_count = static_cast<int>(spec.repetition_count);
    for (std::size_t i = 0; i < spec.speaker_count; ++i)
        for (Emotion e : spec.emotions)
            for (std::size_t sent = 1; sent <= spec.sentence_count; ++sent)
                for (std::size_t rep = 1; rep <= spec.repetition_count; ++rep) {
                    UtteranceRecord r;
                    r.speaker_id = synth_speaker_id(i, spec.speaker_count);
                    r.emotion = e;
                    r.sentence_id = static_cast<int>(sent);
                    r.repetition = static_cast<int>(rep);
                    r.path = r.speaker_id + "_" + emotion_name(e) + "_sent" + std::to_string(sent) +
                             "_rep" + std::to_string(rep) + ".wav";
                    manifest.records.push_back(std::move(r));
                }

    const auto total = static_cast<std::ptrdiff_t>(manifest.records.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t idx = 0; idx < total; ++idx) {
        const UtteranceRecord& r = manifest.records[static_cast<std::size_t>(idx)];
        const std::size_t speaker_index =
            static_cast<std::size_t>(std::stoul(r.speaker_id.substr(1))) - 1;
        AudioClip clip;
        clip.sample_rate = spec.sample_rate;
        clip.samples = synthesize_utterance(spec, speaker_index, r.emotion, r.sentence_id, r.repetition);
        write_wav(out_dir / r.path, clip);
    }

    save_manifest(out_dir / "manifest.jsonl", manifest);
    return manifest;
}

SynthSpec synth_spec_from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw SchemaError("synth spec must be a JSON object");

    SynthSpec spec;
    for (const auto& [key, value] : j.items()) {
        if (key == "speaker_count") spec.speaker_count = value.get<std::size_t>();
        else if (key == "emotions") {
            spec.emotions.clear();
            for (const auto& e : value) {
                const auto parsed = emotion_from_name(e.get<std::string>());
                if (!parsed) throw ValidationError("unknown emotion '" + e.get<std::string>() + "'");
                spec.emotions.push_back(*parsed);
            }
        } else if (key == "sentence_count") spec.sentence_count = value.get<std::size_t>();
        else if (key == "repetition_count") spec.repetition_count = value.get<std::size_t>();
        else if (key == "sample_rate") spec.sample_rate = value.get<std::uint32_t>();
        else if (key == "utterance_seconds") spec.utterance_seconds = value.get<double>();
        else if (key == "speaker_separation") spec.speaker_separation = value.get<double>();
        else if (key == "emotion_separation") spec.emotion_separation = value.get<double>();
        else if (key == "noise_level") spec.noise_level = value.get<double>();
        else if (key == "seed") spec.seed = value.get<std::uint64_t>();
        else throw SchemaError("unknown synth spec field '" + key + "'");
    }
    validate(spec);
    return spec;
}

}  // namespace cascade
