#include "cascade/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cascade/errors.hpp"
#include "cascade/log.hpp"

namespace cascade {

const std::array<Emotion, kEmotionCount>& all_emotions() {
    static const std::array<Emotion, kEmotionCount> order = {
        Emotion::Neutral, Emotion::Happy, Emotion::Sad,
        Emotion::Disgust, Emotion::Angry, Emotion::Fear};
    return order;
}

const std::string& emotion_name(Emotion e) {
    static const std::array<std::string, kEmotionCount> names = {
        "neutral", "happy", "sad", "disgust", "angry", "fear"};
    return names[static_cast<std::size_t>(e)];
}

std::optional<Emotion> emotion_from_name(const std::string& name) {
    for (Emotion e : all_emotions())
        if (emotion_name(e) == name) return e;
    return std::nullopt;
}

namespace {

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

AudioClip read_wav(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());

    unsigned char hdr[12];
    if (!f.read(reinterpret_cast<char*>(hdr), 12)) throw FormatError("truncated RIFF header");
    if (std::memcmp(hdr, "RIFF", 4) != 0 || std::memcmp(hdr + 8, "WAVE", 4) != 0)
        throw FormatError("not a RIFF/WAVE file: " + path.string());

    std::uint16_t format_code = 0, channels = 0, bits = 0;
    std::uint32_t sample_rate = 0;
    bool have_fmt = false;
    std::vector<unsigned char> pcm;

    unsigned char chunk_hdr[8];
    while (f.read(reinterpret_cast<char*>(chunk_hdr), 8)) {
        std::uint32_t size = read_u32(chunk_hdr + 4);
        if (std::memcmp(chunk_hdr, "fmt ", 4) == 0) {
            if (size < 16) throw FormatError("fmt chunk too small");
            std::vector<unsigned char> fmt(size);
            if (!f.read(reinterpret_cast<char*>(fmt.data()), size)) throw FormatError("truncated fmt chunk");
            format_code = read_u16(fmt.data() + 0);
            channels = read_u16(fmt.data() + 2);
            sample_rate = read_u32(fmt.data() + 4);
            bits = read_u16(fmt.data() + 14);
            have_fmt = true;
        } else if (std::memcmp(chunk_hdr, "data", 4) == 0) {
            pcm.resize(size);
            if (!f.read(reinterpret_cast<char*>(pcm.data()), size)) throw FormatError("truncated data chunk");
        } else {
            f.seekg(size, std::ios::cur);
        }
        if (size % 2 == 1) f.seekg(1, std::ios::cur);  // chunks are word-aligned
    }

    if (!have_fmt) throw FormatError("missing fmt chunk");
    if (format_code != 1) throw UnsupportedFormatError("only PCM (format code 1) is supported");
    if (bits != 16) throw UnsupportedFormatError("only 16-bit samples are supported");
    if (channels == 0 || sample_rate == 0) throw FormatError("invalid fmt chunk");

    const std::size_t frame_bytes = 2u * channels;
    const std::size_t frames = pcm.size() / frame_bytes;
    AudioClip clip;
    clip.sample_rate = sample_rate;
    clip.samples.resize(frames);
    for (std::size_t t = 0; t < frames; ++t) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
            const unsigned char* p = pcm.data() + t * frame_bytes + 2 * c;
            acc += static_cast<std::int16_t>(read_u16(p));
        }
        clip.samples[t] = acc / channels / 32768.0;
    }
    return clip;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");

    const std::uint32_t n = static_cast<std::uint32_t>(clip.samples.size());
    const std::uint32_t data_bytes = n * 2;

    auto put_u32 = [&](std::uint32_t v) {
        unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
        f.write(reinterpret_cast<char*>(b), 4);
    };
    auto put_u16 = [&](std::uint16_t v) {
        unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
        f.write(reinterpret_cast<char*>(b), 2);
    };

    f.write("RIFF", 4);
    put_u32(36 + data_bytes);
    f.write("WAVE", 4);
    f.write("fmt ", 4);
    put_u32(16);
    put_u16(1);  // PCM
    put_u16(1);  // mono
    put_u32(clip.sample_rate);
    put_u32(clip.sample_rate * 2);
    put_u16(2);
    put_u16(16);
    f.write("data", 4);
    put_u32(data_bytes);
    for (double s : clip.samples) {
        double clamped = std::clamp(s, -1.0, 1.0);
        double scaled = clamped * 32768.0;
        scaled = std::clamp(scaled, -32768.0, 32767.0);
        auto v = static_cast<std::int16_t>(std::lrint(scaled));
        put_u16(static_cast<std::uint16_t>(v));
    }
    if (!f) throw IoError("write failed: " + path.string());
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path.string());

    static const std::set<std::string> known_fields = {
        "path", "speaker_id", "emotion", "sentence_id", "repetition"};

    CorpusManifest manifest;
    std::set<std::tuple<std::string, Emotion, int, int>> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw SchemaError("manifest line " + std::to_string(lineno) + ": " + e.what());
        }
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!known_fields.count(it.key()))
                log_warn("manifest line " + std::to_string(lineno) + ": ignoring unknown field '" + it.key() + "'");
        }
        UtteranceRecord rec;
        try {
            rec.path = j.at("path").get<std::string>();
            rec.speaker_id = j.at("speaker_id").get<std::string>();
            rec.sentence_id = j.at("sentence_id").get<int>();
            rec.repetition = j.at("repetition").get<int>();
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError("manifest line " + std::to_string(lineno) + ": " + e.what());
        }
        std::string emo_str;
        try {
            emo_str = j.at("emotion").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError("manifest line " + std::to_string(lineno) + ": " + e.what());
        }
        auto emo = emotion_from_name(emo_str);
        if (!emo)
            throw ValidationError("manifest line " + std::to_string(lineno) + ": unknown emotion '" + emo_str + "'");
        rec.emotion = *emo;
        if (rec.sentence_id < 1 || rec.repetition < 1)
            throw ValidationError("manifest line " + std::to_string(lineno) + ": sentence_id and repetition must be >= 1");

        auto key = std::make_tuple(rec.speaker_id, rec.emotion, rec.sentence_id, rec.repetition);
        if (!seen.insert(key).second)
            throw ValidationError("manifest line " + std::to_string(lineno) + ": duplicate record key (" +
                                  rec.speaker_id + ", " + emotion_name(rec.emotion) + ", " +
                                  std::to_string(rec.sentence_id) + ", " + std::to_string(rec.repetition) + ")");

        manifest.sentence_count = std::max(manifest.sentence_count, rec.sentence_id);
        manifest.repetition_count = std::max(manifest.repetition_count, rec.repetition);
        manifest.records.push_back(std::move(rec));
    }
    return manifest;
}

void save_manifest(const std::filesystem::path& path, const CorpusManifest& manifest) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& rec : manifest.records) {
        nlohmann::json j{{"path", rec.path},
                         {"speaker_id", rec.speaker_id},
                         {"emotion", emotion_name(rec.emotion)},
                         {"sentence_id", rec.sentence_id},
                         {"repetition", rec.repetition}};
        f << j.dump() << "\n";
    }
    if (!f) throw IoError("write failed: " + path.string());
}

std::pair<CorpusManifest, CorpusManifest> split_published_protocol(const CorpusManifest& manifest) {
    if (manifest.sentence_count < 2 || manifest.sentence_count % 2 != 0)
        throw ProtocolError("train/test split needs an even sentence count >= 2, got " +
                            std::to_string(manifest.sentence_count));
    const int half = manifest.sentence_count / 2;
    CorpusManifest train, test;
    train.sentence_count = test.sentence_count = manifest.sentence_count;
    train.repetition_count = test.repetition_count = manifest.repetition_count;
    for (const auto& rec : manifest.records) {
        if (rec.sentence_id <= half)
            train.records.push_back(rec);
        else
            test.records.push_back(rec);
    }
    return {std::move(train), std::move(test)};
}

}  // namespace cascade
