#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "cascade/audio.hpp"
#include "cascade/errors.hpp"
#include "cascade/rng.hpp"

using namespace cascade;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    auto dir = fs::temp_directory_path() / "cascade_test_audio";
    fs::create_directories(dir);
    return dir;
}

void put_u32(std::ofstream& f, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    f.write(reinterpret_cast<char*>(b), 4);
}

void put_u16(std::ofstream& f, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
    f.write(reinterpret_cast<char*>(b), 2);
}

// Hand-rolled writer so the reader is tested against independent bytes.
fs::path write_pcm16(const std::string& name, const std::vector<std::int16_t>& samples,
                     std::uint16_t channels = 1, std::uint16_t format_code = 1,
                     std::uint16_t bits = 16, const char* magic = "RIFF") {
    auto path = temp_dir() / name;
    std::ofstream f(path, std::ios::binary);
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
    f.write(magic, 4);
    put_u32(f, 36 + data_bytes);
    f.write("WAVE", 4);
    f.write("fmt ", 4);
    put_u32(f, 16);
    put_u16(f, format_code);
    put_u16(f, channels);
    put_u32(f, 8000);
    put_u32(f, 8000u * 2 * channels);
    put_u16(f, static_cast<std::uint16_t>(2 * channels));
    put_u16(f, bits);
    f.write("data", 4);
    put_u32(f, data_bytes);
    for (std::int16_t s : samples) put_u16(f, static_cast<std::uint16_t>(s));
    return path;
}

CorpusManifest make_manifest(int speakers, int sentences, int reps,
                             const std::vector<Emotion>& emotions) {
    CorpusManifest m;
    m.sentence_count = sentences;
    m.repetition_count = reps;
    for (int s = 0; s < speakers; ++s)
        for (Emotion e : emotions)
            for (int k = 1; k <= sentences; ++k)
                for (int r = 1; r <= reps; ++r) {
                    UtteranceRecord rec;
                    rec.speaker_id = "s" + std::to_string(s + 1);
                    rec.emotion = e;
                    rec.sentence_id = k;
                    rec.repetition = r;
                    rec.path = rec.speaker_id + "_" + emotion_name(e) + "_" + std::to_string(k) +
                               "_" + std::to_string(r) + ".wav";
                    m.records.push_back(rec);
                }
    return m;
}

}  // namespace

TEST_CASE("read_wav decodes zeros and exact integer values") {
    auto zeros = write_pcm16("zeros.wav", std::vector<std::int16_t>(100, 0));
    AudioClip clip = read_wav(zeros);
    REQUIRE(clip.samples.size() == 100);
    CHECK(clip.sample_rate == 8000);
    for (double s : clip.samples) CHECK(s == 0.0);

    auto half = write_pcm16("half.wav", {16384});
    clip = read_wav(half);
    REQUIRE(clip.samples.size() == 1);
    CHECK(clip.samples[0] == 0.5);  // 16384 / 32768
}

TEST_CASE("read_wav rejects what it cannot parse") {
    CHECK_THROWS_AS(read_wav(write_pcm16("rifx.wav", {0}, 1, 1, 16, "RIFX")), FormatError);
    CHECK_THROWS_AS(read_wav(write_pcm16("alaw.wav", {0}, 1, 6)), UnsupportedFormatError);
    CHECK_THROWS_AS(read_wav(write_pcm16("b24.wav", {0}, 1, 1, 24)), UnsupportedFormatError);
    CHECK_THROWS_AS(read_wav(temp_dir() / "missing.wav"), IoError);

    auto truncated = temp_dir() / "trunc.wav";
    std::ofstream(truncated, std::ios::binary).write("RIFF", 4);
    CHECK_THROWS_AS(read_wav(truncated), FormatError);
}

TEST_CASE("multi-channel input is averaged to mono") {
    // Interleaved stereo frames: (16384, 0) and (-16384, -16384).
    auto path = write_pcm16("stereo.wav", {16384, 0, -16384, -16384}, 2);
    AudioClip clip = read_wav(path);
    REQUIRE(clip.samples.size() == 2);
    CHECK(clip.samples[0] == doctest::Approx(0.25));
    CHECK(clip.samples[1] == doctest::Approx(-0.5));
}

TEST_CASE("wav write/read round-trips within quantization") {
    AudioClip clip;
    clip.sample_rate = 16000;
    Rng rng(2024);
    clip.samples.resize(500);
    for (auto& s : clip.samples) s = rng.uniform(-1.0, 1.0);

    auto path = temp_dir() / "roundtrip.wav";
    write_wav(path, clip);
    AudioClip back = read_wav(path);
    REQUIRE(back.samples.size() == clip.samples.size());
    CHECK(back.sample_rate == clip.sample_rate);
    for (std::size_t i = 0; i < clip.samples.size(); ++i)
        CHECK(std::abs(back.samples[i] - clip.samples[i]) <= 1.0 / 32768.0);
}

TEST_CASE("load_manifest parses records and enforces uniqueness") {
    auto path = temp_dir() / "one.jsonl";
    std::ofstream(path) << R"({"path":"a.wav","speaker_id":"s01","emotion":"neutral","sentence_id":1,"repetition":1})"
                        << "\n";
    CorpusManifest m = load_manifest(path);
    REQUIRE(m.records.size() == 1);
    CHECK(m.records[0].path == "a.wav");
    CHECK(m.records[0].speaker_id == "s01");
    CHECK(m.records[0].emotion == Emotion::Neutral);
    CHECK(m.records[0].sentence_id == 1);
    CHECK(m.records[0].repetition == 1);
    CHECK(m.sentence_count == 1);
    CHECK(m.repetition_count == 1);

    auto dup = temp_dir() / "dup.jsonl";
    {
        std::ofstream f(dup);
        f << R"({"path":"a.wav","speaker_id":"s01","emotion":"neutral","sentence_id":1,"repetition":1})" << "\n";
        f << R"({"path":"b.wav","speaker_id":"s01","emotion":"neutral","sentence_id":1,"repetition":1})" << "\n";
    }
    CHECK_THROWS_AS(load_manifest(dup), ValidationError);
}

TEST_CASE("load_manifest rejects bad fields and tolerates unknown ones") {
    auto missing = temp_dir() / "missing.jsonl";
    std::ofstream(missing) << R"({"path":"a.wav","speaker_id":"s01","emotion":"neutral","sentence_id":1})" << "\n";
    CHECK_THROWS_AS(load_manifest(missing), SchemaError);

    auto unknown_emotion = temp_dir() / "emo.jsonl";
    std::ofstream(unknown_emotion)
        << R"({"path":"a.wav","speaker_id":"s01","emotion":"bored","sentence_id":1,"repetition":1})" << "\n";
    CHECK_THROWS_AS(load_manifest(unknown_emotion), ValidationError);

    auto extra = temp_dir() / "extra.jsonl";
    std::ofstream(extra)
        << R"({"path":"a.wav","speaker_id":"s01","emotion":"sad","sentence_id":1,"repetition":1,"note":"x"})" << "\n";
    CorpusManifest m = load_manifest(extra);  // warns, still parses
    REQUIRE(m.records.size() == 1);
    CHECK(m.records[0].emotion == Emotion::Sad);
}

TEST_CASE("manifest save/load round trip and full-corpus count") {
    std::vector<Emotion> six(all_emotions().begin(), all_emotions().end());
    CorpusManifest m = make_manifest(30, 8, 9, six);
    CHECK(m.records.size() == 12960);  // 30 x 8 x 9 x 6

    auto path = temp_dir() / "full.jsonl";
    save_manifest(path, m);
    CorpusManifest back = load_manifest(path);
    CHECK(back.records == m.records);
    CHECK(back.sentence_count == m.sentence_count);
    CHECK(back.repetition_count == m.repetition_count);
}

TEST_CASE("split keeps first-half sentences for training") {
    CorpusManifest tiny = make_manifest(1, 2, 1, {Emotion::Neutral});
    auto [train, test] = split_published_protocol(tiny);
    REQUIRE(train.records.size() == 1);
    REQUIRE(test.records.size() == 1);
    CHECK(train.records[0].sentence_id == 1);
    CHECK(test.records[0].sentence_id == 2);
}

TEST_CASE("split reproduces the protocol counts") {
    CorpusManifest one = make_manifest(1, 8, 9, {Emotion::Neutral});
    auto [train1, test1] = split_published_protocol(one);
    CHECK(train1.records.size() == 36);  // 4 sentences x 9 repetitions
    CHECK(test1.records.size() == 36);

    std::vector<Emotion> six(all_emotions().begin(), all_emotions().end());
    CorpusManifest full = make_manifest(30, 8, 9, six);
    auto [train, test] = split_published_protocol(full);
    CHECK(test.records.size() == 6480);  // 30 x 4 x 9 x 6
    CHECK(train.records.size() + test.records.size() == full.records.size());
}

TEST_CASE("split is a partition") {
    CorpusManifest m = make_manifest(2, 4, 2, {Emotion::Neutral, Emotion::Angry});
    auto [train, test] = split_published_protocol(m);
    CHECK(train.records.size() + test.records.size() == m.records.size());

    auto key = [](const UtteranceRecord& r) {
        return std::make_tuple(r.speaker_id, r.emotion, r.sentence_id, r.repetition);
    };
    std::set<std::tuple<std::string, Emotion, int, int>> seen;
    for (const auto& r : train.records) seen.insert(key(r));
    for (const auto& r : test.records) CHECK(seen.insert(key(r)).second);
    CHECK(seen.size() == m.records.size());
}

TEST_CASE("split rejects odd sentence counts") {
    CorpusManifest odd = make_manifest(1, 3, 1, {Emotion::Neutral});
    CHECK_THROWS_AS(split_published_protocol(odd), ProtocolError);
    CorpusManifest none = make_manifest(1, 1, 1, {Emotion::Neutral});
    CHECK_THROWS_AS(split_published_protocol(none), ProtocolError);
}

TEST_CASE("emotion names round-trip") {
    for (Emotion e : all_emotions()) {
        auto back = emotion_from_name(emotion_name(e));
        REQUIRE(back.has_value());
        CHECK(*back == e);
    }
    CHECK_FALSE(emotion_from_name("calm").has_value());
    CHECK(all_emotions().front() == Emotion::Neutral);  // tie-break order starts at neutral
}
