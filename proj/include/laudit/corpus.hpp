#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace laudit::corpus {

/// One document. Construct through make_sample() so the text is normalized.
struct TextSample {
    std::string id;
    std::string text;
    std::string source_tag;

    bool operator==(const TextSample&) const = default;
};

/// Candidate corpus (pro) and guaranteed non-member reference corpus (held).
struct CorpusSplit {
    std::vector<TextSample> pro;
    std::vector<TextSample> held;

    /// Throws ValidationError unless both halves are non-empty and disjoint
    /// by id and by normalized text.
    void validate() const;
};

/// Unicode NFC followed by trimming of leading/trailing whitespace.
/// Internal whitespace is preserved. Throws ValidationError on invalid UTF-8.
std::string normalize_text(std::string_view text);

/// Builds a sample with normalized text; throws ValidationError when the
/// id or the normalized text is empty.
TextSample make_sample(std::string id, std::string_view text, std::string source_tag = {});

/// Reads one JSON object per line ({"id", "text", optional "source_tag"}).
/// Blank lines are skipped. Duplicate ids and empty texts are rejected.
std::vector<TextSample> load_jsonl(const std::filesystem::path& path);

void save_jsonl(const std::filesystem::path& path, std::span<const TextSample> samples);

/// Draws `count` distinct samples uniformly without replacement, in draw
/// order. Deterministic for a fixed (input order, count, seed).
std::vector<TextSample> uniform_sample(std::span<const TextSample> samples, std::size_t count,
                                       std::uint64_t seed);

/// Index form of uniform_sample(): the drawn positions, in draw order.
std::vector<std::size_t> uniform_sample_indices(std::size_t population, std::size_t count,
                                                std::uint64_t seed);

/// Prefix of `text` up to and including the first sentence terminator
/// ('.', '!' or '?' followed by whitespace or end of text), skipping known
/// abbreviations. Returns the whole text when no terminator exists.
std::string first_sentence(std::string_view text);

/// Repeated application of first_sentence(); pieces are trimmed.
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace laudit::corpus
