#include "laudit/corpus.hpp"

#include "laudit/errors.hpp"
#include "laudit/rng.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/ustring.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <numeric>
#include <unordered_set>

namespace laudit::corpus {

namespace {

bool valid_utf8(std::string_view s) {
    UErrorCode status = U_ZERO_ERROR;
    int32_t needed = 0;
    u_strFromUTF8(nullptr, 0, &needed, s.data(), static_cast<int32_t>(s.size()), &status);
    return status == U_BUFFER_OVERFLOW_ERROR || U_SUCCESS(status);
}

bool ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

constexpr std::array<std::string_view, 10> kAbbreviations = {
    "dr.", "mr.", "mrs.", "ms.", "st.", "no.", "vs.", "etc.", "e.g.", "i.e."};

bool is_abbreviation(std::string_view text, std::size_t dot) {
    std::size_t begin = dot;
    while (begin > 0 && !ascii_space(text[begin - 1])) --begin;
    while (begin < dot && std::string_view("(\"'[").find(text[begin]) != std::string_view::npos) ++begin;
    std::string word(text.substr(begin, dot - begin + 1));
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end();
}

std::string_view trim_ascii(std::string_view s) {
    while (!s.empty() && ascii_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && ascii_space(s.back())) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string normalize_text(std::string_view text) {
    if (!valid_utf8(text)) throw ValidationError("text is not valid UTF-8");
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
    icu::UnicodeString source = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    icu::UnicodeString normalized = nfc->normalize(source, status);
    if (U_FAILURE(status)) throw ValidationError("NFC normalization failed");

    int32_t begin = 0;
    int32_t end = normalized.length();
    while (begin < end && u_isUWhiteSpace(normalized.char32At(begin))) {
        begin = normalized.moveIndex32(begin, 1);
    }
    while (end > begin) {
        int32_t prev = normalized.moveIndex32(end, -1);
        if (!u_isUWhiteSpace(normalized.char32At(prev))) break;
        end = prev;
    }
    std::string out;
    normalized.tempSubStringBetween(begin, end).toUTF8String(out);
    return out;
}

TextSample make_sample(std::string id, std::string_view text, std::string source_tag) {
    if (id.empty()) throw ValidationError("sample id is empty");
    std::string normalized = normalize_text(text);
    if (normalized.empty()) throw ValidationError("sample '" + id + "' has empty text");
    return TextSample{std::move(id), std::move(normalized), std::move(source_tag)};
}

void CorpusSplit::validate() const {
    if (pro.empty()) throw ValidationError("proprietary corpus is empty");
    if (held.empty()) throw ValidationError("held-out corpus is empty");
    std::unordered_set<std::string> ids;
    std::unordered_set<std::string> texts;
    for (const auto& s : pro) {
        ids.insert(s.id);
        texts.insert(s.text);
    }
    for (const auto& s : held) {
        if (ids.count(s.id)) throw ValidationError("sample id '" + s.id + "' appears in both pro and held");
        if (texts.count(s.text)) throw ValidationError("held sample '" + s.id + "' duplicates a pro text");
    }
}

std::vector<TextSample> load_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open corpus file " + path.string());

    std::vector<TextSample> samples;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim_ascii(line).empty()) continue;

        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(path.string() + ": malformed JSON: " + e.what(), line_no);
        }
        if (!obj.is_object() || !obj.contains("id") || !obj.contains("text") || !obj["id"].is_string() ||
            !obj["text"].is_string()) {
            throw ParseError(path.string() + ": expected object with string fields \"id\" and \"text\"", line_no);
        }
        std::string tag;
        if (obj.contains("source_tag")) {
            if (!obj["source_tag"].is_string()) throw ParseError(path.string() + ": source_tag must be a string", line_no);
            tag = obj["source_tag"].get<std::string>();
        }
        std::string id = obj["id"].get<std::string>();
        if (!seen.insert(id).second) {
            throw ValidationError(path.string() + ": duplicate id '" + id + "' (line " + std::to_string(line_no) + ")");
        }
        try {
            samples.push_back(make_sample(std::move(id), obj["text"].get<std::string>(), std::move(tag)));
        } catch (const ValidationError& e) {
            throw ValidationError(path.string() + ": " + e.what() + " (line " + std::to_string(line_no) + ")");
        }
    }
    return samples;
}

void save_jsonl(const std::filesystem::path& path, std::span<const TextSample> samples) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write corpus file " + path.string());
    for (const auto& s : samples) {
        nlohmann::json obj = {{"id", s.id}, {"text", s.text}};
        if (!s.source_tag.empty()) obj["source_tag"] = s.source_tag;
        out << obj.dump() << '\n';
    }
}

std::vector<std::size_t> uniform_sample_indices(std::size_t population, std::size_t count, std::uint64_t seed) {
    if (count > population) {
        throw SizeError("cannot draw " + std::to_string(count) + " samples from " + std::to_string(population));
    }
    std::vector<std::size_t> idx(population);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    StableRng rng(seed);
    // Partial Fisher-Yates: the first `count` slots hold the draw.
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(population - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    return idx;
}

std::vector<TextSample> uniform_sample(std::span<const TextSample> samples, std::size_t count, std::uint64_t seed) {
    std::vector<TextSample> out;
    out.reserve(count);
    for (std::size_t i : uniform_sample_indices(samples.size(), count, seed)) out.push_back(samples[i]);
    return out;
}

std::string first_sentence(std::string_view text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c != '.' && c != '!' && c != '?') continue;
        const bool boundary = i + 1 == text.size() || ascii_space(text[i + 1]);
        if (!boundary) continue;
        if (c == '.' && is_abbreviation(text, i)) continue;
        return std::string(text.substr(0, i + 1));
    }
    return std::string(text);
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::string_view rest = trim_ascii(text);
    while (!rest.empty()) {
        std::string head = first_sentence(rest);
        out.emplace_back(trim_ascii(head));
        rest = trim_ascii(rest.substr(head.size()));
    }
    return out;
}

}  // namespace laudit::corpus
