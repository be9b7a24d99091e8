#pragma once

#include "laudit/corpus.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace laudit::harness {

/// Procedural encyclopedia-style biographies used as desk-scale proprietary
/// text. Word pools are finite, so documents share most of their phrasing.
struct SyntheticOptions {
    std::size_t count = 200;
    std::uint64_t seed = 1;
    std::string id_prefix = "doc";
    std::string source_tag = "synthetic";
    /// Fraction of documents that mention landscape nouns (river, tower, ...).
    double visual_fraction = 0.5;
    std::size_t min_body_sentences = 3;
    std::size_t max_body_sentences = 6;
};

/// `count` documents with distinct texts; deterministic under the options.
std::vector<corpus::TextSample> generate_corpus(const SyntheticOptions& opts);

/// Landscape nouns that the imagery detail rule decorates.
const std::vector<std::string>& visual_nouns();

/// True when the text mentions at least one landscape noun.
bool has_visual_noun(std::string_view text);

}  // namespace laudit::harness
