#pragma once

#include <optional>
#include <string>

namespace laudit {

/// A goal+details rewrite instruction. Generation 0 is a register's
/// standard prompt; each accepted refinement produces generation + 1 with
/// parent_hash pointing at its predecessor.
struct RewritePrompt {
    std::string text;
    std::optional<int> register_id;
    int generation = 0;
    std::optional<std::string> parent_hash;

    /// SHA-256 of the prompt text.
    std::string hash() const;

    /// Child prompt with lineage filled in. Throws ValidationError on empty text.
    RewritePrompt refine(std::string new_text) const;

    bool operator==(const RewritePrompt&) const = default;
};

}  // namespace laudit
