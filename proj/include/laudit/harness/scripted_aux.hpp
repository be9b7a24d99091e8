#pragma once

#include "laudit/gateway.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace laudit::harness {

/// A fine-grained stylistic constraint layered on top of a register.
struct DetailRule {
    std::string id;
    std::string clause;   ///< sentence appended to the prompt
    std::string trigger;  ///< lowercase phrase that marks the rule in a prompt
    std::vector<std::string> stems;  ///< words whose rewritten forms reveal the rule
};

/// Known rules in canonical order: "imagery" (adjectives before landscape
/// nouns in the body) and "refrain" (a closing refrain sentence).
const std::vector<DetailRule>& detail_rules();
const DetailRule& detail_rule(std::string_view id);

/// Lowercase cue phrase that identifies the register in a prompt.
std::string_view register_cue(int register_id);

/// Register named by the prompt, by longest cue match (ties to smaller id).
std::optional<int> detect_register(std::string_view prompt);

/// Ids of the rules whose trigger appears in the prompt, canonical order.
std::vector<std::string> detect_rules(std::string_view prompt);

/// Prompt text with every known rule clause removed.
std::string strip_rule_clauses(std::string_view prompt);

/// base + " " + clause for each rule, canonical order.
std::string compose_prompt(std::string_view base, std::span<const std::string> rule_ids);

/// The ground-truth laundering prompt: standard prompt of the register plus
/// the rule clauses.
std::string laundering_prompt(int register_id, std::span<const std::string> rule_ids);

bool is_function_word(std::string_view token);

/// Content tokens (not function words, not punctuation) of the text.
std::vector<std::string> content_words(std::string_view text);

/// Register-specific rewriting used by the scripted auxiliary model.
///
/// Placeholder fills and every body word w become w + abbreviation +
/// syllable, where the syllable depends on a running hash of all tokens
/// emitted so far in the document. Any local change therefore alters every
/// later word.
class Rewriter {
public:
    explicit Rewriter(std::optional<int> register_id);

    /// Fills each bracketed placeholder of `tmpl` with the next content word
    /// (cycling; "it" when there are none), keeping literal text verbatim.
    void fill_template(std::string_view tmpl, std::span<const std::string> words);

    /// Appends one body sentence: the connective, then the tokens, with every
    /// word mapped. With `imagery`, landscape nouns get an
    /// adjective in front.
    void body_sentence(std::string_view connective, std::span<const std::string> tokens, bool imagery);

    const std::string& text() const noexcept { return out_; }

private:
    std::string emit(const std::string& tok, bool content);

    std::optional<int> register_id_;
    std::string infix_;
    std::uint64_t state_;
    std::string out_;
};

/// Full scripted laundering of `text` into the register with the rules.
/// Without a register the text is returned unchanged.
std::string launder(std::optional<int> register_id, std::span<const std::string> rule_ids, std::string_view text);

/// Opening of a laundered document: the register's template filled from the
/// first sentence's content words.
std::string rewrite_opening(std::optional<int> register_id, std::string_view tmpl, std::string_view first_sentence);

/// Positional word alignment of equally long openings: differing columns
/// become "[...]" keeping shared leading/trailing punctuation. Openings of
/// different lengths yield their common word prefix followed by " [...]".
std::string extract_common_template(std::span<const std::string> openings);

/// Register whose fixture template matches `tmpl`: exact match after
/// placeholder normalization first, then the largest literal-word overlap.
std::optional<int> match_template(std::string_view tmpl);

/// Deterministic stand-in for the auxiliary LLM.
class ScriptedAuxBackend final : public gateway::Backend {
public:
    std::string rewrite(std::string_view prompt, std::string_view text) const override;
    std::string instruct(std::string_view instruction, std::span<const std::string> materials) const override;
};

gateway::ModelHandle make_scripted_aux(std::string model_id = "scripted-aux");

}  // namespace laudit::harness
