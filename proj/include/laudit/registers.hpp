#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace laudit::reversal {

/// One entry of the 23-register taxonomy.
struct Register {
    int id;  ///< 1..23
    std::string name;
    std::string abbreviation;
};

/// The 23 registers. Ids follow the taxonomy table read row by row
/// (ly, en, sp, ra, ...), ending with "ed".
const std::vector<Register>& catalog();

/// Throws ValidationError for ids outside 1..23.
const Register& register_by_id(int id);

/// Lookup by name or abbreviation, case-insensitive; nullptr if unknown.
const Register* find_register(std::string_view name_or_abbreviation);

/// Canonical rewriting prompt for the register ("Rewrite the text in a
/// lyrical style, ...").
std::string_view standard_prompt_fixture(int register_id);

/// Representative first-sentence template with bracketed placeholders.
std::string_view opening_template_fixture(int register_id);

/// First-sentence template T_r extracted for a register.
struct OpeningTemplate {
    int register_id = 0;
    std::string text;
    bool from_fixture = false;

    /// Throws ValidationError unless the text is non-empty and has a placeholder.
    void validate() const;
};

bool has_placeholder(std::string_view text);

/// Replaces every bracketed span "[...anything...]" by "[...]".
std::string normalize_placeholders(std::string_view text);

}  // namespace laudit::reversal
