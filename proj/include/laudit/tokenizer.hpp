#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace laudit::gateway {

/// Simulator tokenization: lowercase, split on whitespace, and detach every
/// punctuation or symbol code point as its own token.
std::vector<std::string> tokenize(std::string_view text);

/// Joins tokens with single spaces, without a space before closing
/// punctuation or after opening brackets.
std::string detokenize(std::span<const std::string> tokens);

/// True when the token is a single punctuation/symbol code point.
bool is_punctuation_token(std::string_view token);

}  // namespace laudit::gateway
