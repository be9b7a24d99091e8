#include "laudit/tokenizer.hpp"

#include <unicode/uchar.h>
#include <unicode/unistr.h>

namespace laudit::gateway {

namespace {

bool is_punct_cp(UChar32 c) {
    const int8_t t = u_charType(c);
    switch (t) {
        case U_DASH_PUNCTUATION:
        case U_START_PUNCTUATION:
        case U_END_PUNCTUATION:
        case U_CONNECTOR_PUNCTUATION:
        case U_OTHER_PUNCTUATION:
        case U_INITIAL_PUNCTUATION:
        case U_FINAL_PUNCTUATION:
        case U_MATH_SYMBOL:
        case U_CURRENCY_SYMBOL:
        case U_MODIFIER_SYMBOL:
        case U_OTHER_SYMBOL:
            return true;
        default:
            return false;
    }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    icu::UnicodeString s = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    s.toLower();

    std::vector<std::string> tokens;
    icu::UnicodeString current;
    auto flush = [&] {
        if (current.isEmpty()) return;
        std::string out;
        current.toUTF8String(out);
        tokens.push_back(std::move(out));
        current.remove();
    };
    for (int32_t i = 0; i < s.length(); i = s.moveIndex32(i, 1)) {
        const UChar32 c = s.char32At(i);
        if (u_isUWhiteSpace(c)) {
            flush();
        } else if (is_punct_cp(c)) {
            flush();
            current.append(c);
            flush();
        } else {
            current.append(c);
        }
    }
    flush();
    return tokens;
}

bool is_punctuation_token(std::string_view token) {
    icu::UnicodeString s = icu::UnicodeString::fromUTF8(
        icu::StringPiece(token.data(), static_cast<int32_t>(token.size())));
    return s.countChar32() == 1 && is_punct_cp(s.char32At(0));
}

std::string detokenize(std::span<const std::string> tokens) {
    static const std::string_view kNoSpaceBefore[] = {".", ",", ";", ":", "!", "?", ")", "]", "}", "'", "%", "’", "”"};
    static const std::string_view kNoSpaceAfter[] = {"(", "[", "{", "“", "‘"};
    auto in = [](std::string_view t, auto& set) {
        for (auto s : set)
            if (s == t) return true;
        return false;
    };
    std::string out;
    bool suppress_next = true;
    for (const auto& t : tokens) {
        if (!suppress_next && !in(t, kNoSpaceBefore)) out.push_back(' ');
        out += t;
        suppress_next = in(t, kNoSpaceAfter) || t == "'";
    }
    return out;
}

}  // namespace laudit::gateway
