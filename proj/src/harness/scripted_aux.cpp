#include "laudit/harness/scripted_aux.hpp"

#include "laudit/corpus.hpp"
#include "laudit/errors.hpp"
#include "laudit/harness/synthetic.hpp"
#include "laudit/registers.hpp"
#include "laudit/rng.hpp"
#include "laudit/search.hpp"
#include "laudit/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <unordered_set>

namespace laudit::harness {

namespace {

const std::array<std::string_view, 23> kCues = {
    "lyrical",           "encyclopedia",     "spoken style",        "research article",
    "interview",         "descriptive profile", "interactive discussion", "frequently asked questions",
    "storytelling narrative", "terms and conditions", "news report",   "opinion piece",
    "sports report",     "as a review",      "narrative blog",      "opinion blog",
    "step-by-step",      "sermon",           "recipe",              "sales description",
    "persuade the reader", "informational description", "editorial",
};

const std::array<std::array<std::string_view, 3>, 23> kConnectives = {{
    {"softly,", "and so,", "like a whisper,"},
    {"furthermore,", "in addition,", "historically,"},
    {"you know,", "so anyway,", "and honestly,"},
    {"moreover,", "notably,", "in this study,"},
    {"well,", "as you can see,", "to answer that,"},
    {"remarkably,", "at a glance,", "above all,"},
    {"right, and", "oh, and", "exactly, plus"},
    {"in short,", "good question:", "also worth noting,"},
    {"one day,", "and then,", "long after,"},
    {"pursuant to this clause,", "hereinafter,", "subject to the foregoing,"},
    {"officials said", "according to reports,", "meanwhile,"},
    {"personally,", "frankly,", "i believe"},
    {"in a stunning move,", "on the field,", "with the crowd roaring,"},
    {"overall,", "to be fair,", "on the downside,"},
    {"looking back,", "here is the thing:", "as i wandered,"},
    {"let me be clear:", "think about it:", "in my humble opinion,"},
    {"next,", "then,", "finally,"},
    {"brothers and sisters,", "let us remember,", "as scripture teaches,"},
    {"next, combine", "stir in", "season with"},
    {"imagine this:", "best of all,", "act now:"},
    {"the data show", "consider this:", "statistics confirm"},
    {"in general,", "specifically,", "by definition,"},
    {"we must ask:", "make no mistake,", "in the end,"},
}};

const std::vector<std::string> kImageryAdjectives = {"luminous", "gilded", "velvet", "shimmering",
                                                      "amber", "silvered", "misty", "crimson"};

constexpr std::string_view kRefrain = "and still the echoes linger.";

const std::unordered_set<std::string_view> kFunctionWords = {
    "a", "an", "the", "of", "in", "on", "at", "to", "for", "with", "by", "from", "and", "or", "but", "nor",
    "was", "were", "is", "are", "be", "been", "being", "as", "that", "which", "who", "whom", "whose", "its",
    "his", "her", "their", "it", "he", "she", "they", "him", "them", "this", "these", "those", "into", "after",
    "before", "during", "over", "under", "between", "also", "has", "had", "have", "not", "many", "most", "more",
    "than", "where", "when", "while", "about", "so", "some", "several", "such", "then", "there", "what", "why",
    "how", "we", "you", "i", "me", "my", "our", "your", "us", "do", "does", "did", "can", "could", "would",
    "should", "will", "may", "might", "must", "if", "each", "every", "all", "any", "both", "other", "only",
    "often", "very", "too", "up", "out", "off", "down", "s", "let"};

const std::array<std::string_view, 64> kSyllables = {
    "ba", "be", "bi", "bo", "bu", "da", "de", "di", "do", "du", "fa", "fe", "fi", "fo", "fu", "ga",
    "ge", "gi", "go", "gu", "ka", "ke", "ki", "ko", "ku", "la", "le", "li", "lo", "lu", "ma", "me",
    "mi", "mo", "mu", "na", "ne", "ni", "no", "nu", "pa", "pe", "pi", "po", "pu", "ra", "re", "ri",
    "ro", "ru", "sa", "se", "si", "so", "su", "ta", "te", "ti", "to", "tu", "va", "ve", "vi", "vo"};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool has_signature(std::string_view text, const DetailRule& rule) {
    for (const auto& tok : gateway::tokenize(text)) {
        for (const auto& stem : rule.stems) {
            if (tok.compare(0, stem.size(), stem) == 0) return true;
        }
    }
    return false;
}

std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

bool is_ascii_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) && c != '[' && c != ']'; }

std::string join(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out += ' ';
        out += w;
    }
    return out;
}

}  // namespace

const std::vector<DetailRule>& detail_rules() {
    static const std::vector<DetailRule> rules = {
        {"imagery", "Paint every concrete noun with a vivid imagery adjective.", "imagery adjective", kImageryAdjectives},
        {"refrain", "Close the text with a short recurring refrain.", "recurring refrain", {"echoes", "linger"}},
    };
    return rules;
}

const DetailRule& detail_rule(std::string_view id) {
    for (const auto& r : detail_rules()) {
        if (r.id == id) return r;
    }
    throw ValidationError("unknown detail rule '" + std::string(id) + "'");
}

std::string_view register_cue(int register_id) {
    reversal::register_by_id(register_id);
    return kCues[static_cast<std::size_t>(register_id - 1)];
}

std::optional<int> detect_register(std::string_view prompt) {
    const std::string p = lower(prompt);
    std::optional<int> best;
    std::size_t best_len = 0;
    for (std::size_t i = 0; i < kCues.size(); ++i) {
        if (p.find(kCues[i]) != std::string::npos && kCues[i].size() > best_len) {
            best = static_cast<int>(i + 1);
            best_len = kCues[i].size();
        }
    }
    return best;
}

std::vector<std::string> detect_rules(std::string_view prompt) {
    const std::string p = lower(prompt);
    std::vector<std::string> out;
    for (const auto& r : detail_rules()) {
        if (p.find(r.trigger) != std::string::npos) out.push_back(r.id);
    }
    return out;
}

std::string strip_rule_clauses(std::string_view prompt) {
    std::string p(prompt);
    for (const auto& r : detail_rules()) {
        for (auto pos = p.find(r.clause); pos != std::string::npos; pos = p.find(r.clause)) {
            std::size_t start = pos;
            while (start > 0 && p[start - 1] == ' ') --start;
            p.erase(start, pos + r.clause.size() - start);
        }
    }
    return corpus::normalize_text(p);
}

std::string compose_prompt(std::string_view base, std::span<const std::string> rule_ids) {
    std::string out(base);
    for (const auto& r : detail_rules()) {
        if (std::find(rule_ids.begin(), rule_ids.end(), r.id) != rule_ids.end()) out += " " + r.clause;
    }
    return out;
}

std::string laundering_prompt(int register_id, std::span<const std::string> rule_ids) {
    for (const auto& id : rule_ids) detail_rule(id);
    return compose_prompt(reversal::standard_prompt_fixture(register_id), rule_ids);
}

bool is_function_word(std::string_view token) { return kFunctionWords.count(token) > 0; }

std::vector<std::string> content_words(std::string_view text) {
    std::vector<std::string> out;
    for (auto& tok : gateway::tokenize(text)) {
        if (!gateway::is_punctuation_token(tok) && !is_function_word(tok)) out.push_back(std::move(tok));
    }
    return out;
}

// ---- Rewriter ---------------------------------------------------------------

Rewriter::Rewriter(std::optional<int> register_id)
    : register_id_(register_id), state_(mix64(fnv1a("laundering"), static_cast<std::uint64_t>(register_id.value_or(0)))) {
    if (register_id_) infix_ = reversal::register_by_id(*register_id_).abbreviation;
}

std::string Rewriter::emit(const std::string& tok, bool content) {
    std::string out = tok;
    if (content && register_id_) {
        out += infix_;
        out += kSyllables[mix64(state_, fnv1a(tok)) % kSyllables.size()];
    }
    state_ = mix64(state_, fnv1a(out));
    return out;
}

void Rewriter::fill_template(std::string_view tmpl, std::span<const std::string> words) {
    std::size_t next_word = 0;
    std::size_t i = 0;
    while (i < tmpl.size()) {
        const auto open = tmpl.find('[', i);
        const auto close = open == std::string_view::npos ? open : tmpl.find(']', open + 1);
        const auto literal_end = close == std::string_view::npos ? tmpl.size() : open;
        const auto lit = tmpl.substr(i, literal_end - i);
        for (const auto& tok : gateway::tokenize(lit)) emit(tok, false);
        out_ += lit;
        if (close == std::string_view::npos) break;
        const std::string word = words.empty() ? std::string("it") : words[next_word++ % words.size()];
        out_ += emit(word, true);
        i = close + 1;
    }
}

void Rewriter::body_sentence(std::string_view connective, std::span<const std::string> tokens, bool imagery) {
    std::vector<std::string> out;
    for (const auto& tok : gateway::tokenize(connective)) out.push_back(emit(tok, !gateway::is_punctuation_token(tok)));
    const auto& nouns = visual_nouns();
    for (const auto& tok : tokens) {
        const bool word = !gateway::is_punctuation_token(tok);
        if (imagery && word && std::find(nouns.begin(), nouns.end(), tok) != nouns.end()) {
            out.push_back(emit(kImageryAdjectives[fnv1a(tok) % kImageryAdjectives.size()], true));
        }
        out.push_back(emit(tok, word));
    }
    if (!out_.empty()) out_ += ' ';
    out_ += gateway::detokenize(out);
}

std::string rewrite_opening(std::optional<int> register_id, std::string_view tmpl, std::string_view first_sentence) {
    Rewriter w(register_id);
    w.fill_template(tmpl, content_words(first_sentence));
    return w.text();
}

std::string launder(std::optional<int> register_id, std::span<const std::string> rule_ids, std::string_view text) {
    if (!register_id) return std::string(text);
    const auto sentences = corpus::split_sentences(text);
    if (sentences.empty()) return std::string(text);
    const bool imagery = std::find(rule_ids.begin(), rule_ids.end(), "imagery") != rule_ids.end();
    const bool refrain = std::find(rule_ids.begin(), rule_ids.end(), "refrain") != rule_ids.end();
    const auto& connectives = kConnectives[static_cast<std::size_t>(*register_id - 1)];

    Rewriter w(register_id);
    w.fill_template(reversal::opening_template_fixture(*register_id), content_words(sentences.front()));
    for (std::size_t i = 1; i < sentences.size(); ++i) {
        w.body_sentence(connectives[(i - 1) % connectives.size()], gateway::tokenize(sentences[i]), imagery);
    }
    if (refrain) w.body_sentence({}, gateway::tokenize(kRefrain), false);
    return w.text();
}

std::string extract_common_template(std::span<const std::string> openings) {
    if (openings.empty()) return {};
    std::vector<std::vector<std::string>> rows;
    for (const auto& o : openings) rows.push_back(split_words(o));
    const std::size_t len = rows.front().size();
    const bool equal = std::all_of(rows.begin(), rows.end(), [&](const auto& r) { return r.size() == len; });
    if (!equal) {
        std::vector<std::string> prefix;
        const auto shortest = std::min_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); })->size();
        for (std::size_t c = 0; c < shortest; ++c) {
            if (std::any_of(rows.begin(), rows.end(), [&](const auto& r) { return r[c] != rows.front()[c]; })) break;
            prefix.push_back(rows.front()[c]);
        }
        prefix.push_back("[...]");
        return join(prefix);
    }
    std::vector<std::string> out;
    for (std::size_t c = 0; c < len; ++c) {
        const std::string& first = rows.front()[c];
        if (std::all_of(rows.begin(), rows.end(), [&](const auto& r) { return r[c] == first; })) {
            out.push_back(first);
            continue;
        }
        std::size_t lead = 0;
        while (lead < first.size() && is_ascii_punct(first[lead]) &&
               std::all_of(rows.begin(), rows.end(), [&](const auto& r) { return lead < r[c].size() && r[c][lead] == first[lead]; })) {
            ++lead;
        }
        std::size_t trail = 0;
        auto at_end = [&](const std::string& w, std::size_t k) { return w[w.size() - 1 - k]; };
        while (trail < first.size() - lead && is_ascii_punct(at_end(first, trail)) &&
               std::all_of(rows.begin(), rows.end(), [&](const auto& r) {
                   return trail < r[c].size() - std::min(lead, r[c].size()) && at_end(r[c], trail) == at_end(first, trail);
               })) {
            ++trail;
        }
        out.push_back(first.substr(0, lead) + "[...]" + first.substr(first.size() - trail));
    }
    return join(out);
}

std::optional<int> match_template(std::string_view tmpl) {
    const std::string norm = corpus::normalize_text(reversal::normalize_placeholders(tmpl));
    for (const auto& r : reversal::catalog()) {
        if (corpus::normalize_text(reversal::normalize_placeholders(reversal::opening_template_fixture(r.id))) == norm) {
            return r.id;
        }
    }
    auto literal_words = [](std::string_view t) {
        std::multiset<std::string> out;
        for (auto& w : split_words(reversal::normalize_placeholders(t))) {
            if (w.find('[') == std::string::npos) out.insert(lower(w));
        }
        return out;
    };
    const auto mine = literal_words(tmpl);
    std::optional<int> best;
    std::size_t best_overlap = 0;
    for (const auto& r : reversal::catalog()) {
        const auto theirs = literal_words(reversal::opening_template_fixture(r.id));
        std::vector<std::string> common;
        std::set_intersection(mine.begin(), mine.end(), theirs.begin(), theirs.end(), std::back_inserter(common));
        if (common.size() > best_overlap) {
            best = r.id;
            best_overlap = common.size();
        }
    }
    return best;
}

// ---- scripted auxiliary -----------------------------------------------------

std::string ScriptedAuxBackend::rewrite(std::string_view prompt, std::string_view text) const {
    return launder(detect_register(prompt), detect_rules(prompt), text);
}

std::string ScriptedAuxBackend::instruct(std::string_view instruction, std::span<const std::string> materials) const {
    auto need = [&](std::size_t n) {
        if (materials.size() < n) throw TransportError("scripted aux: expected " + std::to_string(n) + " materials");
    };
    if (instruction.starts_with(reversal::kStandardPromptInstruction)) {
        need(1);
        const auto* reg = reversal::find_register(materials[0]);
        if (reg == nullptr) throw TransportError("scripted aux: unknown register '" + materials[0] + "'");
        return std::string(reversal::standard_prompt_fixture(reg->id));
    }
    if (instruction == reversal::kTemplateInstruction) {
        need(1);
        return extract_common_template(materials);
    }
    if (instruction == reversal::kRewriteAsTemplateInstruction) {
        need(2);
        return rewrite_opening(match_template(materials[0]), materials[0], materials[1]);
    }
    if (instruction == reversal::kEditInstruction) {
        need(3);
        const auto& prompt = materials[0];
        auto rules = detect_rules(prompt);
        for (const auto& r : detail_rules()) {
            if (has_signature(materials[2], r) && !has_signature(materials[1], r)) rules.push_back(r.id);
        }
        return compose_prompt(strip_rule_clauses(prompt), rules);
    }
    if (instruction == reversal::kDistillInstruction) {
        need(1);
        std::vector<std::string> rules;
        for (const auto& h : materials) {
            for (auto& id : detect_rules(h)) rules.push_back(std::move(id));
        }
        return compose_prompt(strip_rule_clauses(materials[0]), rules);
    }
    throw TransportError("scripted aux: unrecognised instruction");
}

gateway::ModelHandle make_scripted_aux(std::string model_id) {
    return gateway::ModelHandle(gateway::BackendKind::ScriptedAux, std::move(model_id), {gateway::Capability::Rewrite},
                                std::make_shared<ScriptedAuxBackend>());
}

}  // namespace laudit::harness
