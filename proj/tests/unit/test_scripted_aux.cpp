#include "laudit/corpus.hpp"
#include "laudit/errors.hpp"
#include "laudit/harness/scripted_aux.hpp"
#include "laudit/registers.hpp"
#include "laudit/search.hpp"
#include "laudit/tokenizer.hpp"

#include <gtest/gtest.h>

using namespace laudit;
using namespace laudit::harness;
using laudit::gateway::tokenize;

namespace {

const std::string kDoc =
    "The old harbor town wakes slowly under a grey sky. Fishermen mend their nets along the stone quay. "
    "A bell rings from the chapel on the hill.";

std::vector<std::string> rules(std::initializer_list<const char*> ids) { return {ids.begin(), ids.end()}; }

}  // namespace

TEST(ScriptedAux, LyricalOpeningFollowsTemplate) {
    const auto out = launder(1, {}, kDoc);
    EXPECT_TRUE(out.starts_with("In the heart of ")) << out;
    EXPECT_NE(out, kDoc);
    EXPECT_EQ(launder(1, {}, kDoc), out);
}

TEST(ScriptedAux, WordsCarryTheRegisterAbbreviation) {
    const auto out = launder(2, {}, kDoc);
    const auto body = out.substr(corpus::first_sentence(out).size());
    for (const auto& tok : tokenize(body)) {
        if (std::isalpha(static_cast<unsigned char>(tok[0]))) {
            EXPECT_NE(tok.find("en"), std::string::npos) << tok;
        }
    }
}

TEST(ScriptedAux, NoRegisterLeavesTextUnchanged) {
    EXPECT_EQ(launder(std::nullopt, rules({"imagery"}), kDoc), kDoc);
    EXPECT_EQ(make_scripted_aux().rewrite({"Please improve this text."}, kDoc), kDoc);
}

TEST(ScriptedAux, LocalChangeCascades) {
    std::string edited = kDoc;
    edited.replace(edited.find("stone"), 5, "brick");
    const auto a = tokenize(launder(3, {}, kDoc));
    const auto b = tokenize(launder(3, {}, edited));
    ASSERT_EQ(a.size(), b.size());
    std::size_t first = a.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) {
            first = i;
            break;
        }
    }
    ASSERT_LT(first, a.size());
    // Every later word differs.
    for (std::size_t i = first + 1; i < a.size(); ++i) {
        if (std::isalpha(static_cast<unsigned char>(a[i][0]))) EXPECT_NE(a[i], b[i]) << i;
    }
}

TEST(ScriptedAux, RulesLeaveSignatures) {
    const std::string doc = "Rain falls. The river bends past the mountain and the forest.";
    const auto plain = launder(1, {}, doc);
    const auto rich = launder(1, rules({"imagery", "refrain"}), doc);
    EXPECT_EQ(plain.find("echoes"), std::string::npos);
    EXPECT_NE(rich.find("echoes"), std::string::npos);
    bool adjective = false;
    for (const auto& a : detail_rule("imagery").stems) adjective = adjective || rich.find(a) != std::string::npos;
    EXPECT_TRUE(adjective) << rich;
    EXPECT_THROW(detail_rule("rhyme"), ValidationError);
}

TEST(ScriptedAux, PromptParsing) {
    const auto p = laundering_prompt(1, rules({"refrain", "imagery"}));
    EXPECT_EQ(detect_register(p), 1);
    EXPECT_EQ(detect_rules(p), rules({"imagery", "refrain"}));
    EXPECT_EQ(strip_rule_clauses(p), reversal::standard_prompt_fixture(1));
    EXPECT_EQ(compose_prompt("Base.", rules({"refrain"})), "Base. " + detail_rule("refrain").clause);
    EXPECT_EQ(detect_register("Make it better."), std::nullopt);
    for (const auto& r : reversal::catalog()) {
        EXPECT_EQ(detect_register(reversal::standard_prompt_fixture(r.id)), r.id) << r.abbreviation;
    }
}

TEST(ScriptedAux, ContentWords) {
    EXPECT_EQ(content_words("The cat sat on a mat."), rules({"cat", "sat", "mat"}));
    EXPECT_TRUE(is_function_word("the"));
    EXPECT_FALSE(is_function_word("harbor"));
}

TEST(ScriptedAux, TemplateRoundTripForEveryRegister) {
    const std::vector<std::string> docs = {
        "Amber lanterns glow over quiet streets tonight. Nothing else moves.",
        "Engineers tested seven bridges during winter storms. Reports followed.",
        "Children painted murals across abandoned warehouse walls. The city noticed.",
    };
    for (const auto& r : reversal::catalog()) {
        std::vector<std::string> openings;
        for (const auto& d : docs) openings.push_back(corpus::first_sentence(launder(r.id, {}, d)));
        const auto tmpl = extract_common_template(openings);
        EXPECT_EQ(match_template(tmpl), r.id) << r.abbreviation << ": " << tmpl;
        const auto fixture = std::string(reversal::opening_template_fixture(r.id));
        EXPECT_EQ(match_template(fixture), r.id);
        EXPECT_TRUE(launder(r.id, {}, docs[0]).starts_with(rewrite_opening(r.id, fixture, corpus::first_sentence(docs[0]))))
            << r.abbreviation;
    }
}

TEST(ScriptedAux, CommonTemplateOfUnequalOpenings) {
    const std::vector<std::string> o = {"A b c d.", "A b x."};
    EXPECT_EQ(extract_common_template(o), "A b [...]");
    const std::vector<std::string> same = {"A red cat.", "A blue cat."};
    EXPECT_EQ(extract_common_template(same), "A [...] cat.");
}

TEST(ScriptedAux, InstructionProtocol) {
    const auto aux = make_scripted_aux();
    EXPECT_EQ(aux.kind(), gateway::BackendKind::ScriptedAux);
    const std::vector<std::string> name = {"Lyrical"};
    EXPECT_EQ(aux.instruct(reversal::standard_prompt_request(reversal::register_by_id(1)), name),
              reversal::standard_prompt_fixture(1));

    const std::string base(reversal::standard_prompt_fixture(1));
    const std::string doc = "Rain falls. The river bends past the mountain.";
    const auto with = launder(1, rules({"imagery"}), doc);
    const auto without = launder(1, {}, doc);
    const std::vector<std::string> edit = {base, without, with};
    EXPECT_EQ(aux.instruct(reversal::kEditInstruction, edit), laundering_prompt(1, rules({"imagery"})));
    const std::vector<std::string> nothing_new = {base, without, without};
    EXPECT_EQ(aux.instruct(reversal::kEditInstruction, nothing_new), base);

    const std::vector<std::string> history = {base, laundering_prompt(1, rules({"refrain"})),
                                              laundering_prompt(1, rules({"imagery"}))};
    EXPECT_EQ(aux.instruct(reversal::kDistillInstruction, history), laundering_prompt(1, rules({"imagery", "refrain"})));

    EXPECT_THROW(aux.instruct("Write a poem.", history), TransportError);
    EXPECT_THROW(aux.instruct(reversal::kEditInstruction, name), TransportError);
}
