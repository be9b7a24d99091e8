#include "laudit/registers.hpp"

#include "laudit/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace laudit::reversal {

namespace {

struct Fixture {
    const char* name;
    const char* abbreviation;
    const char* standard_prompt;
    const char* opening_template;
};

// clang-format off
const std::array<Fixture, 23> kFixtures = {{
    {"Lyrical", "ly",
     "Rewrite the text in a lyrical style, ensuring the imagery is vivid, the rhythm flows naturally.",
     "In the heart of [abstract domain], a tale unfolds, where [abstract concept], [abstract detail], [abstract entity], [abstract action]."},
    {"Encyclopedia article", "en",
     "Rewrite the text in the style of an encyclopedia entry, maintaining a neutral, authoritative tone, and include at least one date, fact, or reference to give it the appearance of being sourced.",
     "[Subject] is a [type/category] that [provides a description or function], [additional information if applicable]."},
    {"Spoken", "sp",
     "Rewrite the text in a spoken style, making it sound natural and conversational, and ensure the tone feels engaging and easy to follow for a live audience.",
     "So, let’s talk about [TOPIC]."},
    {"Research article", "ra",
     "Rewrite the text as an academic research article, structured with sections such as Abstract, Introduction, Method, Results, and Conclusion, and include at least one in-text citation (invented if necessary) to simulate scholarly referencing.",
     "This article explores the significance of [subject or topic], a [description or classification], characterized by [notable features or contributions]."},
    {"Interview", "it",
     "Rewrite the text in the form of an interview, ensuring the questions flow naturally and the answers provide clear, engaging explanations for the audience.",
     "Interviewer: Thank you for joining us, [Person/Expert Title]. Can you tell us about [Subject/Topic]?"},
    {"Description of a thing or person", "dtp",
     "Rewrite the text as a descriptive profile of a specific thing or person, using vivid details and attributes (appearance, characteristics, or context) and ending with a short summary sentence that highlights its significance.",
     "Introducing [Subject/Entity], a [descriptor] [type/category] [context/detail] renowned for its [property/characteristic]."},
    {"Interactive discussion", "id",
     "Rewrite the text as an interactive discussion between two or more participants, ensuring the conversation flows logically, with each speaker’s tone and style clearly distinguishable.",
     "[Participant 1]: So, have you guys heard about [Topic/Subject]? I recently came across some interesting information about it."},
    {"FAQ", "fi",
     "Rewrite the text in the form of a Frequently Asked Questions (FAQ) section, making sure to include at least three question--answer pairs, with the questions phrased from the perspective of a curious reader.",
     "What is [Subject]? — [Subject] is a [general category or description] [specific type or detail] [additional information]."},
    {"Narrative", "na",
     "Rewrite the text as a storytelling narrative. The story should flow naturally, use simple and engaging language, and be easy for all kinds of listeners to follow.",
     "Once upon a time, in a [adjective] [type of place] called [place name], there lived a [adjective] [type of character] named [character name]."},
    {"Legal terms & conditions", "lt",
     "Rewrite the text as legal terms and conditions, using formal legal language, and ensure at least one numbered clause is included for clarity.",
     "Terms and Conditions Regarding [Subject/Theme]."},
    {"News report", "ne",
     "Rewrite the text in the style of a news report, ensuring the information is presented objectively and concisely.",
     "[Event/Topic]: [Description/Significance] [Location/Context] – [Details about the subject, including noteworthy contributions, roles, or milestones]."},
    {"Opinion", "op",
     "Rewrite the text as a personal opinion piece, written in the first person, making sure to clearly express a stance and support it with at least one reason or example.",
     "In my view, [Subject/Entity] represents [significance/impact/legacy] in [field/area], and its influence on [audience/community/context] cannot be overstated."},
    {"Sports report", "sr",
     "Rewrite the text as a sports report, ensuring the action is described with dynamic, energetic language that conveys the pace, tension, and excitement of the event.",
     "In a thrilling [event/display/action], [subject/actor] has [verb] [description/impact] in [field/area/genre]."},
    {"Review", "rv",
     "Rewrite the text as a review, giving it a clear positive or negative stance, and include at least one specific detail or example to justify the evaluation.",
     "[Subject] is a [descriptor] that [verb phrase] [contextual information]."},
    {"Narrative blog", "nb",
     "Rewrite the text as a narrative blog post, organized into clear sections with subheadings. Use a tone that is engaging and reflective, blending storytelling with explanation.",
     "In the context of [broad category or field], [subject or specific work] has made a significant impact, often leading to [general observation or effect]."},
    {"Opinion blog", "ob",
     "Rewrite the text as an opinion blog post, written in a conversational and persuasive tone, and include at least one personal anecdote or illustrative example to strengthen the argument.",
     "When we think of [general category or field], [a notable example or subject] often comes to mind."},
    {"How-to or instructions", "hi",
     "Rewrite the text as a step-by-step instructional guide. Break the content into numbered steps, with each step beginning with a clear imperative verb.",
     "Step-by-Step Guide to Understanding [Subject] — Step 1: [Initial focus or background]. Learn that [Subject Description]."},
    {"Denominational religious blog or sermon", "rs",
     "Rewrite the text as a denominational religious sermon, using a reverent and exhortative tone, and include at least one scriptural quotation or moral teaching to guide the audience toward reflection or action.",
     "Beloved congregation, today we gather to reflect upon [individual/concept] that illuminates our lives and encourages us to contemplate our shared journey."},
    {"Recipe", "re",
     "Rewrite the text as a recipe, introduce the information as sequential steps.",
     "Recipe for [General Concept]: [Specific Edition/Style] — Ingredients: [Variable 1], [Variable 2], [Variable 3]..."},
    {"Description with intent to sell", "ds",
     "Rewrite the text as a sales description, and be sure to include a clear call-to-action at the end.",
     "Introducing [Subject]: a [descriptor] [product/service] designed for [use case]; discover how it [benefit/outcome] for [target user]."},
    {"Informational persuasion", "ip",
     "Rewrite the text to persuade the reader through factual information, making sure to include at least three specific data points or statistics to support the argument.",
     "In the context of [domain or field], few [types/categories] resonate as profoundly within [subfields] as [specific work/name/entity]."},
    {"Informational description", "in",
     "Rewrite the text as an informational description, ensuring the tone is neutral and objective, and include at least one definition or clarification to help the reader better understand the subject.",
     "[Entity/Subject] is a [description] in the field of [broader category], specifically within [subcategory/locale]."},
    {"News & opinion blog or editorial", "ed",
     "Rewrite the text in the style of an editorial, making sure to include a clear stance or opinion and a concluding paragraph that calls for action or reflection.",
     "When we think of [general category or field], [notable subject] often comes to mind — situating today’s discussion of [topic] within [context]."},
}};
// clang-format on

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

const Fixture& fixture(int id) {
    if (id < 1 || id > static_cast<int>(kFixtures.size())) {
        throw ValidationError("register id " + std::to_string(id) + " outside 1..23");
    }
    return kFixtures[static_cast<std::size_t>(id - 1)];
}

}  // namespace

const std::vector<Register>& catalog() {
    static const std::vector<Register> regs = [] {
        std::vector<Register> v;
        for (std::size_t i = 0; i < kFixtures.size(); ++i) {
            v.push_back({static_cast<int>(i + 1), kFixtures[i].name, kFixtures[i].abbreviation});
        }
        return v;
    }();
    return regs;
}

const Register& register_by_id(int id) {
    fixture(id);
    return catalog()[static_cast<std::size_t>(id - 1)];
}

const Register* find_register(std::string_view key) {
    const std::string k = lower(key);
    for (const auto& r : catalog()) {
        if (lower(r.name) == k || r.abbreviation == k) return &r;
    }
    return nullptr;
}

std::string_view standard_prompt_fixture(int register_id) { return fixture(register_id).standard_prompt; }

std::string_view opening_template_fixture(int register_id) { return fixture(register_id).opening_template; }

bool has_placeholder(std::string_view text) {
    const auto open = text.find('[');
    return open != std::string_view::npos && text.find(']', open + 1) != std::string_view::npos;
}

std::string normalize_placeholders(std::string_view text) {
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '[') {
            const auto close = text.find(']', i + 1);
            if (close != std::string_view::npos) {
                out += "[...]";
                i = close + 1;
                continue;
            }
        }
        out += text[i++];
    }
    return out;
}

void OpeningTemplate::validate() const {
    if (text.empty()) throw ValidationError("opening template is empty");
    if (!has_placeholder(text)) throw ValidationError("opening template has no [...] placeholder: " + text);
}

}  // namespace laudit::reversal
