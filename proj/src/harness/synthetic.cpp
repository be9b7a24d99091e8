#include "laudit/harness/synthetic.hpp"

#include "laudit/errors.hpp"
#include "laudit/rng.hpp"
#include "laudit/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <string_view>

namespace laudit::harness {

namespace {

using Pool = std::vector<std::string_view>;

const Pool kFirst = {"Aldric", "Berna", "Corwin", "Delia", "Emeric", "Fenna", "Garrick", "Hesper",
                     "Ilsa",   "Jorund", "Kestra", "Lucan", "Maren", "Nils", "Odile", "Perrin",
                     "Quilla", "Roswin", "Sabine", "Tobiah", "Ulla", "Vesna", "Wendel", "Ysolde"};
const Pool kLast = {"Ashdown", "Brightwater", "Calloway", "Dunmore", "Ellery", "Fairholm", "Greystone", "Harrow",
                    "Ingleby", "Jessup", "Kingsley", "Larkin", "Merriweather", "Northcott", "Oakhurst", "Pemberton",
                    "Quarry", "Redfern", "Stanhope", "Thornbury", "Underhill", "Vance", "Whitlock", "Yarrow"};
const Pool kPlace = {"Marlow", "Eastmere", "Thornfield", "Ravensholt", "Brackwater", "Silverdale", "Cindermoor",
                     "Wyndham", "Greywick", "Oldcastle", "Pennington", "Rooksby", "Stillwater", "Harwick",
                     "Dunmere", "Kettering", "Lowestead", "Ambleford"};
const Pool kProfession = {"painter", "engineer", "botanist", "composer", "architect", "cartographer",
                          "historian", "astronomer", "sculptor", "physician", "poet", "merchant",
                          "surveyor", "chemist", "teacher", "weaver"};
const Pool kField = {"botany", "music", "architecture", "astronomy", "medicine", "history",
                     "chemistry", "sculpture", "cartography", "poetry", "weaving", "trade"};
const Pool kInstitution = {"academy", "guild", "museum", "university", "observatory", "library", "society", "college"};
const Pool kWork = {"treatise", "map", "symphony", "portrait", "survey", "catalogue", "journal", "atlas", "ledger", "sketchbook"};
const Pool kWorks = {"papers", "drawings", "letters", "notebooks", "maps", "sketches", "manuscripts", "instruments"};
const Pool kAdj = {"notable", "early", "influential", "modest", "careful", "prominent",
                   "detailed", "lasting", "regional", "practical", "respected", "patient"};
const Pool kNumber = {"two", "three", "four", "five", "six"};
const Pool kVisual = {"river", "mountain", "garden", "tower", "forest", "lake",
                      "bridge", "valley", "harbor", "meadow", "cliff", "orchard"};

struct Person {
    std::string first, last, place, profession, field, pron, poss, obj;
};

class Writer {
public:
    Writer(StableRng& rng, const Person& p) : rng_(rng), p_(p) {}

    std::string pick(const Pool& pool) { return std::string(pool[rng_.below(pool.size())]); }
    std::string year() { return std::to_string(1760 + rng_.below(160)); }
    std::string other() { return pick(kFirst) + " " + pick(kLast); }
    std::string pron_cap() { return capitalize(p_.pron); }
    std::string poss_cap() { return capitalize(p_.poss); }

    static std::string capitalize(std::string s) {
        if (!s.empty()) s[0] = static_cast<char>(s[0] - 'a' + 'A');
        return s;
    }

private:
    StableRng& rng_;
    const Person& p_;
};

using Template = std::string (*)(Writer&, const Person&);

// clang-format off
const std::vector<Template> kOpenings = {
    [](Writer& w, const Person& p) { return p.first + " " + p.last + " was a " + w.pick(kAdj) + " " + p.profession + " born in " + p.place + " in " + w.year() + "."; },
    [](Writer&, const Person& p) { return p.first + " " + p.last + " was a " + p.profession + " who worked in " + p.place + " for most of " + p.poss + " life."; },
    [](Writer&, const Person& p) { return p.first + " " + p.last + " was an " + "English " + p.profession + " known for " + p.poss + " work in " + p.field + "."; },
    [](Writer& w, const Person& p) { return p.first + " " + p.last + " was a " + p.profession + " and writer from " + p.place + " who was active after " + w.year() + "."; },
};

const std::vector<Template> kBody = {
    [](Writer& w, const Person& p) { return w.pron_cap() + " studied " + p.field + " at the " + w.pick(kInstitution) + " of " + w.pick(kPlace) + "."; },
    [](Writer& w, const Person& p) { return "In " + w.year() + ", " + p.last + " moved to " + w.pick(kPlace) + " to work with " + w.other() + "."; },
    [](Writer& w, const Person&) { return w.pron_cap() + " was elected to the " + w.pick(kInstitution) + " in " + w.year() + "."; },
    [](Writer& w, const Person& p) { return p.last + " married " + w.other() + " in " + w.year() + ", and they had " + w.pick(kNumber) + " children."; },
    [](Writer& w, const Person& p) { return "Critics described " + p.poss + " " + w.pick(kWork) + " as " + w.pick(kAdj) + " and " + w.pick(kAdj) + "."; },
    [](Writer& w, const Person&) { return w.poss_cap() + " " + w.pick(kWorks) + " are held by the " + w.pick(kInstitution) + " of " + w.pick(kPlace) + "."; },
    [](Writer& w, const Person& p) { return "After " + w.year() + ", " + p.pron + " taught " + p.field + " to students from " + w.pick(kPlace) + "."; },
    [](Writer& w, const Person& p) { return p.last + " died in " + w.pick(kPlace) + " in " + w.year() + "."; },
    [](Writer& w, const Person& p) { return "A " + w.pick(kAdj) + " account of " + p.poss + " life was published in " + w.year() + "."; },
    [](Writer& w, const Person&) { return w.pron_cap() + " corresponded with " + w.other() + " about " + w.pick(kField) + "."; },
    [](Writer& w, const Person& p) { return "The " + w.pick(kInstitution) + " awarded " + p.obj + " a " + w.pick(kAdj) + " prize in " + w.year() + "."; },
    [](Writer& w, const Person&) { return w.poss_cap() + " first " + w.pick(kWork) + " was completed in " + w.year() + " with help from " + w.other() + "."; },
    [](Writer& w, const Person& p) { return "Many of " + p.poss + " " + w.pick(kWorks) + " were lost in a fire in " + w.year() + "."; },
    [](Writer& w, const Person& p) { return p.last + " travelled to " + w.pick(kPlace) + " and " + w.pick(kPlace) + " to study " + w.pick(kField) + "."; },
    [](Writer& w, const Person&) { return w.pron_cap() + " was a member of the " + w.pick(kInstitution) + " for " + w.pick(kNumber) + " years."; },
};

const std::vector<Template> kVisualBody = {
    [](Writer& w, const Person&) { return w.poss_cap() + " best known " + w.pick(kWork) + " shows the " + w.pick(kVisual) + " near " + w.pick(kPlace) + "."; },
    [](Writer& w, const Person& p) { return p.last + " spent many years near the " + w.pick(kVisual) + " of " + p.place + ", where " + p.pron + " kept a small " + w.pick(kWork) + "."; },
    [](Writer& w, const Person& p) { return "The " + w.pick(kVisual) + " at " + w.pick(kPlace) + " appears in several of " + p.poss + " " + w.pick(kWorks) + "."; },
    [](Writer& w, const Person&) { return w.pron_cap() + " often walked by the " + w.pick(kVisual) + " and the " + w.pick(kVisual) + " before dawn."; },
    [](Writer& w, const Person& p) { return "A " + w.pick(kAdj) + " " + w.pick(kVisual) + " in " + w.pick(kPlace) + " was named after " + p.obj + " in " + w.year() + "."; },
};
// clang-format on

std::string make_document(StableRng& rng, const SyntheticOptions& opts, bool visual) {
    Person p;
    p.first = std::string(kFirst[rng.below(kFirst.size())]);
    p.last = std::string(kLast[rng.below(kLast.size())]);
    p.place = std::string(kPlace[rng.below(kPlace.size())]);
    p.profession = std::string(kProfession[rng.below(kProfession.size())]);
    p.field = std::string(kField[rng.below(kField.size())]);
    const bool she = rng.below(2) == 0;
    p.pron = she ? "she" : "he";
    p.poss = she ? "her" : "his";
    p.obj = she ? "her" : "him";

    Writer w(rng, p);
    std::string text = kOpenings[rng.below(kOpenings.size())](w, p);

    const std::size_t span = opts.max_body_sentences - opts.min_body_sentences + 1;
    const std::size_t body = opts.min_body_sentences + rng.below(span);
    std::vector<std::size_t> order(kBody.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) std::swap(order[i], order[i + rng.below(order.size() - i)]);

    std::vector<std::string> sentences;
    for (std::size_t i = 0; i < body; ++i) sentences.push_back(kBody[order[i % order.size()]](w, p));
    if (visual) {
        // One or two landscape sentences; the first opens the body.
        const std::size_t k = 1 + rng.below(2);
        for (std::size_t j = 0; j < k; ++j) {
            auto s = kVisualBody[rng.below(kVisualBody.size())](w, p);
            const auto pos = j == 0 ? 0 : rng.below(sentences.size() + 1);
            sentences.insert(sentences.begin() + static_cast<std::ptrdiff_t>(pos), std::move(s));
        }
    }
    for (const auto& s : sentences) text += " " + s;
    return text;
}

}  // namespace

const std::vector<std::string>& visual_nouns() {
    static const std::vector<std::string> v(kVisual.begin(), kVisual.end());
    return v;
}

bool has_visual_noun(std::string_view text) {
    const auto& nouns = visual_nouns();
    for (const auto& tok : gateway::tokenize(text)) {
        if (std::find(nouns.begin(), nouns.end(), tok) != nouns.end()) return true;
    }
    return false;
}

std::vector<corpus::TextSample> generate_corpus(const SyntheticOptions& opts) {
    if (opts.min_body_sentences == 0 || opts.max_body_sentences < opts.min_body_sentences) {
        throw ValidationError("invalid body sentence range");
    }
    if (!(opts.visual_fraction >= 0.0 && opts.visual_fraction <= 1.0)) throw ValidationError("visual_fraction must lie in [0, 1]");
    StableRng rng(mix64(opts.seed, fnv1a(opts.id_prefix)));
    std::set<std::string> seen;
    std::vector<corpus::TextSample> out;
    out.reserve(opts.count);
    std::size_t attempts = 0;
    while (out.size() < opts.count) {
        if (++attempts > opts.count * 20 + 100) throw SizeError("could not generate enough distinct documents");
        const bool visual = rng.uniform() < opts.visual_fraction;
        auto text = make_document(rng, opts, visual);
        if (!seen.insert(text).second) continue;
        std::string num = std::to_string(out.size());
        if (num.size() < 5) num.insert(0, 5 - num.size(), '0');
        out.push_back(corpus::make_sample(opts.id_prefix + "-" + num, text, opts.source_tag));
    }
    return out;
}

}  // namespace laudit::harness
