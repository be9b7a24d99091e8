#include "laudit/prompt.hpp"

#include "laudit/errors.hpp"
#include "laudit/hashing.hpp"

namespace laudit {

std::string RewritePrompt::hash() const { return sha256_hex(text); }

RewritePrompt RewritePrompt::refine(std::string new_text) const {
    if (new_text.empty()) throw ValidationError("refined prompt text is empty");
    RewritePrompt child;
    child.text = std::move(new_text);
    child.register_id = register_id;
    child.generation = generation + 1;
    child.parent_hash = hash();
    return child;
}

}  // namespace laudit
