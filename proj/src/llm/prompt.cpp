#include "triad/llm/prompt.hpp"

#include "triad/errors.hpp"

namespace triad::llm {

const PromptTemplate& PromptLibrary::get(const std::string& id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) throw Error("unknown prompt template id: " + id);
    return it->second;
}

std::vector<std::string> PromptLibrary::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, t] : templates_) out.push_back(id);
    return out;
}

void PromptLibrary::put(PromptTemplate t) { templates_[t.id] = std::move(t); }

namespace {

void replace_all(std::string& text, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
}

}  // namespace

std::string render_prompt(const PromptTemplate& t,
                          const std::map<std::string, std::string>& vars,
                          std::size_t n_shots) {
    if (n_shots > t.shots.size())
        throw Error("template '" + t.id + "' has " + std::to_string(t.shots.size()) +
                    " shots, " + std::to_string(n_shots) + " requested");

    std::string out = t.instruction;
    out += "\n\n";
    if (n_shots > 0) {
        if (!t.shots_header.empty()) out += t.shots_header + "\n";
        for (std::size_t i = 0; i < n_shots; ++i) out += t.shots[i] + "\n";
        out += "\n";
    }
    if (!t.cot.empty()) out += t.cot + "\n\n";
    out += t.body;

    for (const auto& name : t.variables) {
        auto it = vars.find(name);
        if (it == vars.end()) throw MissingVariableError(name);
        replace_all(out, "<" + name + ">", it->second);
    }
    return out;
}

}  // namespace triad::llm
