#pragma once

#include <map>
#include <string>
#include <vector>

namespace triad::llm {

/// A subtask prompt: fixed instruction, optional few-shot examples, optional
/// reasoning hint, and a variable-filled body. Placeholders are written
/// <name> and only declared names are substituted.
struct PromptTemplate {
    std::string id;
    std::string instruction;
    std::string shots_header;  // emitted only when shots are rendered
    std::vector<std::string> shots;
    std::string cot;  // empty by default
    std::string body;
    std::vector<std::string> variables;
};

/// The eight built-in subtask templates, keyed by id: triplet, template,
/// classify, entity-select, relation-select, query-select, answer-boolean,
/// answer-fact.
class PromptLibrary {
public:
    static PromptLibrary builtin();

    const PromptTemplate& get(const std::string& id) const;
    std::vector<std::string> ids() const;

    void put(PromptTemplate t);

private:
    std::map<std::string, PromptTemplate> templates_;
};

/// instruction + first n_shots examples + variable-filled body, in that
/// order, byte-deterministic. Throws MissingVariableError for a declared
/// variable absent from `vars` and Error when n_shots exceeds the shots.
std::string render_prompt(const PromptTemplate& t,
                          const std::map<std::string, std::string>& vars,
                          std::size_t n_shots);

}  // namespace triad::llm
