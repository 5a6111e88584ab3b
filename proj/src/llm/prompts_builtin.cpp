#include "triad/llm/prompt.hpp"

namespace triad::llm {

// Default prompt set for the seven pipeline subtasks (answering has a
// boolean and a single-fact variant). Shot lists exist only where the
// defaults ship examples; callers clamp their shot count to what a template
// actually carries.
PromptLibrary PromptLibrary::builtin() {
    PromptLibrary lib;

    lib.put(PromptTemplate{
        "triplet",
        "You are an assistant to identify triples within a provided sentence. "
        "Please adhere to the following guidelines:\n"
        "\n"
        "1. Triples should be structured in the format <entity1, relation, entity2>.\n"
        "2. The sentence must contain at least one triple, so you should provide at least one.\n"
        "3. Entities should represent the smallest semantic units and should not contain "
        "descriptive details.\n"
        "4. Entities can take the form of explicit or implicit references. Explicit entities "
        "refer to specific named resources, whereas implicit entities are less certain.\n"
        "5. When an entity is implicit, utilize a variable format such as '?variable' to denote "
        "it, for example, '?location' or '?person'.",
        "Here are some examples:",
        {
            "Which city's founder is John Forbes? : <?city, foundeer, John Forbes>",
            "How many races have the horses bred by Jacques Van't Hart participated in? : "
            "<?horse, participated in, ?race> <?horse, breeder, Jacques Van't Hart>",
            "Is camel of the chordate phylum? : <camel, phylum, chordate>",
        },
        "",
        "Sentence: <Question Sentence>\n"
        "Output:",
        {"Question Sentence"},
    });

    lib.put(PromptTemplate{
        "template",
        "You are an assistant to generate a SPARQL query to address a specific question. "
        "Here are the guidelines to follow:\n"
        "\n"
        "1. Ensure that the resulting SPARQL query is designed to answer the provided question.\n"
        "2. Adhere to the commonly accepted SPARQL standards when generating the query.\n"
        "3. Make an effort to leverage the information provided to assist in the creation of "
        "the SPARQL query.\n"
        "4. Strive to keep the generated SPARQL query as straightforward as possible.\n"
        "5. Avoid including 'PREFIX' or ':' in the SPARQL query.\n"
        "6. Enclose condition entities and predicates within angle brackets, such as <entity> "
        "or <predicate>.\n"
        "7. Maintain the original order of the given triples without altering their sequence.",
        "Here are some examples:",
        {},
        "",
        "Question: <question sentence>\n"
        "Triplets: <extracted triplets>\n"
        "Output:",
        {"question sentence", "extracted triplets"},
    });

    lib.put(PromptTemplate{
        "classify",
        "You are an assistant to determine the specific type of a given question according to "
        "the following guidelines:\n"
        "\n"
        "1. You must determine the most probable question type for the input question.\n"
        "2. The type of question should be enclosed within angle brackets, denoted as '<' "
        "and '>'.\n"
        "3. Possible question types include: <count>, <select>, and <yes or no>.",
        "Here are some examples:",
        {},
        "",
        "Question: <question sentence>\n"
        "Output:",
        {"question sentence"},
    });

    lib.put(PromptTemplate{
        "entity-select",
        "You are an assistant to select <K> URIs from a provided list of possible URIs for a "
        "specified entity, following these guidelines:\n"
        "\n"
        "1. Identify the <K> most appropriate URIs from the given list that best represent the "
        "entity in question.\n"
        "2. Seek to understand the semantic information associated with the specified entity by "
        "examining the provided question.\n"
        "3. The output should consist of <K> URIs chosen from the provided list of possible "
        "URIs.\n"
        "4. Simply output these <K> target URIs, each on a separate line, without providing any "
        "additional explanations.",
        "Here are some examples:",
        {},
        "",
        "Sentence: <question sentence>\n"
        "Entity: <entity mention>\n"
        "Possible entity URIs: <Entity URI list>\n"
        "Output:",
        {"K", "question sentence", "entity mention", "Entity URI list"},
    });

    lib.put(PromptTemplate{
        "relation-select",
        "You are an assistant tasked with selecting the <K> relation URIs between entities "
        "mentioned in a sentence. Here are the guidelines:\n"
        "\n"
        "1. The two entities are listed one after the other, without a specific order.\n"
        "2. Use the provided sentence to discern the semantic meaning of these entities.\n"
        "3. The potential relation URIs are listed one by one.\n"
        "4. Your output should consist of a maximum of <K> possible relation URIs, although you "
        "may also output fewer if appropriate.\n"
        "5. Ensure that your output is organized, prioritizing the most likely relationship "
        "first.\n"
        "6. Provide a list of no more than <K> relation URIs (each on a separate line if there "
        "are multiple) without any additional descriptions.",
        "Here are some examples:",
        {},
        "",
        "Sentence: <question sentence>\n"
        "Entities: <entity pair>\n"
        "Possible relation URIs: <URI list>\n"
        "Output:",
        {"K", "question sentence", "entity pair", "URI list"},
    });

    lib.put(PromptTemplate{
        "query-select",
        "You are an assistant to select an appropriate SPARQL query from the provided list in "
        "order to respond to a specific question. Please adhere to the following guidelines:\n"
        "\n"
        "1. Select the most suitable SPARQL query from the given query list to address the "
        "question.\n"
        "2. Select a SPARQL query solely from the provided list; avoid crafting your own SPARQL "
        "query.\n"
        "3. The selected SPARQL query must be applicable to answer the given question.",
        "Here are some examples:",
        {},
        "",
        "Sentence: <question sentence>\n"
        "SPARQL candidates: <SPARQLs to choose>\n"
        "Output:",
        {"question sentence", "SPARQLs to choose"},
    });

    lib.put(PromptTemplate{
        "answer-boolean",
        "You are an assistant to answer a yes-or-no question. Please adhere to the following "
        "guidelines:\n"
        "\n"
        "1. If you believe that the answer is yes, provide an output of 'True'. If not, provide "
        "an output of 'False'.\n"
        "2. Please do not include additional information or explanations in your response.",
        "Here are some examples:",
        {},
        "",
        "Sentence: <question sentence>\n"
        "Output:",
        {"question sentence"},
    });

    lib.put(PromptTemplate{
        "answer-fact",
        "You are an assistant to answer a question. Please adhere to the following guidelines:\n"
        "\n"
        "1. The answer to the question is a single entity.\n"
        "2. You should just output the full expression of the answer without any punctuation.\n"
        "3. Do not output any other description.",
        "Here are some examples:",
        {},
        "",
        "Sentence: <question sentence>\n"
        "Output:",
        {"question sentence"},
    });

    return lib;
}

}  // namespace triad::llm
