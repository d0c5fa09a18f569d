#pragma once

#include <nlohmann/json.hpp>

#include "lexbias/types.hpp"

// JSON encodings of the domain types. Writers emit ordered_json so field order
// is fixed; readers accept any key order and throw ValidationError with a
// message naming the offending field.
namespace lexbias::json {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// Canonical instance line:
// {"id","task_kind","word_key","segments":[{"text","start","end","surface"}],
//  "gold":{"binary":"T"|"F"}|{"candidate":id},"candidates"?:[...]}
OrderedJson to_json(const Instance& instance);
// Extra keys listed in `allowed_extra` are ignored; any other unknown key is
// an error.
Instance instance_from_json(const Json& j, std::initializer_list<std::string_view> allowed_extra = {});

OrderedJson gold_to_json(const Label& label);
Label gold_from_json(const Json& j);

// {"instance_id","system","variant","seed"?,"prediction","annotator"?,
//  "guessed_surface"?,"overlap"?}
OrderedJson to_json(const PredictionRecord& record);
PredictionRecord prediction_from_json(const Json& j);

OrderedJson to_json(const ScoreRun& run);
ScoreRun score_run_from_json(const Json& j);
OrderedJson to_json(const ScoreSummary& summary);
ScoreSummary score_summary_from_json(const Json& j);

OrderedJson to_json(const BiasReport& report);
BiasReport bias_report_from_json(const Json& j);

OrderedJson to_json(const EntropyReport& report);
EntropyReport entropy_report_from_json(const Json& j);

// Typed accessors used by the readers above.
const Json& field(const Json& j, std::string_view key);
std::string string_field(const Json& j, std::string_view key);
std::size_t count_field(const Json& j, std::string_view key);
double number_field(const Json& j, std::string_view key);

}  // namespace lexbias::json
