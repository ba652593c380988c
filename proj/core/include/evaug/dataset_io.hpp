#pragma once

#include <string>
#include <vector>

#include "evaug/schema.hpp"

namespace evaug {

/// Schema file: JSON object
///   {"event_types": {name: {"roles": [...], "template": str,
///                           "multi_valued_roles": [...]}}}
EventSchema load_schema(const std::string& path);
EventSchema parse_schema_json(const std::string& json_text,
                              const std::string& origin = "<schema>");

/// Dataset file: JSONL, one sentence object per line
///   {"id": str, "context": str, "records": [{"event_type": str,
///    "trigger": {"text": str, "start": int, "end": int},
///    "arguments": [{"role": str, "text": str, "start": int, "end": int}]}]}
///
/// Throws with the line number on parse errors and with the sentence id on
/// span or schema violations. Duplicate ids are rejected.
Dataset load_dataset(const std::string& path, const EventSchema& schema);
Dataset parse_dataset_jsonl(const std::string& jsonl_text,
                            const EventSchema& schema,
                            const std::string& origin = "<dataset>");

/// Lenient variant for scoring tools: spans must still match the context,
/// but no schema is consulted. Sentences keep file order.
std::vector<AnnotatedSentence> load_sentences_jsonl(const std::string& path);

std::string sentence_to_json_line(const AnnotatedSentence& sentence);
std::string serialize_dataset(const Dataset& dataset);
void save_dataset(const Dataset& dataset, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Plain-text corpus: one sentence per line, blank lines skipped.
std::vector<std::string> load_text_lines(const std::string& path);

}  // namespace evaug
