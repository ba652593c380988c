#include "evaug/dataset_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "evaug/error.hpp"
#include "evaug/text.hpp"

namespace evaug {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

std::vector<std::string> load_text_lines(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

EventSchema parse_schema_json(const std::string& json_text,
                              const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(origin + ": schema parse error: " + e.what());
  }
  if (!root.is_object() || !root.contains("event_types")) {
    throw Error(origin + ": schema must be an object with 'event_types'");
  }
  std::map<std::string, EventTypeDef> types;
  for (const auto& [name, body] : root.at("event_types").items()) {
    EventTypeDef def;
    def.roles = body.at("roles").get<std::vector<std::string>>();
    def.template_text = body.at("template").get<std::string>();
    if (body.contains("multi_valued_roles")) {
      for (const auto& r : body.at("multi_valued_roles")) {
        def.multi_valued_roles.insert(r.get<std::string>());
      }
    }
    types.emplace(name, std::move(def));
  }
  return EventSchema(std::move(types));
}

EventSchema load_schema(const std::string& path) {
  return parse_schema_json(read_text_file(path), path);
}

namespace {

Span span_from_json(const json& j) {
  Span s;
  s.text = j.at("text").get<std::string>();
  s.start = j.at("start").get<std::size_t>();
  s.end = j.at("end").get<std::size_t>();
  return s;
}

json span_to_json(const Span& s) {
  return json{{"text", s.text}, {"start", s.start}, {"end", s.end}};
}

AnnotatedSentence sentence_from_json(const json& j) {
  AnnotatedSentence s;
  s.id = j.at("id").get<std::string>();
  s.context = j.at("context").get<std::string>();
  for (const auto& rec : j.value("records", json::array())) {
    EventRecord r;
    r.event_type = rec.at("event_type").get<std::string>();
    r.trigger = span_from_json(rec.at("trigger"));
    for (const auto& arg : rec.value("arguments", json::array())) {
      r.arguments.emplace_back(arg.at("role").get<std::string>(),
                               span_from_json(arg));
    }
    s.records.push_back(std::move(r));
  }
  return s;
}

json sentence_to_json(const AnnotatedSentence& s) {
  json records = json::array();
  for (const auto& r : s.records) {
    json args = json::array();
    for (const auto& [role, span] : r.arguments) {
      json a = span_to_json(span);
      a["role"] = role;
      args.push_back(std::move(a));
    }
    records.push_back(json{{"event_type", r.event_type},
                           {"trigger", span_to_json(r.trigger)},
                           {"arguments", std::move(args)}});
  }
  return json{{"id", s.id}, {"context", s.context}, {"records", records}};
}

void check_basic_spans(const AnnotatedSentence& s, const std::string& where) {
  for (const auto& r : s.records) {
    auto check = [&](const Span& span, const std::string& what) {
      if (span.start >= span.end || span.end > s.context.size() ||
          s.context.compare(span.start, span.end - span.start, span.text) !=
              0) {
        throw Error(where + ": sentence '" + s.id + "': " + what +
                    " span does not match context slice");
      }
    };
    check(r.trigger, "trigger");
    for (const auto& [role, span] : r.arguments) {
      check(span, "argument '" + role + "'");
    }
  }
}

}  // namespace

Dataset parse_dataset_jsonl(const std::string& jsonl_text,
                            const EventSchema& schema,
                            const std::string& origin) {
  Dataset dataset;
  dataset.schema = schema;
  std::istringstream in(jsonl_text);
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> seen_ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(origin + ": line " + std::to_string(line_no) +
                  ": parse error: " + e.what());
    }
    AnnotatedSentence s;
    try {
      s = sentence_from_json(j);
    } catch (const json::exception& e) {
      throw Error(origin + ": line " + std::to_string(line_no) +
                  ": malformed sentence object: " + e.what());
    }
    if (!seen_ids.insert(s.id).second) {
      throw Error(origin + ": line " + std::to_string(line_no) +
                  ": duplicate sentence id '" + s.id + "'");
    }
    for (const auto& r : s.records) {
      auto violations = validate_record(r, s.context, schema);
      if (!violations.empty()) {
        throw Error(origin + ": line " + std::to_string(line_no) +
                    ": sentence '" + s.id + "': " + violations.front());
      }
    }
    dataset.sentences.push_back(std::move(s));
  }
  return dataset;
}

Dataset load_dataset(const std::string& path, const EventSchema& schema) {
  return parse_dataset_jsonl(read_text_file(path), schema, path);
}

std::vector<AnnotatedSentence> load_sentences_jsonl(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<AnnotatedSentence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(path + ": line " + std::to_string(line_no) +
                  ": parse error: " + e.what());
    }
    AnnotatedSentence s;
    try {
      s = sentence_from_json(j);
    } catch (const json::exception& e) {
      throw Error(path + ": line " + std::to_string(line_no) +
                  ": malformed sentence object: " + e.what());
    }
    check_basic_spans(s, path);
    out.push_back(std::move(s));
  }
  return out;
}

std::string sentence_to_json_line(const AnnotatedSentence& sentence) {
  return sentence_to_json(sentence).dump();
}

std::string serialize_dataset(const Dataset& dataset) {
  std::string out;
  for (const auto& s : dataset.sentences) {
    out += sentence_to_json_line(s);
    out += '\n';
  }
  return out;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  write_text_file(path, serialize_dataset(dataset));
}

}  // namespace evaug
