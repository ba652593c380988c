#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace evaug {

/// Character span into a sentence context. `text` must equal
/// context[start:end]; offsets are characters, not token indices, because
/// predicted spans are recovered by string matching in the context.
struct Span {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
};

/// One typed event: a trigger span plus (role, argument span) pairs.
struct EventRecord {
  std::string event_type;
  Span trigger;
  std::vector<std::pair<std::string, Span>> arguments;

  bool operator==(const EventRecord&) const = default;
};

struct EventTypeDef {
  /// Role order here fixes the clause order in rendered event descriptions.
  std::vector<std::string> roles;
  /// Template with exactly one "<trigger>" slot and one "<Role>" slot per role.
  std::string template_text;
  /// Roles allowed to carry more than one argument per record.
  std::set<std::string> multi_valued_roles;

  bool operator==(const EventTypeDef&) const = default;
};

/// Event-type inventory, per-type role lists, and per-type prompt templates.
/// Immutable after construction; safe to share across threads.
class EventSchema {
 public:
  EventSchema() = default;

  /// Validates the definitions: unique type names come for free from the map,
  /// role lists must not repeat, and every slot referenced by a template must
  /// be <trigger> or a declared role (each exactly once).
  explicit EventSchema(std::map<std::string, EventTypeDef> types);

  bool has_type(const std::string& event_type) const;
  const EventTypeDef& type(const std::string& event_type) const;
  const std::map<std::string, EventTypeDef>& types() const { return types_; }
  std::vector<std::string> type_names() const;

  bool role_is_multi_valued(const std::string& event_type,
                            const std::string& role) const;

  bool operator==(const EventSchema&) const = default;

 private:
  std::map<std::string, EventTypeDef> types_;
};

/// One annotated sentence: the raw context plus its event records.
struct AnnotatedSentence {
  std::string id;
  std::string context;
  std::vector<EventRecord> records;

  bool operator==(const AnnotatedSentence&) const = default;
};

struct Dataset {
  EventSchema schema;
  std::vector<AnnotatedSentence> sentences;

  bool operator==(const Dataset&) const = default;
};

/// Violation descriptions for every record invariant that fails against the
/// given context. Empty means the record is well-formed. Violations are data,
/// not errors; loaders decide whether to throw.
std::vector<std::string> validate_record(const EventRecord& record,
                                         const std::string& context,
                                         const EventSchema& schema);

/// All slots of a template in appearance order ("trigger" or a role name).
std::vector<std::string> template_slots(const std::string& template_text);

}  // namespace evaug
