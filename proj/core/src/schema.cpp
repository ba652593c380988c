#include "evaug/schema.hpp"

#include <algorithm>
#include <set>

#include "evaug/error.hpp"

namespace evaug {

std::vector<std::string> template_slots(const std::string& template_text) {
  std::vector<std::string> slots;
  std::size_t pos = 0;
  while (pos < template_text.size()) {
    std::size_t open = template_text.find('<', pos);
    if (open == std::string::npos) break;
    std::size_t close = template_text.find('>', open + 1);
    if (close == std::string::npos) break;
    slots.push_back(template_text.substr(open + 1, close - open - 1));
    pos = close + 1;
  }
  return slots;
}

EventSchema::EventSchema(std::map<std::string, EventTypeDef> types)
    : types_(std::move(types)) {
  for (const auto& [name, def] : types_) {
    std::set<std::string> seen;
    for (const auto& role : def.roles) {
      if (!seen.insert(role).second) {
        throw Error("schema: event type '" + name + "' repeats role '" + role +
                    "'");
      }
    }
    for (const auto& role : def.multi_valued_roles) {
      if (!seen.count(role)) {
        throw Error("schema: event type '" + name +
                    "' marks unknown role multi-valued: '" + role + "'");
      }
    }
    std::map<std::string, int> slot_count;
    for (const auto& slot : template_slots(def.template_text)) {
      ++slot_count[slot];
      if (slot != "trigger" && !seen.count(slot)) {
        throw Error("schema: template for '" + name +
                    "' references unknown slot '" + slot + "'");
      }
    }
    if (slot_count["trigger"] != 1) {
      throw Error("schema: template for '" + name +
                  "' must contain exactly one <trigger> slot");
    }
    for (const auto& role : def.roles) {
      if (slot_count[role] != 1) {
        throw Error("schema: template for '" + name +
                    "' must contain exactly one slot for role '" + role + "'");
      }
    }
  }
}

bool EventSchema::has_type(const std::string& event_type) const {
  return types_.count(event_type) != 0;
}

const EventTypeDef& EventSchema::type(const std::string& event_type) const {
  auto it = types_.find(event_type);
  if (it == types_.end()) {
    throw Error("schema: unknown event type '" + event_type + "'");
  }
  return it->second;
}

std::vector<std::string> EventSchema::type_names() const {
  std::vector<std::string> names;
  names.reserve(types_.size());
  for (const auto& [name, def] : types_) names.push_back(name);
  return names;
}

bool EventSchema::role_is_multi_valued(const std::string& event_type,
                                       const std::string& role) const {
  auto it = types_.find(event_type);
  return it != types_.end() && it->second.multi_valued_roles.count(role) != 0;
}

namespace {

void check_span(const Span& span, const std::string& context,
                const std::string& what, std::vector<std::string>& out) {
  if (span.start >= span.end) {
    out.push_back(what + ": span end " + std::to_string(span.end) +
                  " must exceed start " + std::to_string(span.start));
    return;
  }
  if (span.end > context.size()) {
    out.push_back(what + ": span [" + std::to_string(span.start) + "," +
                  std::to_string(span.end) + ") exceeds context length " +
                  std::to_string(context.size()));
    return;
  }
  if (context.compare(span.start, span.end - span.start, span.text) != 0) {
    out.push_back(what + ": span text '" + span.text +
                  "' does not match context slice '" +
                  context.substr(span.start, span.end - span.start) + "'");
  }
}

}  // namespace

std::vector<std::string> validate_record(const EventRecord& record,
                                         const std::string& context,
                                         const EventSchema& schema) {
  std::vector<std::string> violations;

  const bool known_type = schema.has_type(record.event_type);
  if (!known_type) {
    violations.push_back("unknown event type '" + record.event_type + "'");
  }
  if (record.trigger.text.empty()) {
    violations.push_back("trigger text is empty");
  }
  check_span(record.trigger, context, "trigger", violations);

  std::map<std::string, int> role_uses;
  for (const auto& [role, span] : record.arguments) {
    if (known_type) {
      const auto& roles = schema.type(record.event_type).roles;
      if (std::find(roles.begin(), roles.end(), role) == roles.end()) {
        violations.push_back("role '" + role + "' not defined for type '" +
                             record.event_type + "'");
      } else if (++role_uses[role] > 1 &&
                 !schema.role_is_multi_valued(record.event_type, role)) {
        violations.push_back("role '" + role +
                             "' repeats but is single-valued");
      }
    }
    check_span(span, context, "argument '" + role + "'", violations);
  }
  return violations;
}

}  // namespace evaug
