#include "evaug/prompts.hpp"

#include <algorithm>
#include <limits>

#include "evaug/error.hpp"

namespace evaug {

ExtractionInput build_extraction_input(const EventSchema& schema,
                                       const std::string& event_type,
                                       const std::string& context) {
  const EventTypeDef& def = schema.type(event_type);  // throws when unknown
  if (context.empty()) {
    throw Error("build_extraction_input: empty context for type '" +
                event_type + "'");
  }
  ExtractionInput out;
  out.event_type = event_type;
  out.context = context;
  out.prompt = "Event type is " + event_type + " . " + def.template_text;
  out.rendered = out.prompt + " " + kSepToken + " " + context;
  return out;
}

std::string render_event_description(const EventSchema& schema,
                                     const std::vector<EventRecord>& records) {
  if (records.empty()) {
    throw Error("render_event_description: no records to render");
  }
  std::vector<std::string> clauses;
  for (const auto& record : records) {
    clauses.push_back(record.trigger.text + " is the trigger of the " +
                      record.event_type + " event .");
    const auto& roles = schema.type(record.event_type).roles;
    for (const auto& role : roles) {
      for (const auto& [arg_role, span] : record.arguments) {
        if (arg_role == role) {
          clauses.push_back(span.text + " is the " + role + " .");
        }
      }
    }
  }
  return join(clauses, " ");
}

std::string render_relation_description(
    const std::vector<RelationAnnotation>& relations) {
  std::vector<std::string> clauses;
  for (const auto& rel : relations) {
    clauses.push_back(rel.subject + " has relation " + rel.relation + " with " +
                      rel.object + " .");
  }
  return join(clauses, " ");
}

MaskResult mask_context(const std::string& context,
                        const std::vector<EventRecord>& records, double rate,
                        Rng& rng, bool protect_event_tokens) {
  if (rate < 0.0 || rate > 1.0) {
    throw Error("mask_context: rate must lie in [0,1]");
  }
  const auto tokens = token_ranges(context);

  auto overlaps_event = [&](const TokenRange& t) {
    auto overlaps = [&](const Span& s) {
      return t.start < s.end && s.start < t.end;
    };
    for (const auto& r : records) {
      if (overlaps(r.trigger)) return true;
      for (const auto& [role, span] : r.arguments) {
        if (overlaps(span)) return true;
      }
    }
    return false;
  };

  // One draw per token no matter what, so toggling span protection never
  // shifts which of the remaining tokens get masked.
  MaskResult out;
  std::vector<TokenRange> to_mask;
  for (const auto& t : tokens) {
    const bool drawn = rng.bernoulli(rate);
    if (!drawn) continue;
    if (protect_event_tokens && overlaps_event(t)) continue;
    to_mask.push_back(t);
  }

  std::string masked;
  masked.reserve(context.size());
  std::size_t cursor = 0;
  for (const auto& t : to_mask) {
    masked.append(context, cursor, t.start - cursor);
    masked.append(kMaskToken);
    cursor = t.end;
  }
  masked.append(context, cursor, context.size() - cursor);

  out.masked = std::move(masked);
  out.mask_positions = std::move(to_mask);
  return out;
}

GenerationInput build_generation_input(const EventSchema& schema,
                                       const AnnotatedSentence& sentence,
                                       double mask_rate, Rng& rng,
                                       bool protect_event_tokens) {
  if (sentence.records.empty()) {
    throw Error("build_generation_input: sentence '" + sentence.id +
                "' has no records");
  }
  GenerationInput out;
  out.prefix = kGenerationPrefix;
  out.event_description = render_event_description(schema, sentence.records);
  out.relation_description = render_relation_description({});
  MaskResult mask = mask_context(sentence.context, sentence.records, mask_rate,
                                 rng, protect_event_tokens);
  out.masked_context = std::move(mask.masked);
  out.mask_positions = std::move(mask.mask_positions);
  out.target = sentence.context;
  out.source_id = sentence.id;

  std::vector<std::string> parts;
  for (const std::string* p :
       {&out.prefix, &out.event_description, &out.relation_description,
        &out.masked_context}) {
    if (!p->empty()) parts.push_back(*p);
  }
  out.rendered = join(parts, " ");
  return out;
}

PolicyInput build_policy_input(const std::string& event_description,
                               const std::string& generated_text) {
  if (event_description.empty()) {
    throw Error("build_policy_input: empty event description");
  }
  if (generated_text.empty()) {
    throw Error("build_policy_input: empty generated text");
  }
  PolicyInput out;
  out.event_description = event_description;
  out.generated_text = generated_text;
  out.rendered =
      event_description + " " + kSepToken + " " + generated_text;
  return out;
}

namespace {

struct TemplateParts {
  std::vector<std::string> segments;  // literal text; size = slots + 1
  std::vector<std::string> slots;     // "trigger" or role names
};

TemplateParts split_template(const std::string& template_text) {
  TemplateParts parts;
  std::size_t pos = 0;
  std::string current;
  while (pos < template_text.size()) {
    std::size_t open = template_text.find('<', pos);
    if (open == std::string::npos) break;
    std::size_t close = template_text.find('>', open + 1);
    if (close == std::string::npos) break;
    parts.segments.push_back(template_text.substr(pos, open - pos));
    parts.slots.push_back(template_text.substr(open + 1, close - open - 1));
    pos = close + 1;
  }
  parts.segments.push_back(template_text.substr(pos));
  return parts;
}

std::string replace_all(std::string text, const std::string& needle,
                        const std::string& replacement) {
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.replace(pos, needle.size(), replacement);
    pos += replacement.size();
  }
  return text;
}

}  // namespace

std::string fill_template(const EventSchema& schema,
                          const EventRecord& record) {
  const EventTypeDef& def = schema.type(record.event_type);
  std::string out =
      replace_all(def.template_text, "<trigger>", record.trigger.text);
  for (const auto& role : def.roles) {
    std::string filler = kNullSlot;
    for (const auto& [arg_role, span] : record.arguments) {
      if (arg_role == role) {
        filler = span.text;
        break;
      }
    }
    out = replace_all(out, "<" + role + ">", filler);
  }
  return out;
}

std::string unfilled_template(const EventSchema& schema,
                              const std::string& event_type) {
  return schema.type(event_type).template_text;
}

ParsedPrompt parse_answered_prompt(const std::string& answered,
                                   const EventSchema& schema,
                                   const std::string& event_type) {
  const EventTypeDef& def = schema.type(event_type);
  const TemplateParts parts = split_template(def.template_text);

  ParsedPrompt result;
  std::vector<std::string> fillers(parts.slots.size());

  std::size_t cursor = 0;
  if (!parts.segments.front().empty()) {
    std::size_t at = answered.find(parts.segments.front());
    if (at == std::string::npos) return result;  // no template skeleton
    cursor = at + parts.segments.front().size();
  }
  for (std::size_t i = 0; i < parts.slots.size(); ++i) {
    const std::string& next_seg = parts.segments[i + 1];
    if (next_seg.empty()) {
      if (i + 1 != parts.slots.size()) return result;  // ambiguous template
      fillers[i] = trim(answered.substr(cursor));
      cursor = answered.size();
    } else {
      std::size_t at = answered.find(next_seg, cursor);
      if (at == std::string::npos) return result;
      fillers[i] = trim(answered.substr(cursor, at - cursor));
      cursor = at + next_seg.size();
    }
  }

  result.matched = true;
  for (std::size_t i = 0; i < parts.slots.size(); ++i) {
    const std::string& slot = parts.slots[i];
    const std::string& filler = fillers[i];
    const bool unfilled =
        filler.empty() || filler == kNullSlot || filler == "<" + slot + ">";
    if (unfilled) continue;
    if (slot == "trigger") {
      result.trigger = filler;
    } else {
      result.role_fillers.emplace_back(slot, filler);
    }
  }
  return result;
}

OffsetDecoder::OffsetDecoder(std::string context)
    : context_(std::move(context)) {}

std::vector<std::size_t> OffsetDecoder::occurrences(
    const std::string& filler) const {
  std::vector<std::size_t> starts;
  if (filler.empty()) return starts;
  std::size_t pos = 0;
  while ((pos = context_.find(filler, pos)) != std::string::npos) {
    starts.push_back(pos);
    ++pos;
  }
  return starts;
}

std::optional<Span> OffsetDecoder::decode(const std::string& filler) {
  for (std::size_t start : occurrences(filler)) {
    const std::size_t end = start + filler.size();
    const bool used =
        std::find(consumed_.begin(), consumed_.end(),
                  std::make_pair(start, end)) != consumed_.end();
    if (used) continue;
    consumed_.emplace_back(start, end);
    return Span{filler, start, end};
  }
  return std::nullopt;
}

std::optional<Span> OffsetDecoder::decode_near(const std::string& filler,
                                               const Span& anchor) const {
  std::optional<Span> best;
  std::size_t best_gap = std::numeric_limits<std::size_t>::max();
  for (std::size_t start : occurrences(filler)) {
    const std::size_t end = start + filler.size();
    std::size_t gap = 0;
    if (start >= anchor.end) {
      gap = start - anchor.end;
    } else if (anchor.start >= end) {
      gap = anchor.start - end;
    }  // overlapping spans have gap 0
    if (gap < best_gap) {
      best_gap = gap;
      best = Span{filler, start, end};
    }
  }
  return best;
}

std::optional<Span> decode_offsets(const std::string& filler,
                                   const std::string& context,
                                   const std::optional<Span>& anchor) {
  OffsetDecoder decoder(context);
  if (anchor) return decoder.decode_near(filler, *anchor);
  return decoder.decode(filler);
}

std::vector<EventRecord> decode_predictions(
    const EventSchema& schema, const std::string& context,
    const std::vector<std::pair<std::string, std::string>>& answered_by_type) {
  OffsetDecoder decoder(context);
  std::vector<EventRecord> records;
  for (const auto& [event_type, answered] : answered_by_type) {
    if (!schema.has_type(event_type)) continue;
    ParsedPrompt parsed = parse_answered_prompt(answered, schema, event_type);
    if (!parsed.matched || parsed.trigger.empty()) continue;
    std::optional<Span> trigger = decoder.decode(parsed.trigger);
    if (!trigger) continue;
    EventRecord record;
    record.event_type = event_type;
    record.trigger = *trigger;
    for (const auto& [role, filler] : parsed.role_fillers) {
      std::optional<Span> span = decoder.decode_near(filler, *trigger);
      if (span) record.arguments.emplace_back(role, *span);
    }
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace evaug
