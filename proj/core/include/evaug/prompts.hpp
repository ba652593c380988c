#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evaug/rng.hpp"
#include "evaug/schema.hpp"
#include "evaug/text.hpp"

namespace evaug {

inline constexpr const char* kSepToken = "[SEP]";
inline constexpr const char* kMaskToken = "[M]";
inline constexpr const char* kNullSlot = "<none>";
inline constexpr const char* kGenerationPrefix =
    "translate knowledge into sentence";

/// Extractor-facing sequence: type instruction + template, then the context.
struct ExtractionInput {
  std::string event_type;
  std::string prompt;
  std::string context;
  std::string rendered;  // prompt + " [SEP] " + context
};

/// rendered = "Event type is <type> . <template> [SEP] <context>".
/// Throws on unknown event types and on empty contexts.
ExtractionInput build_extraction_input(const EventSchema& schema,
                                       const std::string& event_type,
                                       const std::string& context);

/// Deterministic clause-per-fact rendering of event records:
///   "<trigger> is the trigger of the <type> event ." then one
///   "<argument> is the <Role> ." clause per argument, in schema role order,
/// clauses joined by single spaces, record order preserved. The grammar is
/// injective over records: distinct records render distinctly.
std::string render_event_description(const EventSchema& schema,
                                     const std::vector<EventRecord>& records);

struct RelationAnnotation {
  std::string subject;
  std::string relation;
  std::string object;
};

/// "<A> has relation <rel> with <B> ." per relation, input order; "" if none.
std::string render_relation_description(
    const std::vector<RelationAnnotation>& relations);

struct MaskResult {
  std::string masked;
  /// Character ranges of the original context that were replaced.
  std::vector<TokenRange> mask_positions;
};

/// Independently masks each whitespace token with probability `rate`,
/// replacing it with "[M]" in place so all untouched characters (including
/// original whitespace) survive byte-for-byte. With protect_event_tokens set,
/// tokens overlapping any trigger/argument span are never masked. Exactly one
/// Bernoulli draw is consumed per token, so results are a pure function of
/// (context, rate, seed) and protection never shifts other tokens' draws.
MaskResult mask_context(const std::string& context,
                        const std::vector<EventRecord>& records, double rate,
                        Rng& rng, bool protect_event_tokens = false);

/// Generator-facing sequence and its supervision target.
struct GenerationInput {
  std::string prefix;                // fixed task prefix
  std::string event_description;     // rendered records
  std::string relation_description;  // may be empty
  std::string masked_context;
  std::string rendered;  // non-empty parts joined by single spaces
  std::string target;    // original context
  std::string source_id;
  std::vector<TokenRange> mask_positions;
};

/// Composes prefix, event description, relation description, and masked
/// context. Requires at least one record on the sentence.
GenerationInput build_generation_input(const EventSchema& schema,
                                       const AnnotatedSentence& sentence,
                                       double mask_rate, Rng& rng,
                                       bool protect_event_tokens = false);

struct PolicyInput {
  std::string event_description;
  std::string generated_text;
  std::string rendered;  // description + " [SEP] " + generated text
};

/// Both parts must be non-empty.
PolicyInput build_policy_input(const std::string& event_description,
                               const std::string& generated_text);

/// Template with every slot replaced from the record: <trigger> with the
/// trigger text, <Role> with that role's argument text, unfilled roles with
/// the null placeholder.
std::string fill_template(const EventSchema& schema,
                          const EventRecord& record);

/// Unfilled template (slot markers intact); what a null extraction looks like.
std::string unfilled_template(const EventSchema& schema,
                              const std::string& event_type);

struct ParsedPrompt {
  bool matched = false;  // false: answered text shares no template skeleton
  std::string trigger;   // empty when the trigger slot was left unfilled
  std::vector<std::pair<std::string, std::string>> role_fillers;
};

/// Aligns an answered prompt against the type's template by locating the
/// template's literal segments left to right and capturing the text between
/// them as slot fillers. Fillers equal to the null placeholder or to the slot
/// marker itself are dropped. A failed alignment is an empty extraction, not
/// an error.
ParsedPrompt parse_answered_prompt(const std::string& answered,
                                   const EventSchema& schema,
                                   const std::string& event_type);

/// Occurrence-tracking span decoder for one context. Trigger fillers are
/// resolved one by one: each anchorless decode consumes the first occurrence
/// not consumed before, so two identical triggers land on distinct offsets.
/// Anchored decodes (arguments) pick the occurrence nearest the anchor span
/// by character gap, ties to the left, and consume nothing.
class OffsetDecoder {
 public:
  explicit OffsetDecoder(std::string context);

  std::optional<Span> decode(const std::string& filler);
  std::optional<Span> decode_near(const std::string& filler,
                                  const Span& anchor) const;

  const std::string& context() const { return context_; }

 private:
  std::vector<std::size_t> occurrences(const std::string& filler) const;

  std::string context_;
  std::vector<std::pair<std::size_t, std::size_t>> consumed_;
};

/// One-shot convenience over OffsetDecoder.
std::optional<Span> decode_offsets(const std::string& filler,
                                   const std::string& context,
                                   const std::optional<Span>& anchor = {});

/// Full prediction decoding for one context: parse each answered prompt,
/// decode the trigger (consuming occurrences one by one), then decode each
/// role filler anchored at the trigger. Prompts that fail to parse or whose
/// trigger cannot be located yield no record; unlocatable arguments are
/// dropped from the record.
std::vector<EventRecord> decode_predictions(
    const EventSchema& schema, const std::string& context,
    const std::vector<std::pair<std::string, std::string>>& answered_by_type);

}  // namespace evaug
