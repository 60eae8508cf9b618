#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace adactrl::codec {

enum class DifficultyTag { Easy, Hard };

// Serialized forms are the literal strings "[Easy]" and "[Hard]".
std::string_view tag_literal(DifficultyTag tag);
std::string_view tag_name(DifficultyTag tag);  // "Easy" / "Hard", for reports
std::optional<DifficultyTag> tag_from_name(std::string_view name);

// A raw response split into the pieces the reward pipeline consumes.
struct ParsedResponse {
  std::optional<DifficultyTag> tag;
  std::string body;  // raw text with the leading tag literal stripped
  std::optional<std::string> final_answer;
  std::uint64_t token_count = 0;  // whitespace tokens of the full raw text
};

// Returns Easy/Hard iff raw, after stripping leading whitespace, begins with
// the exact literal "[Easy]" or "[Hard]". Case-sensitive; absence is a value.
std::optional<DifficultyTag> parse_tag(std::string_view raw);

// Contents of the last \boxed{...} group with balanced braces. Openers whose
// group never closes are skipped; absent only when no balanced group exists.
std::optional<std::string> extract_boxed_answer(std::string_view raw);

// Answer equivalence: trim, strip surrounding '$', collapse internal
// whitespace; exact rational comparison when both sides parse as integers,
// decimals, a/b, or \frac{a}{b}; byte-for-byte normalized strings otherwise.
bool answers_equivalent(std::string_view candidate, std::string_view truth);

// Explicit token count when present, whitespace-delimited count of raw
// otherwise. A negative explicit count rejects the record.
std::uint64_t measure_length(std::optional<long long> explicit_count, std::string_view raw);

std::uint64_t whitespace_token_count(std::string_view text);

ParsedResponse parse_response(std::string_view raw);

// Normalized comparison key (exposed for tests): trimmed, $-stripped,
// internal whitespace collapsed to single spaces.
std::string normalize_answer(std::string_view answer);

}  // namespace adactrl::codec
