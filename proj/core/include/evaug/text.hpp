#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace evaug {

/// Character range [start, end) of one whitespace-delimited token.
struct TokenRange {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const TokenRange&) const = default;
};

std::vector<std::string> split_whitespace(std::string_view text);

std::vector<TokenRange> token_ranges(std::string_view text);

/// True when `phrase` occurs in `text` with word boundaries on both sides.
/// A bare substring test would treat "art" as covered by "party".
bool contains_word_bounded(std::string_view text, std::string_view phrase);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string trim(std::string_view s);

}  // namespace evaug
