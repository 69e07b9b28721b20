#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rku::fuzzy {

/// Minimum number of single code point insertions, deletions and
/// substitutions turning one string into another.
using EditDistance = std::size_t;

/// Simple case fold, trim, and collapse internal whitespace runs to one space.
std::string normalize(std::string_view text);
std::u32string normalize(std::u32string_view text);

/// Full dynamic program, two rolling rows, unit costs.
EditDistance levenshtein(std::u32string_view s, std::u32string_view t);
/// UTF-8 convenience overload; distances are counted in code points.
EditDistance levenshtein(std::string_view s, std::string_view t);

/// Only the diagonal band |i - j| <= k is evaluated. Returns nullopt
/// (beyond bound) exactly when levenshtein(s, t) > k.
std::optional<EditDistance> levenshtein_bounded(std::u32string_view s, std::u32string_view t,
                                                std::size_t k);
std::optional<EditDistance> levenshtein_bounded(std::string_view s, std::string_view t,
                                                std::size_t k);

struct CorpusEntry {
  std::string entry_id;
  std::string primary_text;
  std::u32string normalized;
  std::vector<std::u32string> tokens;
};

/// Immutable search target. Rebuild to change it.
class SearchCorpus {
 public:
  struct Source {
    std::string entry_id;
    std::string primary_text;
  };

  SearchCorpus() = default;
  explicit SearchCorpus(std::vector<Source> sources);

  const std::vector<CorpusEntry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::vector<CorpusEntry> entries_;
};

struct Suggestion {
  std::string entry_id;
  std::string matched_text;  // normalized text or token that achieved the score
  EditDistance score = 0;

  friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

/// max(1, ceil(query_length / 4)), length in code points.
std::size_t default_threshold(std::size_t query_length);

/// Ranked suggestions sorted by (score, entry_id), at most `limit` of them.
/// Throws Error(EmptyQuery) when the query normalizes to nothing and
/// Error(Validation) when limit is zero.
std::vector<Suggestion> suggest(std::string_view query, const SearchCorpus& corpus,
                                std::size_t limit,
                                std::optional<std::size_t> max_distance = std::nullopt);

}  // namespace rku::fuzzy
