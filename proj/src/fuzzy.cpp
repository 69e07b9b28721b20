#include "rku/fuzzy.hpp"

#include <algorithm>
#include <numeric>

#include "rku/error.hpp"
#include "rku/utf8.hpp"

namespace rku::fuzzy {

namespace {

bool is_white(char32_t c) {
  switch (c) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\v':
    case U'\f':
    case U'\r':
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000: return true;
    default: return c >= 0x2000 && c <= 0x200A;
  }
}

char32_t fold(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if (c < 0x80) return c;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  if (c >= 0x100 && c <= 0x17F) {
    if (c == 0x130) return U'i';
    if (c == 0x178) return 0xFF;
    const bool even_upper =
        (c <= 0x12F) || (c >= 0x132 && c <= 0x137) || (c >= 0x14A && c <= 0x177);
    const bool odd_upper = (c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E);
    if (even_upper && c % 2 == 0) return c + 1;
    if (odd_upper && c % 2 == 1) return c + 1;
    return c;
  }
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 32;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  return c;
}

std::vector<std::u32string> split_tokens(const std::u32string& normalized) {
  std::vector<std::u32string> tokens;
  std::size_t start = 0;
  while (start < normalized.size()) {
    auto end = normalized.find(U' ', start);
    if (end == std::u32string::npos) end = normalized.size();
    tokens.emplace_back(normalized.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

}  // namespace

std::u32string normalize(std::u32string_view text) {
  std::u32string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char32_t c : text) {
    if (is_white(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(fold(c));
  }
  return out;
}

std::string normalize(std::string_view text) { return utf8::encode(normalize(utf8::decode(text))); }

EditDistance levenshtein(std::u32string_view s, std::u32string_view t) {
  if (s.size() < t.size()) std::swap(s, t);
  // row[j] holds the distance between the current prefix of s and t[0..j).
  std::vector<EditDistance> row(t.size() + 1);
  std::iota(row.begin(), row.end(), EditDistance{0});
  for (std::size_t i = 1; i <= s.size(); ++i) {
    EditDistance diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= t.size(); ++j) {
      const EditDistance above = row[j];
      const EditDistance substitute = diagonal + (s[i - 1] == t[j - 1] ? 0 : 1);
      row[j] = std::min({above + 1, row[j - 1] + 1, substitute});
      diagonal = above;
    }
  }
  return row[t.size()];
}

EditDistance levenshtein(std::string_view s, std::string_view t) {
  return levenshtein(utf8::decode(s), utf8::decode(t));
}

std::optional<EditDistance> levenshtein_bounded(std::u32string_view s, std::u32string_view t,
                                                std::size_t k) {
  const std::size_t m = s.size();
  const std::size_t n = t.size();
  if ((m > n ? m - n : n - m) > k) return std::nullopt;

  // Cells off the band saturate at k + 1, which stands for "more than k".
  const EditDistance beyond = k + 1;
  std::vector<EditDistance> prev(n + 1, beyond);
  std::vector<EditDistance> cur(n + 1, beyond);
  for (std::size_t j = 0; j <= std::min(n, k); ++j) prev[j] = j;

  for (std::size_t i = 1; i <= m; ++i) {
    const std::size_t lo = i > k ? i - k : 0;
    const std::size_t hi = std::min(n, i + k);
    if (lo > 0) cur[lo - 1] = beyond;
    EditDistance row_min = beyond;
    for (std::size_t j = lo; j <= hi; ++j) {
      EditDistance v;
      if (j == 0) {
        v = i;
      } else {
        const EditDistance substitute = prev[j - 1] + (s[i - 1] == t[j - 1] ? 0 : 1);
        v = std::min({prev[j] + 1, cur[j - 1] + 1, substitute});
      }
      v = std::min(v, beyond);
      cur[j] = v;
      row_min = std::min(row_min, v);
    }
    if (hi + 1 <= n) cur[hi + 1] = beyond;
    if (row_min > k) return std::nullopt;
    std::swap(prev, cur);
  }
  if (prev[n] > k) return std::nullopt;
  return prev[n];
}

std::optional<EditDistance> levenshtein_bounded(std::string_view s, std::string_view t,
                                                std::size_t k) {
  return levenshtein_bounded(utf8::decode(s), utf8::decode(t), k);
}

SearchCorpus::SearchCorpus(std::vector<Source> sources) {
  entries_.reserve(sources.size());
  for (auto& src : sources) {
    CorpusEntry e;
    e.entry_id = std::move(src.entry_id);
    e.primary_text = std::move(src.primary_text);
    e.normalized = normalize(utf8::decode(e.primary_text));
    e.tokens = split_tokens(e.normalized);
    entries_.push_back(std::move(e));
  }
}

std::size_t default_threshold(std::size_t query_length) {
  return std::max<std::size_t>(1, (query_length + 3) / 4);
}

std::vector<Suggestion> suggest(std::string_view query, const SearchCorpus& corpus,
                                std::size_t limit, std::optional<std::size_t> max_distance) {
  if (limit == 0) throw Error(ErrorCode::Validation, "limit must be at least 1");
  const std::u32string q = normalize(utf8::decode(query));
  if (q.empty()) throw Error(ErrorCode::EmptyQuery, "query is empty");
  const std::size_t tau = max_distance.value_or(default_threshold(q.size()));

  std::vector<Suggestion> out;
  for (const auto& entry : corpus.entries()) {
    std::optional<EditDistance> best = levenshtein_bounded(q, entry.normalized, tau);
    const std::u32string* matched = &entry.normalized;
    for (const auto& token : entry.tokens) {
      if (best && *best == 0) break;
      // A token only needs to beat the current best, so tighten the band.
      const std::size_t bound = best ? *best - 1 : tau;
      if (auto d = levenshtein_bounded(q, token, bound)) {
        best = d;
        matched = &token;
      }
    }
    if (best) out.push_back(Suggestion{entry.entry_id, utf8::encode(*matched), *best});
  }
  std::stable_sort(out.begin(), out.end(), [](const Suggestion& a, const Suggestion& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.entry_id < b.entry_id;
  });
  if (out.size() > limit) out.resize(limit);
  return out;
}

}  // namespace rku::fuzzy
