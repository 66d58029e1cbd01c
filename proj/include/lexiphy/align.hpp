#pragma once

// Pairwise sequence comparison: token edit distance and global alignment of
// sound-class strings.

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexiphy/ingest.hpp"

namespace lexiphy {

// Unit-cost Levenshtein distance over arbitrary element sequences.
template <typename T>
size_t Levenshtein(std::span<const T> a, std::span<const T> b) {
  std::vector<size_t> previous(b.size() + 1), current(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) previous[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    current[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      const size_t substitution = previous[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      current[j] = std::min({previous[j] + 1, current[j - 1] + 1, substitution});
    }
    std::swap(previous, current);
  }
  return previous[b.size()];
}

inline size_t Levenshtein(const Tokens &a, const Tokens &b) {
  return Levenshtein<std::string>(a, b);
}

// Levenshtein distance divided by the longer length. Throws BothEmpty.
double NormalizedLevenshtein(const Tokens &a, const Tokens &b);

struct ScoringScheme {
  double match = 1.0;
  double mismatch = -1.0;
  double gap = -1.0;
  // Optional class-pair scores; stored with the smaller label first.
  std::map<std::pair<char, char>, double> pair_scores;

  double Score(char a, char b) const;
  // Checks gap < 0 < match and pair-table symmetry; throws BadValue.
  void Validate() const;

  // Reads `CLASS_A<TAB>CLASS_B<TAB>SCORE` rows on top of the default scheme.
  static ScoringScheme FromTsv(const std::filesystem::path &path);
  static ScoringScheme FromTable(const TsvTable &table);
};

struct Alignment {
  std::string top;     // first sequence with '-' gaps
  std::string bottom;  // second sequence with '-' gaps
  double score = 0.0;
};

// Needleman-Wunsch global alignment. Traceback prefers diagonal, then up (gap
// in the second sequence), then left.
Alignment NeedlemanWunsch(std::string_view a, std::string_view b,
                          const ScoringScheme &scheme = {});

// 1 - 2 S(a,b) / (S(a,a) + S(b,b)), clamped to [0, 1].
double ScaDistance(std::string_view a, std::string_view b,
                   const ScoringScheme &scheme = {});

}  // namespace lexiphy
