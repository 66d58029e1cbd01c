#include "lexiphy/align.hpp"

#include <cmath>
#include <limits>

#include "lexiphy/error.hpp"

namespace lexiphy {

double NormalizedLevenshtein(const Tokens &a, const Tokens &b) {
  if (a.empty() && b.empty()) Fail(ErrorCode::kBothEmpty, "both sequences are empty");
  return static_cast<double>(Levenshtein(a, b)) /
         static_cast<double>(std::max(a.size(), b.size()));
}

double ScoringScheme::Score(char a, char b) const {
  if (!pair_scores.empty()) {
    const auto key = std::minmax(a, b);
    if (auto it = pair_scores.find({key.first, key.second}); it != pair_scores.end()) {
      return it->second;
    }
  }
  return a == b ? match : mismatch;
}

void ScoringScheme::Validate() const {
  if (!(gap < 0.0 && match > 0.0)) {
    Fail(ErrorCode::kBadValue, "scoring scheme requires gap < 0 < match");
  }
  for (const auto &[key, score] : pair_scores) {
    if (key.first > key.second) Fail(ErrorCode::kBadValue, "pair table key not normalized");
    if (!std::isfinite(score)) Fail(ErrorCode::kBadValue, "non-finite pair score");
  }
}

ScoringScheme ScoringScheme::FromTable(const TsvTable &table) {
  const auto col_a = table.ColumnIndex("CLASS_A");
  const auto col_b = table.ColumnIndex("CLASS_B");
  const auto col_score = table.ColumnIndex("SCORE");
  if (!col_a || !col_b || !col_score) {
    Fail(ErrorCode::kMissingColumn, "scoring table needs CLASS_A, CLASS_B and SCORE");
  }
  ScoringScheme scheme;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    const std::string where = "line " + std::to_string(table.line_numbers[r]);
    if (row.size() <= std::max({*col_a, *col_b, *col_score})) {
      Fail(ErrorCode::kBadValue, where + ": too few fields");
    }
    const std::string a = Trim(row[*col_a]);
    const std::string b = Trim(row[*col_b]);
    if (a.size() != 1 || b.size() != 1) {
      Fail(ErrorCode::kBadValue, where + ": class labels must be single characters");
    }
    double score = 0.0;
    try {
      size_t used = 0;
      score = std::stod(row[*col_score], &used);
    } catch (const std::exception &) {
      Fail(ErrorCode::kBadValue, where + ": bad score");
    }
    const auto key = std::minmax(a[0], b[0]);
    const std::pair<char, char> normalized{key.first, key.second};
    if (auto it = scheme.pair_scores.find(normalized);
        it != scheme.pair_scores.end() && it->second != score) {
      Fail(ErrorCode::kBadValue, where + ": asymmetric score for " + a + "/" + b);
    }
    scheme.pair_scores[normalized] = score;
  }
  scheme.Validate();
  return scheme;
}

ScoringScheme ScoringScheme::FromTsv(const std::filesystem::path &path) {
  return FromTable(ReadTsv(path));
}

Alignment NeedlemanWunsch(std::string_view a, std::string_view b,
                          const ScoringScheme &scheme) {
  const size_t rows = a.size() + 1;
  const size_t cols = b.size() + 1;
  std::vector<double> table(rows * cols, 0.0);
  auto at = [&](size_t i, size_t j) -> double & { return table[i * cols + j]; };
  for (size_t i = 1; i < rows; ++i) at(i, 0) = at(i - 1, 0) + scheme.gap;
  for (size_t j = 1; j < cols; ++j) at(0, j) = at(0, j - 1) + scheme.gap;
  for (size_t i = 1; i < rows; ++i) {
    for (size_t j = 1; j < cols; ++j) {
      at(i, j) = std::max({at(i - 1, j - 1) + scheme.Score(a[i - 1], b[j - 1]),
                           at(i - 1, j) + scheme.gap, at(i, j - 1) + scheme.gap});
    }
  }

  Alignment alignment;
  alignment.score = at(rows - 1, cols - 1);
  size_t i = a.size();
  size_t j = b.size();
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        at(i, j) == at(i - 1, j - 1) + scheme.Score(a[i - 1], b[j - 1])) {
      alignment.top.push_back(a[i - 1]);
      alignment.bottom.push_back(b[j - 1]);
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + scheme.gap) {
      alignment.top.push_back(a[i - 1]);
      alignment.bottom.push_back('-');
      --i;
    } else {
      alignment.top.push_back('-');
      alignment.bottom.push_back(b[j - 1]);
      --j;
    }
  }
  std::reverse(alignment.top.begin(), alignment.top.end());
  std::reverse(alignment.bottom.begin(), alignment.bottom.end());
  return alignment;
}

double ScaDistance(std::string_view a, std::string_view b, const ScoringScheme &scheme) {
  const double cross = NeedlemanWunsch(a, b, scheme).score;
  const double self = NeedlemanWunsch(a, a, scheme).score + NeedlemanWunsch(b, b, scheme).score;
  if (self <= 0.0) return a == b ? 0.0 : 1.0;
  return std::clamp(1.0 - 2.0 * cross / self, 0.0, 1.0);
}

}  // namespace lexiphy
