#include "lexiphy/phylo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "lexiphy/error.hpp"

namespace lexiphy {

CharacterMatrix::CharacterMatrix(std::vector<std::string> languages,
                                 std::vector<std::string> column_ids, std::vector<uint8_t> cells)
    : languages_(std::move(languages)), column_ids_(std::move(column_ids)), cells_(std::move(cells)) {
  if (cells_.size() != languages_.size() * column_ids_.size()) {
    Fail(ErrorCode::kBadValue, "matrix cell count does not match its dimensions");
  }
  for (uint8_t cell : cells_) {
    if (cell > 1) Fail(ErrorCode::kBadValue, "matrix cells must be 0 or 1");
  }
  if (std::set<std::string>(languages_.begin(), languages_.end()).size() != languages_.size()) {
    Fail(ErrorCode::kBadValue, "duplicate language in matrix");
  }
}

size_t CharacterMatrix::ColumnSum(size_t column) const {
  size_t sum = 0;
  for (size_t row = 0; row < languages_.size(); ++row) sum += (*this)(row, column);
  return sum;
}

double CharacterMatrix::Mean() const {
  if (cells_.empty()) return 0.0;
  size_t ones = 0;
  for (uint8_t cell : cells_) ones += cell;
  return static_cast<double>(ones) / static_cast<double>(cells_.size());
}

CharacterMatrix BuildMatrix(const CognatePartition &partition, const Wordlist &wordlist,
                            bool drop_all_present) {
  if (wordlist.size() == 0) Fail(ErrorCode::kInvalidArgument, "empty wordlist");
  if (partition.assignment.size() != wordlist.size()) {
    Fail(ErrorCode::kDomainMismatch, "partition does not cover the wordlist");
  }
  const auto &languages = wordlist.languages();
  std::map<std::string, size_t> row_of;
  for (size_t i = 0; i < languages.size(); ++i) row_of[languages[i]] = i;

  std::map<int64_t, std::set<size_t>> present;
  for (const auto &form : wordlist.forms()) {
    auto it = partition.assignment.find(form.id);
    if (it == partition.assignment.end()) {
      Fail(ErrorCode::kDomainMismatch, "form " + std::to_string(form.id) + " is unassigned");
    }
    present[it->second].insert(row_of.at(form.doculect));
  }
  std::vector<int64_t> kept;
  for (const auto &[cluster, rows] : present) {
    if (drop_all_present && rows.size() == languages.size()) continue;
    kept.push_back(cluster);
  }
  std::vector<std::string> column_ids;
  std::vector<uint8_t> cells(languages.size() * kept.size(), 0);
  for (size_t c = 0; c < kept.size(); ++c) {
    column_ids.push_back(std::to_string(kept[c]));
    for (size_t row : present[kept[c]]) cells[row * kept.size() + c] = 1;
  }
  return CharacterMatrix(languages, std::move(column_ids), std::move(cells));
}

std::string FormatMatrix(const CharacterMatrix &matrix) {
  TsvTable table;
  table.header = {"LANGUAGE"};
  table.header.insert(table.header.end(), matrix.column_ids().begin(), matrix.column_ids().end());
  for (size_t row = 0; row < matrix.LanguageCount(); ++row) {
    std::vector<std::string> fields = {matrix.languages()[row]};
    for (size_t col = 0; col < matrix.ColumnCount(); ++col) {
      fields.push_back(matrix(row, col) ? "1" : "0");
    }
    table.rows.push_back(std::move(fields));
  }
  return FormatTsv(table);
}

CharacterMatrix ParseMatrix(const TsvTable &table) {
  if (table.header.empty()) Fail(ErrorCode::kMissingColumn, "matrix lacks a header");
  std::vector<std::string> column_ids(table.header.begin() + 1, table.header.end());
  std::vector<std::string> languages;
  std::vector<uint8_t> cells;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    const std::string where = "line " + std::to_string(table.line_numbers[r]);
    if (row.size() != table.header.size()) Fail(ErrorCode::kBadValue, where + ": wrong field count");
    languages.push_back(Trim(row[0]));
    for (size_t c = 1; c < row.size(); ++c) {
      const std::string cell = Trim(row[c]);
      if (cell != "0" && cell != "1") Fail(ErrorCode::kBadValue, where + ": cell must be 0 or 1");
      cells.push_back(cell == "1" ? 1 : 0);
    }
  }
  return CharacterMatrix(std::move(languages), std::move(column_ids), std::move(cells));
}

CharacterMatrix LoadMatrix(const std::filesystem::path &path) { return ParseMatrix(ReadTsv(path)); }

void SaveMatrix(const CharacterMatrix &matrix, const std::filesystem::path &path) {
  WriteTextFile(path, FormatMatrix(matrix));
}

TransitionMatrix Transition(const SubstParams &params, double t) {
  if (!(t >= 0.0)) Fail(ErrorCode::kInvalidArgument, "branch length must be non-negative");
  const double decay = std::exp(-params.mu * t);
  const double pi[2] = {1.0 - params.pi1, params.pi1};
  TransitionMatrix p{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) p[i][j] = pi[j] + ((i == j ? 1.0 : 0.0) - pi[j]) * decay;
  }
  return p;
}

boost::multiprecision::cpp_int TopologyCount(unsigned n) {
  using boost::multiprecision::cpp_int;
  if (n < 2) Fail(ErrorCode::kInvalidArgument, "topology count needs at least 2 leaves");
  auto factorial = [](unsigned k) {
    cpp_int value = 1;
    for (unsigned i = 2; i <= k; ++i) value *= i;
    return value;
  };
  const cpp_int power = cpp_int(1) << (n - 2);
  return factorial(2 * n - 3) / (power * factorial(n - 2));
}

LikelihoodEngine::LikelihoodEngine(const CharacterMatrix &matrix)
    : language_count_(matrix.LanguageCount()) {
  for (size_t row = 0; row < matrix.LanguageCount(); ++row) {
    row_of_language_[matrix.languages()[row]] = row;
  }
  std::map<std::vector<uint8_t>, size_t> counts;
  for (size_t col = 0; col < matrix.ColumnCount(); ++col) {
    std::vector<uint8_t> column(language_count_);
    for (size_t row = 0; row < language_count_; ++row) column[row] = matrix(row, col);
    ++counts[column];
  }
  for (const auto &[column, count] : counts) {
    patterns_.insert(patterns_.end(), column.begin(), column.end());
    pattern_counts_.push_back(static_cast<double>(count));
  }
}

double LikelihoodEngine::LogLikelihood(const PhyloTree &tree, const SubstParams &params) const {
  const size_t pattern_count = pattern_counts_.size();
  const auto postorder = tree.Postorder();

  std::vector<size_t> leaf_row(tree.NodeCount(), 0);
  size_t leaves = 0;
  std::vector<bool> row_used(language_count_, false);
  for (NodeId id : postorder) {
    if (!tree.IsLeaf(id)) continue;
    const auto &label = tree.node(id).label;
    auto it = row_of_language_.find(label);
    if (it == row_of_language_.end() || row_used[it->second]) {
      Fail(ErrorCode::kLabelMismatch, "tree leaf '" + label + "' does not match the matrix");
    }
    row_used[it->second] = true;
    leaf_row[static_cast<size_t>(id)] = it->second;
    ++leaves;
  }
  if (leaves != language_count_) {
    Fail(ErrorCode::kLabelMismatch, "tree has " + std::to_string(leaves) + " leaves, matrix has " +
                                        std::to_string(language_count_) + " languages");
  }

  // partials[node][2 * pattern + state]
  std::vector<std::vector<double>> partials(tree.NodeCount());
  std::vector<double> log_scale(pattern_count, 0.0);
  bool vanished = false;
  for (NodeId id : postorder) {
    auto &partial = partials[static_cast<size_t>(id)];
    partial.assign(2 * pattern_count, 0.0);
    const auto &node = tree.node(id);
    if (node.children.empty()) {
      const size_t row = leaf_row[static_cast<size_t>(id)];
      for (size_t p = 0; p < pattern_count; ++p) {
        partial[2 * p + patterns_[p * language_count_ + row]] = 1.0;
      }
      continue;
    }
    std::fill(partial.begin(), partial.end(), 1.0);
    for (NodeId child : node.children) {
      const TransitionMatrix prob = Transition(params, tree.node(child).length);
      const auto &below = partials[static_cast<size_t>(child)];
      for (size_t p = 0; p < pattern_count; ++p) {
        const double b0 = below[2 * p], b1 = below[2 * p + 1];
        partial[2 * p] *= prob[0][0] * b0 + prob[0][1] * b1;
        partial[2 * p + 1] *= prob[1][0] * b0 + prob[1][1] * b1;
      }
      std::vector<double>().swap(partials[static_cast<size_t>(child)]);
    }
    for (size_t p = 0; p < pattern_count; ++p) {
      const double largest = std::max(partial[2 * p], partial[2 * p + 1]);
      if (largest <= 0.0) {
        vanished = true;
        continue;
      }
      partial[2 * p] /= largest;
      partial[2 * p + 1] /= largest;
      log_scale[p] += std::log(largest);
    }
  }
  if (vanished) return -std::numeric_limits<double>::infinity();

  const auto &root = partials[static_cast<size_t>(tree.root())];
  // Neumaier summation keeps the total independent of pattern order up to
  // rounding in the last place.
  double sum = 0.0, compensation = 0.0;
  for (size_t p = 0; p < pattern_count; ++p) {
    const double site = std::log((1.0 - params.pi1) * root[2 * p] + params.pi1 * root[2 * p + 1]);
    const double term = pattern_counts_[p] * (site + log_scale[p]);
    const double total = sum + term;
    compensation += std::abs(sum) >= std::abs(term) ? (sum - total) + term : (term - total) + sum;
    sum = total;
  }
  return sum + compensation;
}

double PruningLogLikelihood(const PhyloTree &tree, const CharacterMatrix &matrix,
                            const SubstParams &params) {
  return LikelihoodEngine(matrix).LogLikelihood(tree, params);
}

}  // namespace lexiphy
