#pragma once

// Binary cognate character matrices, the two-state substitution model and the
// pruning-algorithm likelihood.

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexiphy/cognate.hpp"
#include "lexiphy/ingest.hpp"
#include "lexiphy/tree.hpp"

namespace lexiphy {

// Languages x cognate sets presence/absence matrix.
class CharacterMatrix {
 public:
  CharacterMatrix() = default;
  // `cells` is row-major, languages.size() x column_ids.size(), entries 0/1.
  CharacterMatrix(std::vector<std::string> languages, std::vector<std::string> column_ids,
                  std::vector<uint8_t> cells);

  size_t LanguageCount() const { return languages_.size(); }
  size_t ColumnCount() const { return column_ids_.size(); }
  const std::vector<std::string> &languages() const { return languages_; }
  const std::vector<std::string> &column_ids() const { return column_ids_; }
  uint8_t operator()(size_t language, size_t column) const {
    return cells_[language * column_ids_.size() + column];
  }
  size_t ColumnSum(size_t column) const;
  // Fraction of cells equal to 1.
  double Mean() const;

  bool operator==(const CharacterMatrix &) const = default;

 private:
  std::vector<std::string> languages_;
  std::vector<std::string> column_ids_;
  std::vector<uint8_t> cells_;
};

// One column per cluster (ascending cluster id); a cell is 1 when the language
// has at least one form in the cluster. Throws DomainMismatch when the
// partition does not cover the wordlist.
CharacterMatrix BuildMatrix(const CognatePartition &partition, const Wordlist &wordlist,
                            bool drop_all_present = false);

// Header `LANGUAGE<TAB>id...`, one row per language.
std::string FormatMatrix(const CharacterMatrix &matrix);
CharacterMatrix ParseMatrix(const TsvTable &table);
CharacterMatrix LoadMatrix(const std::filesystem::path &path);
void SaveMatrix(const CharacterMatrix &matrix, const std::filesystem::path &path);

struct SubstParams {
  double pi1 = 0.5;  // stationary frequency of presence
  double mu = 1.0;   // overall rate
};

using TransitionMatrix = std::array<std::array<double, 2>, 2>;

// P[i][j] = pi_j + (delta_ij - pi_j) exp(-mu t).
TransitionMatrix Transition(const SubstParams &params, double t);

// (2n-3)! / (2^(n-2) (n-2)!) rooted binary topologies on n labelled leaves.
boost::multiprecision::cpp_int TopologyCount(unsigned n);

// Column-pattern compressed likelihood evaluator for one matrix. Partials are
// rescaled at every node so long alignments do not underflow.
class LikelihoodEngine {
 public:
  explicit LikelihoodEngine(const CharacterMatrix &matrix);

  // Throws LabelMismatch unless the tree's leaves are exactly the matrix
  // languages.
  double LogLikelihood(const PhyloTree &tree, const SubstParams &params) const;

  size_t PatternCount() const { return pattern_counts_.size(); }

 private:
  std::unordered_map<std::string, size_t> row_of_language_;
  size_t language_count_ = 0;
  // patterns_[p * language_count_ + row]
  std::vector<uint8_t> patterns_;
  std::vector<double> pattern_counts_;
};

double PruningLogLikelihood(const PhyloTree &tree, const CharacterMatrix &matrix,
                            const SubstParams &params);

}  // namespace lexiphy
