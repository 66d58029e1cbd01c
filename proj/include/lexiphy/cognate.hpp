#pragma once

// Per-concept cognate clustering. Three distance-based detectors share UPGMA
// flat clustering; BipSkip links words through shared sound-class skip-grams
// and partitions the projected word graph.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lexiphy/align.hpp"
#include "lexiphy/ingest.hpp"

namespace lexiphy {

enum class Metric { kCcm, kEditDistance, kSca };
enum class DetectMethod { kCcm, kEditDistance, kSca, kBipSkip };
enum class Partitioner { kComponents, kLabelPropagation };

DetectMethod ParseDetectMethod(std::string_view name);
std::string_view DetectMethodName(DetectMethod method);
Partitioner ParsePartitioner(std::string_view name);
std::string_view PartitionerName(Partitioner partitioner);

// Symmetric matrix with zero diagonal and entries in [0, 1], rows ordered by
// form id.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::vector<int64_t> ids);

  size_t size() const { return ids_.size(); }
  const std::vector<int64_t> &ids() const { return ids_; }
  double operator()(size_t i, size_t j) const { return values_[i * ids_.size() + j]; }
  // Sets both (i,j) and (j,i); throws BadValue outside [0, 1] or on the diagonal.
  void Set(size_t i, size_t j, double value);

 private:
  std::vector<int64_t> ids_;
  std::vector<double> values_;
};

// Form id -> positive cluster id.
struct CognatePartition {
  std::map<int64_t, int64_t> assignment;

  size_t ClusterCount() const;
  // Members of each cluster, keyed by cluster id.
  std::map<int64_t, std::vector<int64_t>> Clusters() const;
  bool operator==(const CognatePartition &) const = default;
};

// Renumbers clusters 1..k in order of first appearance over ascending ids.
CognatePartition Canonicalize(const CognatePartition &partition);

// 0 when both forms have the same non-empty two-consonant skeleton, else 1.
// Throws ConceptMismatch.
double CcmDistance(const WordForm &a, const WordForm &b, char default_class = '0');

DistanceMatrix PairwiseMatrix(const std::vector<WordForm> &forms, Metric metric,
                              const ScoringScheme &scheme = {});

// Average-linkage (UPGMA) agglomeration that keeps merging the closest pair of
// clusters while their distance is <= threshold. Ties go to the lowest index
// pair, where a merged cluster takes the lower index of its two parts.
CognatePartition UpgmaFlatCluster(const DistanceMatrix &matrix, double threshold);

// All order-preserving length-n subsequences; strings shorter than n yield a
// single gram padded with '$'.
std::set<std::string> SkipGrams(std::string_view classes, size_t n);

// Weighted undirected word graph over form ids.
class WordGraph {
 public:
  explicit WordGraph(std::vector<int64_t> ids);

  size_t size() const { return ids_.size(); }
  const std::vector<int64_t> &ids() const { return ids_; }
  void AddWeight(size_t u, size_t v, double weight);
  const std::map<size_t, double> &Neighbors(size_t u) const { return adjacency_[u]; }

 private:
  std::vector<int64_t> ids_;
  std::vector<std::map<size_t, double>> adjacency_;
};

// Words on one side, skip-grams on the other.
class BipartiteNet {
 public:
  BipartiteNet(const std::vector<WordForm> &forms, size_t gram_length);

  const std::vector<int64_t> &words() const { return words_; }
  // Gram -> indices into words().
  const std::map<std::string, std::set<size_t>> &grams() const { return grams_; }
  size_t EdgeCount() const;
  // Removes gram nodes linked to fewer than `min_degree` words.
  void PruneGrams(size_t min_degree);
  // Word graph with an edge per shared gram, weighted by the shared-gram count.
  WordGraph Project() const;

 private:
  std::vector<int64_t> words_;
  std::map<std::string, std::set<size_t>> grams_;
};

CognatePartition PartitionComponents(const WordGraph &graph);
// Asynchronous weighted label propagation; visit order reshuffled each sweep,
// ties to the smallest label, at most 100 sweeps.
CognatePartition PartitionLabelPropagation(const WordGraph &graph, uint64_t seed);

struct BipSkipParams {
  size_t gram_length = 4;
  double prune = 0.2;
  Partitioner partitioner = Partitioner::kComponents;
  uint64_t seed = 0;
};

// Minimum gram degree kept by pruning: ceil(prune * forms_in_concept).
size_t PruneDegree(double prune, size_t forms_in_concept);

CognatePartition BipSkipConcept(const std::vector<WordForm> &forms, const BipSkipParams &params);
CognatePartition BipSkipDetect(const Wordlist &wordlist, const BipSkipParams &params);

struct DetectParams {
  DetectMethod method = DetectMethod::kBipSkip;
  // Unset means the per-method default.
  std::optional<double> threshold;
  size_t gram_length = 4;
  double prune = 0.2;
  Partitioner partitioner = Partitioner::kComponents;
  uint64_t seed = 0;
  ScoringScheme scheme;
  size_t jobs = 1;
};

double DefaultThreshold(DetectMethod method);

// Clusters every concept independently; cluster ids are globally unique and
// assigned in concept order. Output is identical for any `jobs` value.
CognatePartition Detect(const Wordlist &wordlist, const DetectParams &params);

}  // namespace lexiphy
