#include "lexiphy/cognate.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "lexiphy/error.hpp"
#include "lexiphy/random.hpp"

namespace lexiphy {

DetectMethod ParseDetectMethod(std::string_view name) {
  if (name == "ccm") return DetectMethod::kCcm;
  if (name == "editdist") return DetectMethod::kEditDistance;
  if (name == "sca") return DetectMethod::kSca;
  if (name == "bipskip") return DetectMethod::kBipSkip;
  Fail(ErrorCode::kInvalidArgument, "unknown method '" + std::string(name) + "'");
}

std::string_view DetectMethodName(DetectMethod method) {
  switch (method) {
    case DetectMethod::kCcm: return "ccm";
    case DetectMethod::kEditDistance: return "editdist";
    case DetectMethod::kSca: return "sca";
    case DetectMethod::kBipSkip: return "bipskip";
  }
  return "?";
}

Partitioner ParsePartitioner(std::string_view name) {
  if (name == "components") return Partitioner::kComponents;
  if (name == "labelprop") return Partitioner::kLabelPropagation;
  Fail(ErrorCode::kInvalidArgument, "unknown partitioner '" + std::string(name) + "'");
}

std::string_view PartitionerName(Partitioner partitioner) {
  return partitioner == Partitioner::kComponents ? "components" : "labelprop";
}

DistanceMatrix::DistanceMatrix(std::vector<int64_t> ids)
    : ids_(std::move(ids)), values_(ids_.size() * ids_.size(), 0.0) {}

void DistanceMatrix::Set(size_t i, size_t j, double value) {
  if (i == j) Fail(ErrorCode::kBadValue, "diagonal of a distance matrix is fixed at 0");
  if (!(value >= 0.0 && value <= 1.0)) {
    Fail(ErrorCode::kBadValue, "distance " + std::to_string(value) + " outside [0, 1]");
  }
  values_[i * ids_.size() + j] = value;
  values_[j * ids_.size() + i] = value;
}

size_t CognatePartition::ClusterCount() const { return Clusters().size(); }

std::map<int64_t, std::vector<int64_t>> CognatePartition::Clusters() const {
  std::map<int64_t, std::vector<int64_t>> clusters;
  for (const auto &[id, cluster] : assignment) clusters[cluster].push_back(id);
  return clusters;
}

CognatePartition Canonicalize(const CognatePartition &partition) {
  CognatePartition out;
  std::map<int64_t, int64_t> relabel;
  for (const auto &[id, cluster] : partition.assignment) {
    auto [it, inserted] = relabel.emplace(cluster, static_cast<int64_t>(relabel.size()) + 1);
    out.assignment[id] = it->second;
  }
  return out;
}

double CcmDistance(const WordForm &a, const WordForm &b, char default_class) {
  if (a.gloss != b.gloss) {
    Fail(ErrorCode::kConceptMismatch, "forms " + std::to_string(a.id) + " and " +
                                          std::to_string(b.id) + " differ in concept");
  }
  const std::string left = ConsonantSkeleton(a.classes, 2, default_class);
  const std::string right = ConsonantSkeleton(b.classes, 2, default_class);
  return (!left.empty() && left == right) ? 0.0 : 1.0;
}

DistanceMatrix PairwiseMatrix(const std::vector<WordForm> &forms, Metric metric,
                              const ScoringScheme &scheme) {
  std::vector<const WordForm *> ordered;
  for (const auto &form : forms) ordered.push_back(&form);
  std::sort(ordered.begin(), ordered.end(),
            [](const WordForm *a, const WordForm *b) { return a->id < b->id; });
  std::vector<int64_t> ids;
  for (const auto *form : ordered) ids.push_back(form->id);
  DistanceMatrix matrix(std::move(ids));
  for (size_t i = 0; i < ordered.size(); ++i) {
    for (size_t j = i + 1; j < ordered.size(); ++j) {
      const WordForm &a = *ordered[i];
      const WordForm &b = *ordered[j];
      if (a.gloss != b.gloss) {
        Fail(ErrorCode::kConceptMismatch, "forms " + std::to_string(a.id) + " and " +
                                              std::to_string(b.id) + " differ in concept");
      }
      double value = 0.0;
      switch (metric) {
        case Metric::kCcm: value = CcmDistance(a, b); break;
        case Metric::kEditDistance: value = NormalizedLevenshtein(a.tokens, b.tokens); break;
        case Metric::kSca: value = ScaDistance(a.classes, b.classes, scheme); break;
      }
      matrix.Set(i, j, value);
    }
  }
  return matrix;
}

CognatePartition UpgmaFlatCluster(const DistanceMatrix &matrix, double threshold) {
  const size_t n = matrix.size();
  // Cluster slots are indexed by their lowest member; `alive` marks slots in use.
  std::vector<std::vector<size_t>> members(n);
  std::vector<bool> alive(n, true);
  std::vector<double> linkage(n * n);
  for (size_t i = 0; i < n; ++i) {
    members[i] = {i};
    for (size_t j = 0; j < n; ++j) linkage[i * n + j] = matrix(i, j);
  }
  for (size_t remaining = n; remaining > 1; --remaining) {
    size_t best_i = n, best_j = n;
    double best = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (size_t j = i + 1; j < n; ++j) {
        if (!alive[j]) continue;
        if (best_i == n || linkage[i * n + j] < best) {
          best = linkage[i * n + j];
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best > threshold) break;
    const double wi = static_cast<double>(members[best_i].size());
    const double wj = static_cast<double>(members[best_j].size());
    for (size_t k = 0; k < n; ++k) {
      if (!alive[k] || k == best_i || k == best_j) continue;
      const double merged = (wi * linkage[best_i * n + k] + wj * linkage[best_j * n + k]) / (wi + wj);
      linkage[best_i * n + k] = merged;
      linkage[k * n + best_i] = merged;
    }
    members[best_i].insert(members[best_i].end(), members[best_j].begin(),
                           members[best_j].end());
    members[best_j].clear();
    alive[best_j] = false;
  }
  CognatePartition partition;
  for (size_t slot = 0; slot < n; ++slot) {
    if (!alive[slot]) continue;
    for (size_t member : members[slot]) {
      partition.assignment[matrix.ids()[member]] = static_cast<int64_t>(slot) + 1;
    }
  }
  return Canonicalize(partition);
}

std::set<std::string> SkipGrams(std::string_view classes, size_t n) {
  if (n < 2) Fail(ErrorCode::kInvalidArgument, "skip-gram length must be >= 2");
  std::set<std::string> grams;
  if (classes.size() < n) {
    std::string padded(classes);
    padded.resize(n, '$');
    grams.insert(std::move(padded));
    return grams;
  }
  // Enumerate index combinations in lexicographic order.
  std::vector<size_t> pick(n);
  std::iota(pick.begin(), pick.end(), 0);
  const size_t length = classes.size();
  while (true) {
    std::string gram;
    gram.reserve(n);
    for (size_t index : pick) gram.push_back(classes[index]);
    grams.insert(std::move(gram));
    size_t k = n;
    while (k > 0 && pick[k - 1] == length - n + (k - 1)) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (size_t m = k; m < n; ++m) pick[m] = pick[m - 1] + 1;
  }
  return grams;
}

WordGraph::WordGraph(std::vector<int64_t> ids)
    : ids_(std::move(ids)), adjacency_(ids_.size()) {}

void WordGraph::AddWeight(size_t u, size_t v, double weight) {
  if (u == v) return;
  adjacency_[u][v] += weight;
  adjacency_[v][u] += weight;
}

BipartiteNet::BipartiteNet(const std::vector<WordForm> &forms, size_t gram_length) {
  std::vector<const WordForm *> ordered;
  for (const auto &form : forms) ordered.push_back(&form);
  std::sort(ordered.begin(), ordered.end(),
            [](const WordForm *a, const WordForm *b) { return a->id < b->id; });
  for (size_t w = 0; w < ordered.size(); ++w) {
    words_.push_back(ordered[w]->id);
    for (const auto &gram : SkipGrams(ordered[w]->classes, gram_length)) {
      grams_[gram].insert(w);
    }
  }
}

size_t BipartiteNet::EdgeCount() const {
  size_t edges = 0;
  for (const auto &[gram, linked] : grams_) edges += linked.size();
  return edges;
}

void BipartiteNet::PruneGrams(size_t min_degree) {
  std::erase_if(grams_, [min_degree](const auto &entry) {
    return entry.second.size() < min_degree;
  });
}

WordGraph BipartiteNet::Project() const {
  WordGraph graph(words_);
  for (const auto &[gram, linked] : grams_) {
    for (auto a = linked.begin(); a != linked.end(); ++a) {
      for (auto b = std::next(a); b != linked.end(); ++b) graph.AddWeight(*a, *b, 1.0);
    }
  }
  return graph;
}

namespace {

CognatePartition FromLabels(const WordGraph &graph, const std::vector<size_t> &labels) {
  CognatePartition partition;
  for (size_t u = 0; u < graph.size(); ++u) {
    partition.assignment[graph.ids()[u]] = static_cast<int64_t>(labels[u]) + 1;
  }
  return Canonicalize(partition);
}

}  // namespace

CognatePartition PartitionComponents(const WordGraph &graph) {
  std::vector<size_t> parent(graph.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](size_t u) {
    while (parent[u] != u) {
      parent[u] = parent[parent[u]];
      u = parent[u];
    }
    return u;
  };
  for (size_t u = 0; u < graph.size(); ++u) {
    for (const auto &[v, weight] : graph.Neighbors(u)) {
      const size_t ru = find(u), rv = find(v);
      if (ru != rv) parent[std::max(ru, rv)] = std::min(ru, rv);
    }
  }
  std::vector<size_t> labels(graph.size());
  for (size_t u = 0; u < graph.size(); ++u) labels[u] = find(u);
  return FromLabels(graph, labels);
}

CognatePartition PartitionLabelPropagation(const WordGraph &graph, uint64_t seed) {
  constexpr int kMaxSweeps = 100;
  Rng rng(seed);
  std::vector<size_t> labels(graph.size());
  std::iota(labels.begin(), labels.end(), 0);
  std::vector<size_t> order(labels);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    rng.Shuffle(order);
    bool changed = false;
    for (size_t u : order) {
      const auto &neighbors = graph.Neighbors(u);
      if (neighbors.empty()) continue;
      std::map<size_t, double> weight_by_label;
      for (const auto &[v, weight] : neighbors) weight_by_label[labels[v]] += weight;
      // std::map iterates labels ascending, so a strict comparison keeps the
      // smallest label among ties.
      size_t best_label = labels[u];
      double best_weight = -1.0;
      for (const auto &[label, weight] : weight_by_label) {
        if (weight > best_weight) {
          best_weight = weight;
          best_label = label;
        }
      }
      if (best_label != labels[u]) {
        labels[u] = best_label;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return FromLabels(graph, labels);
}

size_t PruneDegree(double prune, size_t forms_in_concept) {
  // Guard against products such as 0.2 * 15 landing a hair above an integer.
  return static_cast<size_t>(std::ceil(prune * static_cast<double>(forms_in_concept) - 1e-9));
}

CognatePartition BipSkipConcept(const std::vector<WordForm> &forms, const BipSkipParams &params) {
  if (!(params.prune >= 0.0 && params.prune < 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "prune threshold must lie in [0, 1)");
  }
  BipartiteNet net(forms, params.gram_length);
  if (params.prune > 0.0) net.PruneGrams(PruneDegree(params.prune, forms.size()));
  const WordGraph graph = net.Project();
  return params.partitioner == Partitioner::kComponents
             ? PartitionComponents(graph)
             : PartitionLabelPropagation(graph, params.seed);
}

double DefaultThreshold(DetectMethod method) {
  switch (method) {
    case DetectMethod::kCcm: return 0.5;
    case DetectMethod::kEditDistance: return 0.55;
    case DetectMethod::kSca: return 0.45;
    case DetectMethod::kBipSkip: return 0.0;
  }
  return 0.0;
}

namespace {

CognatePartition DetectConcept(const std::vector<WordForm> &forms, const DetectParams &params,
                               uint64_t concept_seed) {
  if (params.method == DetectMethod::kBipSkip) {
    BipSkipParams bip{params.gram_length, params.prune, params.partitioner, concept_seed};
    return BipSkipConcept(forms, bip);
  }
  const double threshold = params.threshold.value_or(DefaultThreshold(params.method));
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "clustering threshold must lie in (0, 1]");
  }
  const Metric metric = params.method == DetectMethod::kCcm           ? Metric::kCcm
                        : params.method == DetectMethod::kEditDistance ? Metric::kEditDistance
                                                                       : Metric::kSca;
  return UpgmaFlatCluster(PairwiseMatrix(forms, metric, params.scheme), threshold);
}

}  // namespace

CognatePartition Detect(const Wordlist &wordlist, const DetectParams &params) {
  params.scheme.Validate();
  std::vector<std::string> concepts;
  for (const auto &[gloss, ids] : wordlist.index()) concepts.push_back(gloss);

  std::vector<CognatePartition> results(concepts.size());
  auto run = [&](size_t c) {
    results[c] = DetectConcept(wordlist.FormsOfConcept(concepts[c]), params,
                               DeriveSeed(params.seed, c));
  };
  const size_t jobs = std::max<size_t>(1, std::min(params.jobs, concepts.size()));
  if (jobs == 1) {
    for (size_t c = 0; c < concepts.size(); ++c) run(c);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> workers;
    for (size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (size_t c = next++; c < concepts.size(); c = next++) run(c);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto &worker : workers) worker.join();
    for (auto &error : errors) {
      if (error) std::rethrow_exception(error);
    }
  }

  CognatePartition merged;
  int64_t offset = 0;
  for (const auto &local : results) {
    int64_t largest = 0;
    for (const auto &[id, cluster] : local.assignment) {
      merged.assignment[id] = offset + cluster;
      largest = std::max(largest, cluster);
    }
    offset += largest;
  }
  return merged;
}

CognatePartition BipSkipDetect(const Wordlist &wordlist, const BipSkipParams &params) {
  DetectParams detect;
  detect.method = DetectMethod::kBipSkip;
  detect.gram_length = params.gram_length;
  detect.prune = params.prune;
  detect.partitioner = params.partitioner;
  detect.seed = params.seed;
  return Detect(wordlist, detect);
}

}  // namespace lexiphy
