#include "lexiphy/mcmc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "lexiphy/error.hpp"
#include "lexiphy/sim.hpp"

namespace lexiphy {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

void ChainConfig::Validate() const {
  auto require = [](bool ok, const char *what) {
    if (!ok) Fail(ErrorCode::kInvalidArgument, what);
  };
  require(t0 >= 1.0 && std::isfinite(t0), "t0 must be >= 1");
  require(cooling > 0.0 && cooling <= 1.0, "cooling factor must lie in (0, 1]");
  require(max_iters > 0, "max_iters must be positive");
  require(stop_window > 0, "stop_window must be positive");
  require(branch_rate > 0.0 && mu_rate > 0.0, "prior rates must be positive");
  require(pi1_min >= 0.0 && pi1_min < pi1_max && pi1_max <= 1.0, "pi1 prior bounds must satisfy 0 <= min < max <= 1");
  require(weight_nni >= 0.0 && weight_branch >= 0.0 && weight_params >= 0.0 &&
              weight_nni + weight_branch + weight_params > 0.0,
          "move weights must be non-negative with a positive sum");
  require(scale_tuning > 0.0 && pi1_window > 0.0 && log_mu_window > 0.0,
          "proposal tuning values must be positive");
  require(initial_branch_length > 0.0, "initial branch length must be positive");
  require(trace_every > 0 && consensus_every > 0, "sampling intervals must be positive");
}

double BranchLengthLogPrior(const PhyloTree &tree, double rate) {
  double total = 0.0;
  for (NodeId id : tree.Preorder()) {
    if (id == tree.root()) continue;
    const double length = tree.node(id).length;
    if (!(length > 0.0)) return kNegInf;
    total += std::log(rate) - rate * length;
  }
  return total;
}

double LogPrior(const PhyloTree &tree, const SubstParams &params, const ChainConfig &config) {
  if (!(params.pi1 > config.pi1_min && params.pi1 < config.pi1_max)) return kNegInf;
  if (!(params.mu > 0.0) || !std::isfinite(params.mu)) return kNegInf;
  const double branches = BranchLengthLogPrior(tree, config.branch_rate);
  if (branches == kNegInf) return kNegInf;
  return branches - std::log(config.pi1_max - config.pi1_min) + std::log(config.mu_rate) -
         config.mu_rate * params.mu;
}

std::vector<NodeId> InternalEdges(const PhyloTree &tree) {
  std::vector<NodeId> edges;
  for (NodeId id : tree.Preorder()) {
    if (id != tree.root() && !tree.IsLeaf(id)) edges.push_back(id);
  }
  return edges;
}

PhyloTree ApplyNni(const PhyloTree &tree, NodeId edge, int which) {
  if (edge == tree.root() || tree.IsLeaf(edge)) {
    Fail(ErrorCode::kNoInternalEdge, "NNI needs a non-root internal node");
  }
  PhyloTree out = tree;
  const NodeId parent = tree.node(edge).parent;
  const auto &siblings = tree.node(parent).children;
  const auto &below = tree.node(edge).children;
  if (siblings.size() != 2 || below.size() != 2 || (which != 0 && which != 1)) {
    Fail(ErrorCode::kInvalidArgument, "NNI requires a binary neighbourhood");
  }
  const NodeId sibling = siblings[0] == edge ? siblings[1] : siblings[0];
  const NodeId moved = below[static_cast<size_t>(which)];
  auto &parent_children = out.mutable_node(parent).children;
  std::replace(parent_children.begin(), parent_children.end(), sibling, moved);
  auto &edge_children = out.mutable_node(edge).children;
  std::replace(edge_children.begin(), edge_children.end(), moved, sibling);
  out.mutable_node(moved).parent = parent;
  out.mutable_node(sibling).parent = edge;
  return out;
}

PhyloTree ProposeNni(const PhyloTree &tree, Rng &rng) {
  const auto edges = InternalEdges(tree);
  if (edges.empty()) Fail(ErrorCode::kNoInternalEdge, "tree has no internal edge");
  const NodeId edge = edges[rng.Index(edges.size())];
  return ApplyNni(tree, edge, static_cast<int>(rng.Index(2)));
}

std::pair<PhyloTree, double> ScaleBranch(const PhyloTree &tree, NodeId node, double u,
                                         double tuning) {
  if (node == tree.root()) Fail(ErrorCode::kInvalidArgument, "the root has no branch");
  const double log_factor = tuning * (u - 0.5);
  PhyloTree out = tree;
  out.mutable_node(node).length *= std::exp(log_factor);
  return {std::move(out), log_factor};
}

std::pair<PhyloTree, double> ProposeScaleBranch(const PhyloTree &tree, Rng &rng, double tuning) {
  std::vector<NodeId> branches;
  for (NodeId id : tree.Preorder()) {
    if (id != tree.root()) branches.push_back(id);
  }
  const NodeId node = branches[rng.Index(branches.size())];
  return ScaleBranch(tree, node, rng.Uniform(), tuning);
}

double ReflectUnit(double x) {
  double folded = std::fmod(x, 2.0);
  if (folded < 0.0) folded += 2.0;
  return folded > 1.0 ? 2.0 - folded : folded;
}

std::pair<SubstParams, double> ShiftParams(const SubstParams &params, double pi1_step,
                                           double log_mu_step) {
  SubstParams out;
  out.pi1 = ReflectUnit(params.pi1 + pi1_step);
  out.mu = params.mu * std::exp(log_mu_step);
  return {out, log_mu_step};
}

std::pair<SubstParams, double> ProposeParams(const SubstParams &params, Rng &rng,
                                             double pi1_window, double log_mu_window) {
  const double pi1_step = pi1_window * (rng.Uniform() - 0.5);
  const double log_mu_step = log_mu_window * (rng.Uniform() - 0.5);
  return ShiftParams(params, pi1_step, log_mu_step);
}

bool AcceptProposal(double delta_log_posterior, double log_hastings, double temperature,
                    double u) {
  if (delta_log_posterior == kNegInf) return false;
  const double log_ratio = delta_log_posterior / temperature + log_hastings;
  if (log_ratio >= 0.0) return true;
  return std::log(u) < log_ratio;
}

StepOutcome MhStep(McmcState &state, const LikelihoodEngine &engine, const ChainConfig &config,
                   Rng &rng) {
  StepOutcome outcome;
  const double total = config.weight_nni + config.weight_branch + config.weight_params;
  const double pick = rng.Uniform() * total;
  if (pick < config.weight_nni) {
    outcome.move = MoveKind::kNni;
  } else if (pick < config.weight_nni + config.weight_branch) {
    outcome.move = MoveKind::kBranch;
  } else {
    outcome.move = MoveKind::kParams;
  }

  PhyloTree tree;
  SubstParams params = state.params;
  double log_hastings = 0.0;
  bool tree_changed = true;
  switch (outcome.move) {
    case MoveKind::kNni:
      tree = ProposeNni(state.tree, rng);
      break;
    case MoveKind::kBranch:
      std::tie(tree, log_hastings) = ProposeScaleBranch(state.tree, rng, config.scale_tuning);
      break;
    case MoveKind::kParams:
      std::tie(params, log_hastings) =
          ProposeParams(state.params, rng, config.pi1_window, config.log_mu_window);
      tree_changed = false;
      break;
  }
  const PhyloTree &candidate = tree_changed ? tree : state.tree;
  const double log_prior = LogPrior(candidate, params, config);
  double log_likelihood = kNegInf;
  if (log_prior != kNegInf) log_likelihood = engine.LogLikelihood(candidate, params);
  const double proposed = log_prior + log_likelihood;
  if (std::isnan(proposed)) Fail(ErrorCode::kNumeric, "posterior evaluated to NaN");

  const double delta = proposed - state.log_posterior();
  outcome.accepted = AcceptProposal(delta, log_hastings, state.temperature, rng.Uniform());
  if (outcome.accepted) {
    if (tree_changed) state.tree = std::move(tree);
    state.params = params;
    state.log_prior = log_prior;
    state.log_likelihood = log_likelihood;
  }
  return outcome;
}

std::string FormatTraceCsv(const Trace &trace) {
  std::ostringstream out;
  out << "iter,logpost,temperature,pi1,mu,accepted\n";
  for (const auto &record : trace.records) {
    out << record.iteration << ',' << FormatDouble(record.log_posterior) << ','
        << FormatDouble(record.temperature) << ',' << FormatDouble(record.pi1) << ','
        << FormatDouble(record.mu) << ',' << (record.accepted ? 1 : 0) << '\n';
  }
  return out.str();
}

PhyloTree MajorityRuleConsensus(const std::vector<PhyloTree> &trees) {
  if (trees.empty()) Fail(ErrorCode::kInvalidArgument, "consensus of zero trees");
  const auto labels = trees.front().LeafLabels();
  struct CladeStats {
    size_t count = 0;
    double length_sum = 0.0;
  };
  std::map<LeafSet, CladeStats> clades;
  for (const auto &tree : trees) {
    if (tree.LeafLabels() != labels) {
      Fail(ErrorCode::kLeafSetMismatch, "consensus input trees differ in leaf set");
    }
    const auto sets = CladeSets(tree, labels);
    for (NodeId id : tree.Preorder()) {
      if (id == tree.root()) continue;
      auto &stats = clades[sets[static_cast<size_t>(id)]];
      ++stats.count;
      stats.length_sum += tree.node(id).length;
    }
  }
  std::vector<std::pair<LeafSet, CladeStats>> kept;
  for (const auto &[clade, stats] : clades) {
    if (2 * stats.count > trees.size() && clade.count() < labels.size()) kept.emplace_back(clade, stats);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto &a, const auto &b) {
    return a.first.count() > b.first.count();
  });

  PhyloTree out;
  const NodeId root = out.AddNode();
  out.SetRoot(root);
  std::vector<std::pair<LeafSet, NodeId>> placed = {{LeafSet(labels.size()).set(), root}};
  for (const auto &[clade, stats] : kept) {
    NodeId parent = root;
    size_t parent_size = labels.size() + 1;
    for (const auto &[other, node] : placed) {
      if (clade.is_subset_of(other) && other.count() < parent_size) {
        parent = node;
        parent_size = other.count();
      }
    }
    std::string label;
    if (clade.count() == 1) label = labels[clade.find_first()];
    const NodeId node = out.AddNode(label, stats.length_sum / static_cast<double>(stats.count));
    if (clade.count() > 1) {
      out.mutable_node(node).support =
          static_cast<double>(stats.count) / static_cast<double>(trees.size());
    }
    out.AddChild(parent, node);
    placed.emplace_back(clade, node);
  }
  return CanonicalOrder(out);
}

McmcState InitialState(const CharacterMatrix &matrix, const ChainConfig &config,
                       const LikelihoodEngine &engine) {
  if (matrix.LanguageCount() < 3) {
    Fail(ErrorCode::kTooFewLanguages, "inference needs at least 3 languages");
  }
  Rng rng(DeriveSeed(config.seed, 0));
  McmcState state;
  state.tree = RandomTree(matrix.languages(), 1.0, rng);
  for (NodeId id : state.tree.Preorder()) {
    if (id != state.tree.root()) state.tree.mutable_node(id).length = config.initial_branch_length;
  }
  const double lo = std::max(config.pi1_min, 0.0) + 1e-3;
  const double hi = std::min(config.pi1_max, 1.0) - 1e-3;
  state.params.pi1 = std::clamp(matrix.Mean(), lo, hi);
  state.params.mu = 1.0;
  state.log_prior = LogPrior(state.tree, state.params, config);
  state.log_likelihood = engine.LogLikelihood(state.tree, state.params);
  state.temperature = config.t0;
  return state;
}

ChainResult RunChain(const CharacterMatrix &matrix, const ChainConfig &config) {
  config.Validate();
  const auto start = std::chrono::steady_clock::now();
  const LikelihoodEngine engine(matrix);
  McmcState state = InitialState(matrix, config, engine);
  if (!std::isfinite(state.log_posterior())) {
    Fail(ErrorCode::kNumeric, "initial posterior is not finite");
  }
  Rng rng(DeriveSeed(config.seed, 1));

  ChainResult result;
  result.map_tree = state.tree;
  result.map_params = state.params;
  result.map_log_posterior = state.log_posterior();

  std::vector<PhyloTree> samples;
  size_t since_improvement = 0;
  size_t post_annealing = 0;
  double temperature = config.t0;
  for (size_t iteration = 1; iteration <= config.max_iters; ++iteration) {
    state.temperature = temperature;
    const StepOutcome outcome = MhStep(state, engine, config, rng);
    result.iterations = iteration;
    if (outcome.accepted) ++result.accepted;

    const bool settled = temperature == 1.0;
    if (state.log_posterior() > result.map_log_posterior) {
      result.map_log_posterior = state.log_posterior();
      result.map_tree = state.tree;
      result.map_params = state.params;
      since_improvement = 0;
    } else if (settled) {
      ++since_improvement;
    }
    if (settled) {
      if (result.annealing_end == 0) result.annealing_end = iteration;
      if (post_annealing % config.consensus_every == 0) samples.push_back(state.tree);
      ++post_annealing;
      if (config.record_topologies) ++result.topology_visits[TopologyKey(state.tree)];
    }
    if (iteration % config.trace_every == 0) {
      result.trace.records.push_back({iteration, state.log_posterior(), EmitNewick(state.tree),
                                      state.params.pi1, state.params.mu, temperature,
                                      outcome.accepted});
    }
    if (config.verify_every > 0 && iteration % config.verify_every == 0) {
      const double fresh = LogPrior(state.tree, state.params, config) +
                           engine.LogLikelihood(state.tree, state.params);
      if (std::abs(fresh - state.log_posterior()) > 1e-9 * std::max(1.0, std::abs(fresh))) {
        Fail(ErrorCode::kNumeric, "cached posterior drifted from recomputation");
      }
    }
    if (settled && since_improvement >= config.stop_window) break;
    temperature = std::max(1.0, config.cooling * temperature);
  }

  result.consensus_samples = samples.size();
  if (samples.empty()) {
    result.consensus_tree = CanonicalOrder(result.map_tree);
    for (NodeId id : result.consensus_tree.Preorder()) {
      if (!result.consensus_tree.IsLeaf(id) && id != result.consensus_tree.root()) {
        result.consensus_tree.mutable_node(id).support = 1.0;
      }
    }
  } else {
    result.consensus_tree = MajorityRuleConsensus(samples);
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<ChainResult> RunChains(const CharacterMatrix &matrix,
                                   const std::vector<ChainConfig> &configs, size_t jobs) {
  std::vector<ChainResult> results(configs.size());
  const size_t workers_wanted = std::max<size_t>(1, std::min(jobs, configs.size()));
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(workers_wanted);
  auto work = [&](size_t w) {
    try {
      for (size_t i = next++; i < configs.size(); i = next++) results[i] = RunChain(matrix, configs[i]);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers_wanted == 1) {
    work(0);
  } else {
    std::vector<std::thread> workers;
    for (size_t w = 0; w < workers_wanted; ++w) workers.emplace_back(work, w);
    for (auto &worker : workers) worker.join();
  }
  for (auto &error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return results;
}

size_t BestChain(const std::vector<ChainResult> &results) {
  if (results.empty()) Fail(ErrorCode::kInvalidArgument, "no chains");
  size_t best = 0;
  for (size_t i = 1; i < results.size(); ++i) {
    if (results[i].map_log_posterior > results[best].map_log_posterior) best = i;
  }
  return best;
}

}  // namespace lexiphy
