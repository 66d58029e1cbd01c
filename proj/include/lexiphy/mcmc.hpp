#pragma once

// Annealed Metropolis-Hastings over (topology, branch lengths, substitution
// parameters). The temperature starts at t0, cools geometrically and then
// stays at 1, where the chain is an ordinary posterior sampler.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lexiphy/phylo.hpp"
#include "lexiphy/random.hpp"
#include "lexiphy/tree.hpp"

namespace lexiphy {

struct ChainConfig {
  double t0 = 50.0;
  double cooling = 0.999;
  size_t max_iters = 50000;
  // Stop once the best log posterior has not improved for this many
  // iterations at temperature 1.
  size_t stop_window = 2000;
  uint64_t seed = 42;

  // Priors: Exponential(branch_rate) branch lengths, Uniform(pi1_min, pi1_max)
  // on pi1, Exponential(mu_rate) on mu. Topologies are uniform.
  double branch_rate = 10.0;
  double pi1_min = 0.0;
  double pi1_max = 1.0;
  double mu_rate = 1.0;

  // Move mixture; zero weights freeze the corresponding component.
  double weight_nni = 0.4;
  double weight_branch = 0.4;
  double weight_params = 0.2;
  double scale_tuning = 1.0;
  double pi1_window = 0.1;
  double log_mu_window = 0.5;

  double initial_branch_length = 0.1;
  size_t trace_every = 10;
  size_t consensus_every = 10;
  // Recompute the posterior from scratch every N iterations and compare it
  // with the cached value; 0 disables.
  size_t verify_every = 0;
  // Count rooted topologies visited at temperature 1.
  bool record_topologies = false;

  // Throws InvalidArgument.
  void Validate() const;
};

struct McmcState {
  PhyloTree tree;
  SubstParams params;
  double log_likelihood = 0.0;
  double log_prior = 0.0;
  double temperature = 1.0;

  double log_posterior() const { return log_likelihood + log_prior; }
};

double BranchLengthLogPrior(const PhyloTree &tree, double rate);
// Sum of log prior densities; -inf outside the support.
double LogPrior(const PhyloTree &tree, const SubstParams &params, const ChainConfig &config);

// Branches whose lower end is a non-root internal node; each supports two
// nearest-neighbour interchanges.
std::vector<NodeId> InternalEdges(const PhyloTree &tree);
// Swaps the sibling of `edge` with child `which` (0 or 1) of `edge`.
PhyloTree ApplyNni(const PhyloTree &tree, NodeId edge, int which);
// Uniform edge, uniform swap. Symmetric, so the log Hastings ratio is 0.
// Throws NoInternalEdge for trees with fewer than 3 leaves.
PhyloTree ProposeNni(const PhyloTree &tree, Rng &rng);

// Multiplies the branch above `node` by c = exp(tuning (u - 0.5)); returns the
// new tree and log c, the log Hastings ratio.
std::pair<PhyloTree, double> ScaleBranch(const PhyloTree &tree, NodeId node, double u,
                                         double tuning);
std::pair<PhyloTree, double> ProposeScaleBranch(const PhyloTree &tree, Rng &rng, double tuning);

// Folds x back into [0, 1] by reflection at both ends.
double ReflectUnit(double x);
// pi1 moves by a reflected step, mu by a step on the log scale. The returned
// log Hastings ratio is log(mu'/mu), the Jacobian of the log-scale walk.
std::pair<SubstParams, double> ShiftParams(const SubstParams &params, double pi1_step,
                                           double log_mu_step);
std::pair<SubstParams, double> ProposeParams(const SubstParams &params, Rng &rng,
                                             double pi1_window, double log_mu_window);

// Metropolis-Hastings test with tempering: accept when
// log(u) < delta / temperature + log_hastings.
bool AcceptProposal(double delta_log_posterior, double log_hastings, double temperature,
                    double u);

enum class MoveKind { kNni, kBranch, kParams };

struct StepOutcome {
  MoveKind move = MoveKind::kNni;
  bool accepted = false;
};

// One proposal at `state.temperature`; updates `state` (cache included) on
// acceptance. Throws NumericError on a NaN posterior.
StepOutcome MhStep(McmcState &state, const LikelihoodEngine &engine, const ChainConfig &config,
                   Rng &rng);

struct TraceRecord {
  size_t iteration = 0;
  double log_posterior = 0.0;
  std::string newick;
  double pi1 = 0.0;
  double mu = 0.0;
  double temperature = 1.0;
  bool accepted = false;
};

struct Trace {
  std::vector<TraceRecord> records;
};

// `iter,logpost,temperature,pi1,mu,accepted`
std::string FormatTraceCsv(const Trace &trace);

struct ChainResult {
  Trace trace;
  PhyloTree map_tree;
  SubstParams map_params;
  double map_log_posterior = 0.0;
  PhyloTree consensus_tree;
  size_t iterations = 0;
  // First iteration run at temperature 1 (0 if never reached).
  size_t annealing_end = 0;
  size_t accepted = 0;
  size_t consensus_samples = 0;
  double seconds = 0.0;
  std::map<std::string, size_t> topology_visits;
};

// Majority-rule consensus: clades present in more than half of the trees,
// branch lengths averaged over the trees containing the clade, supports set to
// clade frequencies.
PhyloTree MajorityRuleConsensus(const std::vector<PhyloTree> &trees);

// Seeded random starting topology, all branches `initial_branch_length`,
// pi1 = matrix mean, mu = 1. Throws TooFewLanguages below 3 languages.
McmcState InitialState(const CharacterMatrix &matrix, const ChainConfig &config,
                       const LikelihoodEngine &engine);

ChainResult RunChain(const CharacterMatrix &matrix, const ChainConfig &config);

// Independent chains (e.g. a sweep over t0), run on up to `jobs` threads.
// Results keep the order of `configs`.
std::vector<ChainResult> RunChains(const CharacterMatrix &matrix,
                                   const std::vector<ChainConfig> &configs, size_t jobs);
// Index of the chain with the highest MAP posterior (first on ties).
size_t BestChain(const std::vector<ChainResult> &results);

}  // namespace lexiphy
