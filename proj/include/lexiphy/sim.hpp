#pragma once

// Forward simulation of trees and binary character matrices, used to
// validate the likelihood and the sampler end to end.

#include <cstdint>
#include <string>
#include <vector>

#include "lexiphy/phylo.hpp"
#include "lexiphy/random.hpp"
#include "lexiphy/tree.hpp"

namespace lexiphy {

struct SimConfig {
  size_t n_languages = 6;
  size_t n_columns = 200;
  SubstParams params{0.3, 1.0};
  double branch_rate = 5.0;  // Exponential rate of branch lengths
  uint64_t seed = 7;
};

// "L1".."Ln", zero-padded so that lexical and numeric order agree.
std::vector<std::string> LanguageNames(size_t n);

// Uniform rooted binary topology by stepwise addition: each new leaf lands on
// one of the 2k-3 branches (the root branch included) uniformly. Branch
// lengths are Exponential(rate).
PhyloTree RandomTree(const std::vector<std::string> &labels, double rate, Rng &rng);

// Root state ~ Bernoulli(pi1), children drawn from the transition matrix.
// Column c uses its own stream DeriveSeed(seed, c).
CharacterMatrix EvolveMatrix(const PhyloTree &tree, const SubstParams &params, size_t n_columns,
                             uint64_t seed);

struct Simulation {
  PhyloTree tree;
  CharacterMatrix matrix;
};

Simulation Simulate(const SimConfig &config);

}  // namespace lexiphy
