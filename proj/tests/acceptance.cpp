// Acceptance suite: one PASS/FAIL line per criterion. AC10 is informational
// and does not affect the exit status.
//
//   acceptance [--cli PATH --workdir DIR] [--only N]

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lexiphy/align.hpp"
#include "lexiphy/cognate.hpp"
#include "lexiphy/eval.hpp"
#include "lexiphy/ingest.hpp"
#include "lexiphy/mcmc.hpp"
#include "lexiphy/phylo.hpp"
#include "lexiphy/sim.hpp"
#include "lexiphy/tsv.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace lexiphy;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Options {
  std::string cli;
  fs::path workdir = fs::temp_directory_path() / "lexiphy_acceptance";
  int only = 0;
};

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Num(double value, int digits = 4) {
  std::ostringstream out;
  out.precision(digits);
  out << value;
  return out.str();
}

CharacterMatrix RandomMatrix(const std::vector<std::string> &languages, size_t columns, Rng &rng) {
  std::vector<uint8_t> cells(languages.size() * columns);
  for (auto &cell : cells) cell = rng.Bernoulli(0.4) ? 1 : 0;
  std::vector<std::string> ids;
  for (size_t c = 0; c < columns; ++c) ids.push_back("c" + std::to_string(c + 1));
  return CharacterMatrix(languages, ids, cells);
}

CognatePartition FromLabels(const std::vector<int> &labels) {
  CognatePartition partition;
  for (size_t i = 0; i < labels.size(); ++i) partition.assignment[static_cast<int64_t>(i + 1)] = labels[i];
  return partition;
}

Outcome Ac1() {
  const auto start = Clock::now();
  Rng rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto labels = LanguageNames(2 + rng.Index(5));
    const PhyloTree tree = RandomTree(labels, 3.0, rng);
    const auto matrix = RandomMatrix(labels, 3, rng);
    const SubstParams p{0.05 + 0.9 * rng.Uniform(), 0.2 + 2.0 * rng.Uniform()};
    const double fast = PruningLogLikelihood(tree, matrix, p);
    const double slow = oracle::ExhaustiveLogLikelihood(tree, matrix, p);
    worst = std::max(worst, std::abs(fast - slow) / std::abs(slow));
  }
  const double seconds = Since(start);
  return {worst < 1e-9 && seconds < 5.0,
          "max relative error " + Num(worst, 3) + " over 50 instances, " + Num(seconds, 3) + " s"};
}

Outcome Ac2() {
  std::string detail;
  bool pass = true;
  for (unsigned n = 2; n <= 7; ++n) {
    const auto formula = TopologyCount(n);
    const size_t enumerated = oracle::RootedTopologyStrings(LanguageNames(n)).size();
    pass = pass && formula == enumerated;
    detail += (n > 2 ? " " : "") + std::string("n=") + std::to_string(n) + ":" + formula.str() + "/" +
              std::to_string(enumerated);
  }
  return {pass, "formula/enumeration " + detail};
}

Outcome Ac3() {
  const auto start = Clock::now();
  SimConfig sim_config;
  sim_config.n_languages = 4;
  sim_config.n_columns = 40;
  sim_config.seed = 3;
  const Simulation sim = Simulate(sim_config);

  ChainConfig config;
  config.t0 = 10.0;
  config.cooling = 0.99;
  config.weight_nni = 1.0;
  config.weight_branch = 0.0;
  config.weight_params = 0.0;
  config.initial_branch_length = 0.1;
  config.max_iters = 200000 + 300;
  config.stop_window = config.max_iters;
  config.record_topologies = true;
  config.seed = 5;
  const ChainResult result = RunChain(sim.matrix, config);

  // Frozen state: every topology carries the same branch lengths and
  // parameters, so the prior is flat and the posterior is the normalized
  // likelihood.
  const LikelihoodEngine engine(sim.matrix);
  const SubstParams params = InitialState(sim.matrix, config, engine).params;
  std::map<std::string, double> log_post;
  double top = -std::numeric_limits<double>::infinity();
  for (const auto &tree : oracle::RootedTopologies(sim.matrix.languages(), 0.1)) {
    const double value = PruningLogLikelihood(tree, sim.matrix, params);
    log_post[TopologyKey(tree)] = value;
    top = std::max(top, value);
  }
  double norm = 0.0;
  for (const auto &[key, value] : log_post) norm += std::exp(value - top);
  size_t visits = 0;
  for (const auto &[key, count] : result.topology_visits) visits += count;
  double tv = 0.0;
  for (const auto &[key, value] : log_post) {
    const auto it = result.topology_visits.find(key);
    const double freq = it == result.topology_visits.end() ? 0.0 : static_cast<double>(it->second) / visits;
    tv += std::abs(freq - std::exp(value - top) / norm);
  }
  tv *= 0.5;
  const double seconds = Since(start);
  return {log_post.size() == 15 && visits >= 200000 && tv <= 0.03 && seconds < 120.0,
          "TV " + Num(tv, 3) + " over 15 topologies, " + std::to_string(visits) +
              " post-annealing iterations, " + Num(seconds, 3) + " s"};
}

Outcome Ac4() {
  size_t recovered = 0;
  double slowest = 0.0;
  std::string misses;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    SimConfig sim_config;  // 6 languages, 200 columns, pi1 0.3, mu 1
    sim_config.seed = seed;
    const Simulation sim = Simulate(sim_config);
    ChainConfig config;
    config.t0 = 50.0;
    config.seed = seed;
    const ChainResult result = RunChain(sim.matrix, config);
    slowest = std::max(slowest, result.seconds);
    const auto report = Gqd(result.map_tree, sim.tree);
    if (report.gqd == 0.0) {
      ++recovered;
    } else {
      misses += " seed" + std::to_string(seed) + ":" + Num(report.gqd, 3);
    }
  }
  return {recovered >= 18 && slowest < 60.0,
          std::to_string(recovered) + "/20 seeds with GQD 0, slowest run " + Num(slowest, 3) + " s" +
              (misses.empty() ? "" : ";" + misses)};
}

Outcome Ac5() {
  bool pass = true;
  const auto gold4 = FromLabels({1, 1, 1, 1});
  const auto a = Bcubed(gold4, gold4);
  pass = pass && a.precision == 1.0 && a.recall == 1.0 && a.fscore == 1.0;
  const auto b = Bcubed(FromLabels({1, 2, 3, 4}), gold4);
  pass = pass && b.precision == 1.0 && b.recall == 0.25;
  const auto c = Bcubed(gold4, FromLabels({1, 1, 2, 2}));
  pass = pass && c.precision == 0.5 && c.recall == 1.0 && std::abs(c.fscore - 2.0 / 3.0) < 1e-15;
  return {pass, "identity F=" + Num(a.fscore) + ", singletons P=" + Num(b.precision) + " R=" +
                    Num(b.recall) + ", lumped P=" + Num(c.precision) + " R=" + Num(c.recall) +
                    " F=" + Num(c.fscore)};
}

Outcome Ac6() {
  const PhyloTree ab_cd = ParseNewick("((A,B),(C,D));");
  const double identity = Gqd(ab_cd, ab_cd).gqd;
  const double single = Gqd(ParseNewick("((A,C),(B,D));"), ab_cd).gqd;
  Rng rng(606);
  size_t agree = 0;
  const size_t trials = 100;
  const auto labels = LanguageNames(5);
  for (size_t t = 0; t < trials; ++t) {
    const PhyloTree gold = RandomTree(labels, 1.0, rng);
    const PhyloTree inferred = ProposeNni(gold, rng);
    uint64_t shared = 0, resolved = 0;
    for (size_t skip = 0; skip < 5; ++skip) {
      std::array<std::string, 4> q;
      for (size_t i = 0, k = 0; i < 5; ++i)
        if (i != skip) q[k++] = labels[i];
      const int truth = oracle::FourPointQuartet(gold, q);
      if (truth == 3) continue;
      ++resolved;
      shared += oracle::FourPointQuartet(inferred, q) == truth;
    }
    const auto report = Gqd(inferred, gold);
    agree += report.gold_resolved == resolved && report.shared == shared &&
             report.gqd == static_cast<double>(resolved - shared) / static_cast<double>(resolved);
  }
  return {identity == 0.0 && single == 1.0 && agree == trials,
          "identity " + Num(identity) + ", single quartet " + Num(single) + ", 5-leaf NNI " +
              std::to_string(agree) + "/" + std::to_string(trials) + " match the oracle"};
}

Outcome Ac7() {
  static const Tokens alphabet = {"a", "t", "k", "tʰ", "ə", "ŋ"};
  Rng rng(707);
  auto draw = [&] {
    Tokens out(rng.Index(9));
    for (auto &token : out) token = alphabet[rng.Index(alphabet.size())];
    return out;
  };
  size_t mismatches = 0, axiom_failures = 0;
  const size_t pairs = 10000;
  for (size_t i = 0; i < pairs; ++i) {
    const Tokens a = draw(), b = draw(), c = draw();
    const size_t ab = Levenshtein(a, b);
    mismatches += ab != oracle::RecursiveEditDistance(a, b);
    const bool ok = Levenshtein(a, a) == 0 && (ab == 0) == (a == b) && ab == Levenshtein(b, a) &&
                    Levenshtein(a, c) <= ab + Levenshtein(b, c);
    axiom_failures += !ok;
  }
  return {mismatches == 0 && axiom_failures == 0,
          std::to_string(pairs) + " pairs, " + std::to_string(mismatches) + " oracle mismatches, " +
              std::to_string(axiom_failures) + " metric-axiom failures"};
}

std::string Quote(const fs::path &path) { return "'" + path.string() + "'"; }

int Shell(const fs::path &dir, const std::string &command) {
  const std::string line = "cd " + Quote(dir) + " && " + command + " > output.log 2>&1";
  return std::system(line.c_str());
}

bool SameBytes(const fs::path &a, const fs::path &b) {
  if (!fs::exists(a) || !fs::exists(b)) return false;
  return ReadTextFile(a) == ReadTextFile(b);
}

Outcome Ac8(const Options &options) {
  const fs::path wordlist = fs::path(LEXIPHY_DATA_DIR) / "toy_wordlist.tsv";
  if (options.cli.empty()) {
    // Library-level pipeline only.
    auto pipeline = [&] {
      const Wordlist list = LoadWordlist(wordlist, SoundClassModel::Builtin());
      DetectParams params;
      params.seed = 3;
      const auto matrix = BuildMatrix(Detect(list, params), list);
      ChainConfig config;
      config.max_iters = 5000;
      const auto result = RunChain(matrix, config);
      return FormatMatrix(matrix) + FormatTraceCsv(result.trace) + EmitNewick(result.map_tree) +
             EmitNewick(result.consensus_tree, {true, true});
    };
    const bool same = pipeline() == pipeline();
    return {same, "library pipeline run twice (no CLI given)"};
  }
  const std::string cli = Quote(fs::absolute(options.cli));
  const std::vector<std::string> steps = {
      "detect --wordlist " + Quote(wordlist) + " --method bipskip --partitioner labelprop --seed 11 --out pred.tsv",
      "matrix --wordlist pred.tsv --out matrix.tsv",
      "infer --matrix matrix.tsv --t0 20 50 --seed 5 --max-iters 20000 --jobs 2 --out-prefix run",
      "simulate --languages 6 --columns 200 --seed 9 --out-matrix sim.tsv --out-tree sim.nwk",
      "infer --matrix sim.tsv --t0 50 --seed 9 --max-iters 20000 --out-prefix simrun"};
  const std::vector<std::string> outputs = {"pred.tsv",     "matrix.tsv",    "run.trace.csv",
                                            "run.map.nwk",  "run.consensus.nwk", "sim.tsv",
                                            "sim.nwk",      "simrun.trace.csv",  "simrun.map.nwk",
                                            "simrun.consensus.nwk"};
  const std::vector<std::string> manifests = {"pred.tsv", "matrix.tsv", "run", "sim.tsv", "simrun"};
  const fs::path first = options.workdir / "ac8_first", second = options.workdir / "ac8_second",
                 replay = options.workdir / "ac8_replay";
  for (const auto &dir : {first, second, replay}) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  for (const auto &dir : {first, second}) {
    for (const auto &step : steps) {
      if (Shell(dir, cli + " " + step) != 0) return {false, "pipeline step failed: " + step};
    }
  }
  for (const auto &base : manifests) {
    const std::string name = base + ".manifest.json";
    fs::copy_file(first / name, replay / name);
    if (Shell(replay, cli + " replay " + name) != 0) return {false, "replay failed: " + name};
  }
  size_t identical = 0;
  std::string differing;
  for (const auto &name : outputs) {
    if (SameBytes(first / name, second / name) && SameBytes(first / name, replay / name)) {
      ++identical;
    } else {
      differing += " " + name;
    }
  }
  return {identical == outputs.size(),
          std::to_string(identical) + "/" + std::to_string(outputs.size()) +
              " outputs byte-identical across two runs and a manifest replay" +
              (differing.empty() ? "" : "; differing:" + differing)};
}

Outcome Ac9() {
  const Wordlist wordlist =
      LoadWordlist(fs::path(LEXIPHY_DATA_DIR) / "toy_wordlist.tsv", SoundClassModel::Builtin());
  CognatePartition gold;
  for (const auto &form : wordlist.forms()) gold.assignment[form.id] = *form.gold_cogid;
  DetectParams ccm;
  ccm.method = DetectMethod::kCcm;
  const double f_ccm = Bcubed(Detect(wordlist, ccm), gold).fscore;
  DetectParams bip;
  bip.method = DetectMethod::kBipSkip;
  bip.prune = 0.2;
  bip.gram_length = 4;
  const double f_bip = Bcubed(Detect(wordlist, bip), gold).fscore;
  return {f_ccm == 1.0 && f_bip >= 0.9,
          "toy wordlist (" + std::to_string(wordlist.size()) + " forms): CCM F=" + Num(f_ccm) +
              ", BipSkip F=" + Num(f_bip)};
}

// Larger synthetic wordlist: every concept has a few cognate sets whose
// reflexes are drawn by mutating a root form.
Wordlist SpeedWordlist() {
  static const Tokens consonants = {"t", "k", "p", "s", "n", "m", "r", "l", "g", "d", "b", "h"};
  static const Tokens vowels = {"a", "e", "i", "o", "u"};
  Rng rng(1010);
  std::vector<WordForm> forms;
  const auto model = SoundClassModel::Builtin();
  int64_t id = 1;
  for (int concept_index = 0; concept_index < 40; ++concept_index) {
    std::vector<Tokens> roots;
    for (int r = 0; r < 4; ++r) {
      Tokens root;
      for (size_t k = 0, n = 3 + rng.Index(5); k < n; ++k) {
        root.push_back(k % 2 ? vowels[rng.Index(vowels.size())] : consonants[rng.Index(consonants.size())]);
      }
      roots.push_back(root);
    }
    for (int language = 0; language < 40; ++language) {
      Tokens tokens = roots[rng.Index(roots.size())];
      for (auto &token : tokens) {
        if (rng.Bernoulli(0.15)) token = consonants[rng.Index(consonants.size())];
      }
      WordForm form;
      form.id = id++;
      form.doculect = "L" + std::to_string(language);
      form.gloss = "c" + std::to_string(concept_index);
      form.tokens = tokens;
      form.classes = Classify(model, tokens);
      forms.push_back(std::move(form));
    }
  }
  return Wordlist(std::move(forms));
}

Outcome Ac10() {
  const Wordlist wordlist = SpeedWordlist();
  std::map<DetectMethod, double> seconds;
  for (DetectMethod method : {DetectMethod::kCcm, DetectMethod::kEditDistance, DetectMethod::kSca,
                              DetectMethod::kBipSkip}) {
    DetectParams params;
    params.method = method;
    double best = std::numeric_limits<double>::infinity();
    for (int repeat = 0; repeat < 3; ++repeat) {
      const auto start = Clock::now();
      Detect(wordlist, params);
      best = std::min(best, Since(start));
    }
    seconds[method] = best;
  }
  double fastest = std::numeric_limits<double>::infinity(), slowest = 0.0;
  for (const auto &[method, s] : seconds) {
    fastest = std::min(fastest, s);
    slowest = std::max(slowest, s);
  }
  const bool ordered =
      seconds[DetectMethod::kCcm] == fastest && seconds[DetectMethod::kSca] == slowest;
  std::string detail = std::to_string(wordlist.size()) + " forms:";
  for (const auto &[method, s] : seconds) {
    detail += " " + std::string(DetectMethodName(method)) + "=" + Num(s * 1000.0, 4) + "ms";
  }
  return {ordered, detail + (ordered ? "; CCM fastest, SCA slowest" : "; ordering differs")};
}

}  // namespace

int main(int argc, char **argv) {
  Options options;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) {
      options.cli = argv[++i];
    } else if (arg == "--workdir" && i + 1 < argc) {
      options.workdir = argv[++i];
    } else if (arg == "--only" && i + 1 < argc) {
      options.only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--cli PATH] [--workdir DIR] [--only N]\n";
      return 2;
    }
  }
  fs::create_directories(options.workdir);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"likelihood oracle equivalence", Ac1},
      {"topology count", Ac2},
      {"sampler correctness", Ac3},
      {"tree recovery", Ac4},
      {"B-Cubed", Ac5},
      {"GQD", Ac6},
      {"edit distance", Ac7},
      {"determinism", [&] { return Ac8(options); }},
      {"CCM/BipSkip sanity", Ac9},
      {"detector speed ordering", Ac10},
  };
  int failed = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    const int number = static_cast<int>(k + 1);
    if (options.only != 0 && options.only != number) continue;
    Outcome outcome;
    try {
      outcome = criteria[k].second();
    } catch (const std::exception &error) {
      outcome = {false, std::string("exception: ") + error.what()};
    }
    const bool gated = number != 10;
    std::cout << "AC" << number << " " << (outcome.pass ? "PASS" : "FAIL") << " "
              << criteria[k].first << (gated ? "" : " (informational)") << ": " << outcome.detail
              << std::endl;
    if (gated && !outcome.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
