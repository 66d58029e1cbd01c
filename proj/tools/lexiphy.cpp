// lexiphy command-line front end: detect -> matrix -> infer -> evaluate/gqd,
// plus simulate and manifest replay.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lexiphy/cognate.hpp"
#include "lexiphy/error.hpp"
#include "lexiphy/eval.hpp"
#include "lexiphy/ingest.hpp"
#include "lexiphy/mcmc.hpp"
#include "lexiphy/phylo.hpp"
#include "lexiphy/sim.hpp"
#include "lexiphy/tsv.hpp"

#ifndef LEXIPHY_VERSION
#define LEXIPHY_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace lexiphy;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

// Thrown for failures that should exit with a specific status.
struct ExitError {
  int status;
  std::string message;
};

std::string Fixed(double value, int digits = 4) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << value;
  return out.str();
}

// Like FormatDouble but always with a decimal point.
std::string Decimal(double value) {
  std::string text = FormatDouble(value);
  if (text.find_first_of(".eEn") == std::string::npos) text += ".0";
  return text;
}

struct Globals {
  std::optional<uint64_t> seed;
  size_t jobs = 1;
  std::string out_prefix;
};

struct DetectArgs {
  std::string wordlist;
  std::string method = "bipskip";
  std::optional<double> threshold;
  size_t gram = 4;
  double prune = 0.2;
  std::string partitioner = "components";
  std::string sound_model;
  std::string scoring;
  std::string out;
};

struct MatrixArgs {
  std::string wordlist;
  std::string column = "PREDCOGID";
  bool drop_constant = false;
  std::string sound_model;
  std::string out;
};

struct InferArgs {
  std::string matrix;
  std::vector<double> t0 = {50.0};
  double gamma = 0.999;
  size_t max_iters = 50000;
  size_t stop_window = 2000;
  double branch_rate = 10.0;
  double scale_tuning = 1.0;
  std::vector<double> weights = {0.4, 0.4, 0.2};
  std::string gold;
};

struct EvaluateArgs {
  std::string pred;
  std::string gold;
  std::string pred_column;
  std::string gold_column = "COGID";
};

struct GqdArgs {
  std::string inferred;
  std::string gold;
};

struct SimulateArgs {
  size_t languages = 6;
  size_t columns = 200;
  double pi1 = 0.3;
  double mu = 1.0;
  double rate = 5.0;
  std::string out_matrix;
  std::string out_tree;
};

struct Invocation {
  Globals globals;
  DetectArgs detect;
  MatrixArgs matrix;
  InferArgs infer;
  EvaluateArgs evaluate;
  GqdArgs gqd;
  SimulateArgs simulate;
  std::string replay_manifest;
};

// Writes `<base>.manifest.json` next to the outputs.
void WriteManifest(const std::string &base, const std::string &subcommand,
                   const std::vector<std::string> &command, json parameters, uint64_t seed,
                   json inputs, json outputs, double seconds) {
  json manifest;
  manifest["tool"] = "lexiphy";
  manifest["version"] = LEXIPHY_VERSION;
  manifest["subcommand"] = subcommand;
  manifest["command"] = command;
  manifest["parameters"] = std::move(parameters);
  manifest["seed"] = seed;
  manifest["inputs"] = std::move(inputs);
  manifest["outputs"] = std::move(outputs);
  manifest["wall_seconds"] = seconds;
  WriteTextFile(base + ".manifest.json", manifest.dump(2) + "\n");
}

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

size_t RequireColumn(const TsvTable &table, const std::string &name) {
  const auto index = table.ColumnIndex(name);
  if (!index) Fail(ErrorCode::kMissingColumn, "missing column " + name);
  return *index;
}

SoundClassModel LoadModel(const std::string &path) {
  return path.empty() ? SoundClassModel::Builtin() : SoundClassModel::FromTsv(path);
}

int RunDetect(const Globals &globals, const DetectArgs &args) {
  const auto start = std::chrono::steady_clock::now();
  const uint64_t seed = globals.seed.value_or(0);
  DetectParams params;
  params.method = ParseDetectMethod(args.method);
  params.partitioner = ParsePartitioner(args.partitioner);
  params.threshold = args.threshold;
  params.gram_length = args.gram;
  params.prune = args.prune;
  params.seed = seed;
  params.jobs = globals.jobs;
  if (!args.scoring.empty()) params.scheme = ScoringScheme::FromTsv(args.scoring);

  TsvTable table;
  Wordlist wordlist;
  try {
    const SoundClassModel model = LoadModel(args.sound_model);
    table = ReadTsv(args.wordlist);
    wordlist = WordlistFromTable(table, model);
  } catch (const Error &error) {
    throw ExitError{kExitUsage, args.wordlist + ": " + error.what()};
  }
  const auto partition = Detect(wordlist, params);

  const size_t id_column = RequireColumn(table, "ID");
  TsvTable out = table;
  out.header.push_back("PREDCOGID");
  for (auto &row : out.rows) {
    const int64_t id = ParseInteger(row[id_column], "ID");
    row.push_back(std::to_string(partition.assignment.at(id)));
  }
  WriteTextFile(args.out, FormatTsv(out));
  const double seconds = SecondsSince(start);

  const std::string method(DetectMethodName(params.method));
  std::cout << "Method: " << method << "\n";
  std::cout << "Forms: " << wordlist.size() << "  Concepts: " << wordlist.index().size()
            << "  Clusters: " << partition.ClusterCount() << "\n";
  if (wordlist.HasGold()) {
    CognatePartition gold;
    for (const auto &form : wordlist.forms()) gold.assignment[form.id] = *form.gold_cogid;
    const auto score = Bcubed(partition, gold);
    std::cout << "Precision\tRecall\tF-score\n"
              << Fixed(score.precision) << "\t" << Fixed(score.recall) << "\t" << Fixed(score.fscore)
              << "\n";
  }
  std::cout << "Running Time: " << Fixed(seconds, 2) << "s\n";

  json parameters = {{"method", method},
                     {"threshold", params.threshold.value_or(DefaultThreshold(params.method))},
                     {"gram", args.gram},
                     {"prune", args.prune},
                     {"partitioner", std::string(PartitionerName(params.partitioner))},
                     {"jobs", globals.jobs}};
  std::vector<std::string> command = {"detect", "--wordlist", args.wordlist, "--method", method,
                                      "--gram", std::to_string(args.gram), "--prune",
                                      FormatDouble(args.prune), "--partitioner", args.partitioner,
                                      "--seed", std::to_string(seed), "--out", args.out};
  if (params.method != DetectMethod::kBipSkip) {
    command.insert(command.end(), {"--threshold", FormatDouble(parameters["threshold"].get<double>())});
  }
  json inputs = {{"wordlist", args.wordlist}};
  if (!args.sound_model.empty()) {
    command.insert(command.end(), {"--sound-model", args.sound_model});
    inputs["sound_model"] = args.sound_model;
  }
  if (!args.scoring.empty()) {
    command.insert(command.end(), {"--scoring", args.scoring});
    inputs["scoring"] = args.scoring;
  }
  WriteManifest(args.out, "detect", command, parameters, seed, inputs, {{"wordlist", args.out}}, seconds);
  return 0;
}

int RunMatrix(const Globals &globals, const MatrixArgs &args) {
  const auto start = std::chrono::steady_clock::now();
  TsvTable table;
  Wordlist wordlist;
  try {
    table = ReadTsv(args.wordlist);
    wordlist = WordlistFromTable(table, LoadModel(args.sound_model));
  } catch (const Error &error) {
    throw ExitError{kExitUsage, args.wordlist + ": " + error.what()};
  }
  const size_t id_column = RequireColumn(table, "ID");
  const size_t cluster_column = RequireColumn(table, args.column);
  CognatePartition partition;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const std::string where = "line " + std::to_string(table.line_numbers[r]) + ": ";
    try {
      partition.assignment[ParseInteger(table.rows[r][id_column], "ID")] =
          ParseInteger(table.rows[r][cluster_column], args.column);
    } catch (const Error &error) {
      throw ExitError{kExitData, where + error.what()};
    }
  }
  const auto matrix = BuildMatrix(partition, wordlist, args.drop_constant);
  SaveMatrix(matrix, args.out);
  const double seconds = SecondsSince(start);
  std::cout << "Languages: " << matrix.LanguageCount() << "  Cognate sets: " << matrix.ColumnCount()
            << "\n";

  std::vector<std::string> command = {"matrix", "--wordlist", args.wordlist, "--column", args.column,
                                      "--out", args.out};
  if (args.drop_constant) command.push_back("--drop-constant");
  json inputs = {{"wordlist", args.wordlist}};
  if (!args.sound_model.empty()) {
    command.insert(command.end(), {"--sound-model", args.sound_model});
    inputs["sound_model"] = args.sound_model;
  }
  WriteManifest(args.out, "matrix", command,
                {{"column", args.column}, {"drop_constant", args.drop_constant}},
                globals.seed.value_or(0), inputs, {{"matrix", args.out}}, seconds);
  return 0;
}

int RunInfer(const Globals &globals, const InferArgs &args) {
  const auto start = std::chrono::steady_clock::now();
  if (globals.out_prefix.empty()) throw ExitError{kExitUsage, "infer requires --out-prefix"};
  if (args.weights.size() != 3) throw ExitError{kExitUsage, "--weights takes three values"};
  const uint64_t seed = globals.seed.value_or(42);
  const auto matrix = LoadMatrix(args.matrix);
  std::optional<PhyloTree> gold;
  if (!args.gold.empty()) gold = ParseNewick(ReadTextFile(args.gold));

  std::vector<ChainConfig> configs;
  for (double t0 : args.t0) {
    ChainConfig config;
    config.t0 = t0;
    config.cooling = args.gamma;
    config.max_iters = args.max_iters;
    config.stop_window = args.stop_window;
    config.seed = seed;
    config.branch_rate = args.branch_rate;
    config.scale_tuning = args.scale_tuning;
    config.weight_nni = args.weights[0];
    config.weight_branch = args.weights[1];
    config.weight_params = args.weights[2];
    try {
      config.Validate();
    } catch (const Error &error) {
      throw ExitError{kExitUsage, error.what()};
    }
    configs.push_back(config);
  }
  const auto results = RunChains(matrix, configs, globals.jobs);
  const size_t best = BestChain(results);

  std::cout << "T0\tGQD\t#iteration\tTime\tlogpost\n";
  for (size_t i = 0; i < results.size(); ++i) {
    const auto &result = results[i];
    std::cout << FormatDouble(args.t0[i]) << "\t"
              << (gold ? Fixed(Gqd(result.map_tree, *gold).gqd) : std::string("-")) << "\t"
              << result.iterations << "\t" << Fixed(result.seconds, 2) << "s\t"
              << Fixed(result.map_log_posterior) << "\n";
  }
  const auto &chosen = results[best];
  const std::string prefix = globals.out_prefix;
  WriteTextFile(prefix + ".trace.csv", FormatTraceCsv(chosen.trace));
  WriteTextFile(prefix + ".map.nwk", EmitNewick(CanonicalOrder(chosen.map_tree)) + "\n");
  WriteTextFile(prefix + ".consensus.nwk", EmitNewick(chosen.consensus_tree, {true, true}) + "\n");
  const double seconds = SecondsSince(start);
  std::cout << "Best T0: " << FormatDouble(args.t0[best]) << "  Iterations: " << chosen.iterations
            << "  Time: " << Fixed(seconds, 2) << "s\n";
  std::cout << "MAP pi1: " << Fixed(chosen.map_params.pi1) << "  mu: " << Fixed(chosen.map_params.mu)
            << "\n";

  std::vector<std::string> command = {"infer", "--matrix", args.matrix, "--t0"};
  for (double t0 : args.t0) command.push_back(FormatDouble(t0));
  command.insert(command.end(),
                 {"--gamma", FormatDouble(args.gamma), "--max-iters", std::to_string(args.max_iters),
                  "--stop-window", std::to_string(args.stop_window), "--branch-rate",
                  FormatDouble(args.branch_rate), "--scale-tuning", FormatDouble(args.scale_tuning),
                  "--weights", FormatDouble(args.weights[0]), FormatDouble(args.weights[1]),
                  FormatDouble(args.weights[2]), "--seed", std::to_string(seed), "--out-prefix",
                  prefix});
  json inputs = {{"matrix", args.matrix}};
  if (!args.gold.empty()) {
    command.insert(command.end(), {"--gold", args.gold});
    inputs["gold"] = args.gold;
  }
  json chains = json::array();
  for (size_t i = 0; i < results.size(); ++i) {
    chains.push_back({{"t0", args.t0[i]},
                      {"iterations", results[i].iterations},
                      {"annealing_end", results[i].annealing_end},
                      {"map_log_posterior", results[i].map_log_posterior}});
  }
  json parameters = {{"t0", args.t0},
                     {"gamma", args.gamma},
                     {"max_iters", args.max_iters},
                     {"stop_window", args.stop_window},
                     {"branch_rate", args.branch_rate},
                     {"scale_tuning", args.scale_tuning},
                     {"weights", args.weights},
                     {"jobs", globals.jobs},
                     {"chains", chains},
                     {"best_chain", best}};
  WriteManifest(prefix, "infer", command, parameters, seed, inputs,
                {{"trace", prefix + ".trace.csv"},
                 {"map", prefix + ".map.nwk"},
                 {"consensus", prefix + ".consensus.nwk"}},
                seconds);
  return 0;
}

CognatePartition ReadPartition(const std::string &path, std::string column) {
  const TsvTable table = ReadTsv(path);
  if (column.empty()) {
    const auto &h = table.header;
    column = std::find(h.begin(), h.end(), "PREDCOGID") != h.end() ? "PREDCOGID" : "COGID";
  }
  const size_t id_column = RequireColumn(table, "ID");
  const size_t cluster_column = RequireColumn(table, column);
  CognatePartition partition;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const int64_t id = ParseInteger(table.rows[r][id_column], "ID");
    if (!partition.assignment.emplace(id, ParseInteger(table.rows[r][cluster_column], column)).second) {
      Fail(ErrorCode::kDuplicateId,
           "line " + std::to_string(table.line_numbers[r]) + ": duplicate ID " + std::to_string(id));
    }
  }
  return partition;
}

int RunEvaluate(const Globals &globals, const EvaluateArgs &args) {
  const auto start = std::chrono::steady_clock::now();
  const auto score = Bcubed(ReadPartition(args.pred, args.pred_column),
                            ReadPartition(args.gold, args.gold_column));
  const std::string dataset = fs::path(args.pred).stem().string();
  std::cout << "Dataset\tPrecision\tRecall\tF-score\n"
            << dataset << "\t" << Fixed(score.precision) << "\t" << Fixed(score.recall) << "\t"
            << Fixed(score.fscore) << "\n";
  if (!globals.out_prefix.empty()) {
    const json report = {{"dataset", dataset},
                         {"precision", score.precision},
                         {"recall", score.recall},
                         {"fscore", score.fscore}};
    WriteTextFile(globals.out_prefix + ".json", report.dump(2) + "\n");
    std::vector<std::string> command = {"evaluate", "--pred", args.pred, "--gold", args.gold,
                                        "--gold-column", args.gold_column, "--out-prefix",
                                        globals.out_prefix};
    if (!args.pred_column.empty()) command.insert(command.end(), {"--pred-column", args.pred_column});
    WriteManifest(globals.out_prefix, "evaluate", command, {{"gold_column", args.gold_column}},
                  globals.seed.value_or(0), {{"pred", args.pred}, {"gold", args.gold}},
                  {{"report", globals.out_prefix + ".json"}}, SecondsSince(start));
  }
  return 0;
}

int RunGqd(const Globals &globals, const GqdArgs &args) {
  const auto start = std::chrono::steady_clock::now();
  const auto report = Gqd(ParseNewick(ReadTextFile(args.inferred)), ParseNewick(ReadTextFile(args.gold)));
  std::cout << "Quartets: " << report.total_quartets << "\n"
            << "Gold resolved: " << report.gold_resolved << "\n"
            << "Shared: " << report.shared << "\n"
            << "GQD: " << Decimal(report.gqd) << "\n";
  if (!globals.out_prefix.empty()) {
    const json out = {{"total_quartets", report.total_quartets},
                      {"gold_resolved", report.gold_resolved},
                      {"shared", report.shared},
                      {"gqd", report.gqd}};
    WriteTextFile(globals.out_prefix + ".json", out.dump(2) + "\n");
    WriteManifest(globals.out_prefix, "gqd",
                  {"gqd", "--inferred", args.inferred, "--gold", args.gold, "--out-prefix",
                   globals.out_prefix},
                  json::object(), globals.seed.value_or(0),
                  {{"inferred", args.inferred}, {"gold", args.gold}},
                  {{"report", globals.out_prefix + ".json"}}, SecondsSince(start));
  }
  return 0;
}

int RunSimulate(const Globals &globals, const SimulateArgs &args) {
  const auto start = std::chrono::steady_clock::now();
  if (args.languages < 3) throw ExitError{kExitUsage, "--languages must be at least 3"};
  if (args.columns < 1) throw ExitError{kExitUsage, "--columns must be at least 1"};
  if (!(args.pi1 > 0.0 && args.pi1 < 1.0)) throw ExitError{kExitUsage, "--pi1 must lie in (0, 1)"};
  if (!(args.mu >= 0.0) || !(args.rate > 0.0)) {
    throw ExitError{kExitUsage, "--mu must be >= 0 and --rate > 0"};
  }
  SimConfig config;
  config.n_languages = args.languages;
  config.n_columns = args.columns;
  config.params = {args.pi1, args.mu};
  config.branch_rate = args.rate;
  config.seed = globals.seed.value_or(7);
  const Simulation sim = Simulate(config);
  SaveMatrix(sim.matrix, args.out_matrix);
  WriteTextFile(args.out_tree, EmitNewick(CanonicalOrder(sim.tree)) + "\n");
  std::cout << "Languages: " << args.languages << "  Columns: " << args.columns << "\n";
  WriteManifest(args.out_matrix, "simulate",
                {"simulate", "--languages", std::to_string(args.languages), "--columns",
                 std::to_string(args.columns), "--pi1", FormatDouble(args.pi1), "--mu",
                 FormatDouble(args.mu), "--rate", FormatDouble(args.rate), "--seed",
                 std::to_string(config.seed), "--out-matrix", args.out_matrix, "--out-tree",
                 args.out_tree},
                {{"languages", args.languages},
                 {"columns", args.columns},
                 {"pi1", args.pi1},
                 {"mu", args.mu},
                 {"rate", args.rate}},
                config.seed, json::object(), {{"matrix", args.out_matrix}, {"tree", args.out_tree}},
                SecondsSince(start));
  return 0;
}

void Configure(CLI::App &app, Invocation &inv) {
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "lexiphy " LEXIPHY_VERSION);
  app.add_option("--seed", inv.globals.seed, "Random seed");
  app.add_option("--jobs", inv.globals.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out-prefix", inv.globals.out_prefix, "Prefix for output files");

  auto *detect = app.add_subcommand("detect", "Cluster a wordlist into cognate sets");
  auto &d = inv.detect;
  detect->add_option("--wordlist", d.wordlist, "Input wordlist TSV")->required();
  detect->add_option("--method", d.method, "ccm, editdist, sca or bipskip")
      ->check(CLI::IsMember({"ccm", "editdist", "sca", "bipskip"}));
  detect->add_option("--threshold", d.threshold, "UPGMA cut for distance methods")
      ->check(CLI::Range(0.0, 1.0));
  detect->add_option("--gram", d.gram, "BipSkip skip-gram length")->check(CLI::PositiveNumber);
  detect->add_option("--prune", d.prune, "BipSkip prune fraction")->check(CLI::Range(0.0, 1.0));
  detect->add_option("--partitioner", d.partitioner, "components or labelprop")
      ->check(CLI::IsMember({"components", "labelprop"}));
  detect->add_option("--sound-model", d.sound_model, "Sound-class table TSV");
  detect->add_option("--scoring", d.scoring, "SCA scoring table TSV");
  detect->add_option("--out", d.out, "Output TSV")->required();

  auto *matrix = app.add_subcommand("matrix", "Build a presence/absence matrix");
  auto &m = inv.matrix;
  matrix->add_option("--wordlist", m.wordlist, "Wordlist TSV with a cluster column")->required();
  matrix->add_option("--column", m.column, "Cluster column");
  matrix->add_flag("--drop-constant", m.drop_constant, "Drop cognate sets present in every language");
  matrix->add_option("--sound-model", m.sound_model, "Sound-class table TSV");
  matrix->add_option("--out", m.out, "Output matrix TSV")->required();

  auto *infer = app.add_subcommand("infer", "Annealed MCMC tree inference");
  auto &i = inv.infer;
  infer->add_option("--matrix", i.matrix, "Character matrix TSV")->required();
  infer->add_option("--t0", i.t0, "Initial temperature(s); one chain each")->expected(1, -1);
  infer->add_option("--gamma", i.gamma, "Cooling factor")->check(CLI::Range(0.0, 1.0));
  infer->add_option("--max-iters", i.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
  infer->add_option("--stop-window", i.stop_window, "Stagnation window at T = 1")
      ->check(CLI::PositiveNumber);
  infer->add_option("--branch-rate", i.branch_rate, "Exponential branch-length prior rate")
      ->check(CLI::PositiveNumber);
  infer->add_option("--scale-tuning", i.scale_tuning, "Branch scaling tuning")
      ->check(CLI::PositiveNumber);
  infer->add_option("--weights", i.weights, "NNI, branch and parameter move weights")
      ->expected(3);
  infer->add_option("--gold", i.gold, "Reference Newick tree for GQD reporting");

  auto *evaluate = app.add_subcommand("evaluate", "B-Cubed scores of a clustering");
  auto &e = inv.evaluate;
  evaluate->add_option("--pred", e.pred, "Predicted clusters TSV")->required();
  evaluate->add_option("--gold", e.gold, "Gold clusters TSV")->required();
  evaluate->add_option("--pred-column", e.pred_column, "Default PREDCOGID, else COGID");
  evaluate->add_option("--gold-column", e.gold_column, "Gold cluster column");

  auto *gqd = app.add_subcommand("gqd", "Generalized quartet distance");
  gqd->add_option("--inferred", inv.gqd.inferred, "Inferred Newick tree")->required();
  gqd->add_option("--gold", inv.gqd.gold, "Gold Newick tree")->required();

  auto *simulate = app.add_subcommand("simulate", "Simulate a tree and character matrix");
  auto &s = inv.simulate;
  simulate->add_option("--languages", s.languages, "Number of languages");
  simulate->add_option("--columns", s.columns, "Number of characters");
  simulate->add_option("--pi1", s.pi1, "Stationary presence frequency");
  simulate->add_option("--mu", s.mu, "Substitution rate");
  simulate->add_option("--rate", s.rate, "Exponential branch-length rate");
  simulate->add_option("--out-matrix", s.out_matrix, "Output matrix TSV")->required();
  simulate->add_option("--out-tree", s.out_tree, "Output Newick tree")->required();

  auto *replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("manifest", inv.replay_manifest, "Manifest JSON")->required();
}

int Dispatch(CLI::App &app, const Invocation &inv);

int Replay(const std::string &path, const Globals &outer) {
  const json manifest = json::parse(ReadTextFile(path));
  std::vector<std::string> args = manifest.at("command").get<std::vector<std::string>>();
  if (!args.empty() && args.front() == "replay") throw ExitError{kExitUsage, "manifest replays itself"};
  args.insert(args.begin(), {"--jobs", std::to_string(outer.jobs)});
  CLI::App app{"lexiphy"};
  Invocation inv;
  Configure(app, inv);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  app.parse(reversed);
  return Dispatch(app, inv);
}

int Dispatch(CLI::App &app, const Invocation &inv) {
  if (app.got_subcommand("detect")) return RunDetect(inv.globals, inv.detect);
  if (app.got_subcommand("matrix")) return RunMatrix(inv.globals, inv.matrix);
  if (app.got_subcommand("infer")) return RunInfer(inv.globals, inv.infer);
  if (app.got_subcommand("evaluate")) return RunEvaluate(inv.globals, inv.evaluate);
  if (app.got_subcommand("gqd")) return RunGqd(inv.globals, inv.gqd);
  if (app.got_subcommand("simulate")) return RunSimulate(inv.globals, inv.simulate);
  if (app.got_subcommand("replay")) return Replay(inv.replay_manifest, inv.globals);
  return kExitUsage;
}

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNumeric:
      return kExitNumeric;
    case ErrorCode::kInvalidArgument:
      return kExitUsage;
    default:
      return kExitData;
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"lexiphy: cognate detection and lexical phylogenetics"};
  Invocation inv;
  Configure(app, inv);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }
  try {
    return Dispatch(app, inv);
  } catch (const ExitError &e) {
    std::cerr << "error: " << e.message << "\n";
    return e.status;
  } catch (const CLI::ParseError &e) {
    std::cerr << "error: invalid manifest command: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error &e) {
    std::cerr << "error [" << ErrorCodeName(e.code()) << "]: " << e.what() << "\n";
    return StatusFor(e.code());
  } catch (const nlohmann::json::exception &e) {
    std::cerr << "error: manifest: " << e.what() << "\n";
    return kExitData;
  }
}
