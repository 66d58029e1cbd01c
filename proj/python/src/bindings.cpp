#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lexiphy/cognate.hpp"
#include "lexiphy/error.hpp"
#include "lexiphy/eval.hpp"
#include "lexiphy/ingest.hpp"
#include "lexiphy/mcmc.hpp"
#include "lexiphy/phylo.hpp"
#include "lexiphy/sim.hpp"

#ifndef LEXIPHY_VERSION
#define LEXIPHY_VERSION "0.0.0"
#endif

namespace py = pybind11;
using namespace lexiphy;

namespace {

using Rows = std::vector<std::vector<int>>;

CharacterMatrix MatrixFromRows(const std::vector<std::string> &languages, const Rows &rows) {
  if (rows.size() != languages.size()) {
    Fail(ErrorCode::kInvalidArgument, "one row per language expected");
  }
  const size_t columns = rows.empty() ? 0 : rows.front().size();
  std::vector<uint8_t> cells;
  for (const auto &row : rows) {
    if (row.size() != columns) Fail(ErrorCode::kInvalidArgument, "ragged matrix rows");
    for (int cell : row) {
      if (cell != 0 && cell != 1) Fail(ErrorCode::kBadValue, "matrix cells must be 0 or 1");
      cells.push_back(static_cast<uint8_t>(cell));
    }
  }
  std::vector<std::string> ids;
  for (size_t c = 0; c < columns; ++c) ids.push_back(std::to_string(c + 1));
  return CharacterMatrix(languages, ids, cells);
}

Rows RowsFromMatrix(const CharacterMatrix &matrix) {
  Rows rows(matrix.LanguageCount(), std::vector<int>(matrix.ColumnCount()));
  for (size_t r = 0; r < matrix.LanguageCount(); ++r)
    for (size_t c = 0; c < matrix.ColumnCount(); ++c) rows[r][c] = matrix(r, c);
  return rows;
}

CognatePartition PartitionFromDict(const std::map<int64_t, int64_t> &assignment) {
  CognatePartition partition;
  partition.assignment = assignment;
  return partition;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "lexiphy core bindings";
  m.attr("__version__") = LEXIPHY_VERSION;
  py::register_exception<Error>(m, "LexiphyError", PyExc_ValueError);

  m.def("tokenize", &TokenizeIpa, py::arg("ipa"), "Split an IPA string into segments.");
  m.def(
      "sound_classes",
      [](const Tokens &tokens) { return Classify(SoundClassModel::Builtin(), tokens); },
      py::arg("tokens"), "Sound-class string of a token list under the built-in model.");
  m.def(
      "edit_distance", [](const Tokens &a, const Tokens &b) { return Levenshtein(a, b); },
      py::arg("a"), py::arg("b"));
  m.def("normalized_edit_distance", &NormalizedLevenshtein, py::arg("a"), py::arg("b"));
  m.def(
      "sca_distance",
      [](const std::string &a, const std::string &b) { return ScaDistance(a, b, ScoringScheme{}); },
      py::arg("a"), py::arg("b"), "Alignment distance between two class strings.");

  m.def(
      "detect",
      [](const std::string &path, const std::string &method, std::optional<double> threshold,
         size_t gram, double prune, const std::string &partitioner, uint64_t seed, size_t jobs) {
        const Wordlist wordlist = LoadWordlist(path, SoundClassModel::Builtin());
        DetectParams params;
        params.method = ParseDetectMethod(method);
        params.threshold = threshold;
        params.gram_length = gram;
        params.prune = prune;
        params.partitioner = ParsePartitioner(partitioner);
        params.seed = seed;
        params.jobs = jobs;
        py::gil_scoped_release release;
        return Detect(wordlist, params).assignment;
      },
      py::arg("wordlist"), py::arg("method") = "bipskip", py::arg("threshold") = py::none(),
      py::arg("gram") = 4, py::arg("prune") = 0.2, py::arg("partitioner") = "components",
      py::arg("seed") = 0, py::arg("jobs") = 1,
      "Cluster a wordlist TSV; returns {form id: cluster id}.");

  m.def(
      "bcubed",
      [](const std::map<int64_t, int64_t> &pred, const std::map<int64_t, int64_t> &gold) {
        const auto score = Bcubed(PartitionFromDict(pred), PartitionFromDict(gold));
        return py::make_tuple(score.precision, score.recall, score.fscore);
      },
      py::arg("pred"), py::arg("gold"), "(precision, recall, fscore)");

  m.def(
      "topology_count",
      [](unsigned n) { return py::int_(py::str(TopologyCount(n).str())); }, py::arg("n"));
  m.def(
      "transition_matrix",
      [](double pi1, double mu, double t) { return Transition({pi1, mu}, t); }, py::arg("pi1"),
      py::arg("mu"), py::arg("t"));
  m.def(
      "log_likelihood",
      [](const std::string &newick, const std::vector<std::string> &languages, const Rows &rows,
         double pi1, double mu) {
        return PruningLogLikelihood(ParseNewick(newick), MatrixFromRows(languages, rows), {pi1, mu});
      },
      py::arg("newick"), py::arg("languages"), py::arg("rows"), py::arg("pi1"), py::arg("mu"));
  m.def(
      "emit_newick",
      [](const std::string &newick, bool lengths) {
        return EmitNewick(CanonicalOrder(ParseNewick(newick)), {lengths, true});
      },
      py::arg("newick"), py::arg("lengths") = true, "Parse and re-emit in canonical child order.");

  m.def(
      "simulate",
      [](size_t languages, size_t columns, double pi1, double mu, double rate, uint64_t seed) {
        SimConfig config;
        config.n_languages = languages;
        config.n_columns = columns;
        config.params = {pi1, mu};
        config.branch_rate = rate;
        config.seed = seed;
        const Simulation sim = Simulate(config);
        py::dict out;
        out["tree"] = EmitNewick(CanonicalOrder(sim.tree));
        out["languages"] = sim.matrix.languages();
        out["rows"] = RowsFromMatrix(sim.matrix);
        return out;
      },
      py::arg("languages") = 6, py::arg("columns") = 200, py::arg("pi1") = 0.3,
      py::arg("mu") = 1.0, py::arg("rate") = 5.0, py::arg("seed") = 7);

  m.def(
      "run_chain",
      [](const std::vector<std::string> &languages, const Rows &rows, double t0, double cooling,
         size_t max_iters, size_t stop_window, uint64_t seed) {
        ChainConfig config;
        config.t0 = t0;
        config.cooling = cooling;
        config.max_iters = max_iters;
        config.stop_window = stop_window;
        config.seed = seed;
        const CharacterMatrix matrix = MatrixFromRows(languages, rows);
        ChainResult result;
        {
          py::gil_scoped_release release;
          result = RunChain(matrix, config);
        }
        py::dict out;
        out["map_tree"] = EmitNewick(CanonicalOrder(result.map_tree));
        out["consensus_tree"] = EmitNewick(result.consensus_tree, {true, true});
        out["map_log_posterior"] = result.map_log_posterior;
        out["pi1"] = result.map_params.pi1;
        out["mu"] = result.map_params.mu;
        out["iterations"] = result.iterations;
        out["annealing_end"] = result.annealing_end;
        out["trace_csv"] = FormatTraceCsv(result.trace);
        return out;
      },
      py::arg("languages"), py::arg("rows"), py::arg("t0") = 50.0, py::arg("cooling") = 0.999,
      py::arg("max_iters") = 50000, py::arg("stop_window") = 2000, py::arg("seed") = 42);

  m.def(
      "gqd",
      [](const std::string &inferred, const std::string &gold) {
        const auto report = Gqd(ParseNewick(inferred), ParseNewick(gold));
        py::dict out;
        out["total_quartets"] = report.total_quartets;
        out["gold_resolved"] = report.gold_resolved;
        out["shared"] = report.shared;
        out["gqd"] = report.gqd;
        return out;
      },
      py::arg("inferred"), py::arg("gold"));
}
