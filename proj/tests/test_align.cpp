#include "doctest.h"
#include "lexiphy/align.hpp"
#include "lexiphy/error.hpp"
#include "lexiphy/random.hpp"
#include "oracles.hpp"

using namespace lexiphy;

namespace {

Tokens RandomTokens(Rng &rng, size_t max_length) {
  static const Tokens alphabet = {"k", "a", "t", "tʰ", "ŋ", "i"};
  Tokens tokens(rng.Index(max_length + 1));
  for (auto &token : tokens) token = alphabet[rng.Index(alphabet.size())];
  return tokens;
}

std::string RandomClasses(Rng &rng, size_t min_length, size_t max_length) {
  static const std::string alphabet = "TKVNR";
  std::string s(min_length + rng.Index(max_length - min_length + 1), ' ');
  for (auto &c : s) c = alphabet[rng.Index(alphabet.size())];
  return s;
}

}  // namespace

TEST_CASE("levenshtein examples") {
  CHECK(Levenshtein(Tokens{"k", "a", "t"}, Tokens{"k", "a", "t"}) == 0);
  CHECK(Levenshtein(Tokens{}, Tokens{"a", "b"}) == 2);
  CHECK(Levenshtein(Tokens{"k", "a", "t"}, Tokens{"h", "a", "t"}) == 1);
  // counts tokens, not bytes
  CHECK(Levenshtein(Tokens{"tʰ", "a"}, Tokens{"t", "a"}) == 1);
}

TEST_CASE("normalized levenshtein") {
  CHECK(NormalizedLevenshtein({"k", "a"}, {"k", "a"}) == 0.0);
  CHECK(NormalizedLevenshtein({"a", "b", "c"}, {"x", "y", "z"}) == 1.0);
  CHECK(NormalizedLevenshtein({"k", "a", "t"}, {"h", "a", "t"}) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(NormalizedLevenshtein({}, {}), Error);
}

TEST_CASE("levenshtein agrees with the recursive oracle and satisfies the metric axioms") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const Tokens a = RandomTokens(rng, 7), b = RandomTokens(rng, 7), c = RandomTokens(rng, 7);
    const size_t ab = Levenshtein(a, b);
    REQUIRE(ab == oracle::RecursiveEditDistance(a, b));
    CHECK(ab == Levenshtein(b, a));
    CHECK(Levenshtein(a, c) <= ab + Levenshtein(b, c));
    CHECK((ab == 0) == (a == b));
    if (!a.empty() || !b.empty()) {
      const double normalized = NormalizedLevenshtein(a, b);
      CHECK(normalized >= 0.0);
      CHECK(normalized <= 1.0);
      CHECK((normalized == 0.0) == (a == b));
    }
  }
}

TEST_CASE("needleman-wunsch examples") {
  const auto same = NeedlemanWunsch("TVK", "TVK");
  CHECK(same.score == 3.0);
  CHECK(same.top == "TVK");
  CHECK(same.bottom == "TVK");

  const auto gapped = NeedlemanWunsch("TK", "TVK");
  CHECK(gapped.score == 1.0);
  CHECK(gapped.top == "T-K");
  CHECK(gapped.bottom == "TVK");

  const auto single = NeedlemanWunsch("T", "K");
  CHECK(single.score == -1.0);
  CHECK(single.top == "T");
  CHECK(single.bottom == "K");
}

TEST_CASE("needleman-wunsch score is optimal, symmetric and covers both inputs") {
  Rng rng(77);
  for (int trial = 0; trial < 400; ++trial) {
    const std::string a = RandomClasses(rng, 1, 4), b = RandomClasses(rng, 1, 4);
    const auto alignment = NeedlemanWunsch(a, b);
    CHECK(alignment.score == oracle::BestAlignmentScore(a, b, 1.0, -1.0, -1.0));
    CHECK(alignment.score == NeedlemanWunsch(b, a).score);
    CHECK(alignment.top.size() == alignment.bottom.size());
    CHECK(alignment.top.size() >= std::max(a.size(), b.size()));
    std::string top = alignment.top, bottom = alignment.bottom;
    std::erase(top, '-');
    std::erase(bottom, '-');
    CHECK(top == a);
    CHECK(bottom == b);
  }
}

TEST_CASE("sca distance") {
  CHECK(ScaDistance("TVK", "TVK") == 0.0);
  // S(a,b) = -1, S(a,a) = S(b,b) = 3: 1 + 2/6 clamps to 1
  CHECK(ScaDistance("TVK", "RVN") == 1.0);
  // S(a,b) = 1: 1 - 2/6
  CHECK(ScaDistance("TVK", "TVN") == doctest::Approx(2.0 / 3.0));
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::string a = RandomClasses(rng, 1, 8), b = RandomClasses(rng, 1, 8);
    CHECK(ScaDistance(a, a) == 0.0);
    const double d = ScaDistance(a, b);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
    CHECK(d == doctest::Approx(ScaDistance(b, a)));
  }
}

TEST_CASE("scoring scheme validation and pair tables") {
  ScoringScheme bad;
  bad.gap = 0.5;
  CHECK_THROWS_AS(bad.Validate(), Error);

  TsvTable table = ParseTsv("CLASS_A\tCLASS_B\tSCORE\nT\tS\t0.5\nS\tT\t0.5\n");
  const auto scheme = ScoringScheme::FromTable(table);
  CHECK(scheme.Score('T', 'S') == 0.5);
  CHECK(scheme.Score('S', 'T') == 0.5);
  CHECK(scheme.Score('T', 'T') == 1.0);
  CHECK(ScaDistance("TV", "SV", scheme) < ScaDistance("TV", "KV", scheme));

  TsvTable asymmetric = ParseTsv("CLASS_A\tCLASS_B\tSCORE\nT\tS\t0.5\nS\tT\t0.2\n");
  CHECK_THROWS_AS(ScoringScheme::FromTable(asymmetric), Error);
}
