#pragma once

// Wordlist loading, IPA segmentation and sound-class conversion.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexiphy/tsv.hpp"

namespace lexiphy {

using Tokens = std::vector<std::string>;

// Splits on spaces when the input contains any; otherwise segments into base
// characters, each carrying its trailing combining and modifier marks. A tie
// bar joins the following base character into the same segment.
Tokens TokenizeIpa(std::string_view raw);

// Decodes UTF-8, throwing BadValue on malformed input.
std::vector<char32_t> DecodeUtf8(std::string_view text);
std::string EncodeUtf8(char32_t code_point);

// True for code points that attach to the preceding segment: combining
// diacritics, spacing modifier letters (aspiration, length, tone letters)
// and superscript letters.
bool IsAttachingMark(char32_t code_point);

class SoundClassModel {
 public:
  static constexpr char kVowel = 'V';

  SoundClassModel(std::string name, std::map<std::string, char> mapping,
                  char default_class = '0');

  // Coarse consonant-class model: velars K, dentals T, liquids R, nasals N,
  // sibilants S, labial obstruents F, glides J, laryngeals H, vowels V and
  // default 0.
  static SoundClassModel Builtin();
  // Reads `TOKEN<TAB>CLASS` rows. Tokens listed as vowels by the built-in
  // inventory must map to V.
  static SoundClassModel FromTsv(const std::filesystem::path &path);
  static SoundClassModel FromTable(const TsvTable &table, std::string name);

  // Exact token lookup, then lookup with diacritics, length and tone marks
  // removed, then lookup of the first base character, else default class.
  char ClassOf(std::string_view token) const;

  const std::string &name() const { return name_; }
  char default_class() const { return default_class_; }
  const std::map<std::string, char> &mapping() const { return mapping_; }

 private:
  std::string name_;
  std::map<std::string, char> mapping_;
  char default_class_;
};

std::string Classify(const SoundClassModel &model, const Tokens &tokens);

// First `k` consonant labels of a class string (vowels and default-class
// labels skipped).
std::string ConsonantSkeleton(std::string_view classes, size_t k,
                              char default_class = '0');

struct WordForm {
  int64_t id = 0;
  std::string doculect;
  std::string gloss;
  Tokens tokens;
  std::string classes;
  std::optional<int64_t> gold_cogid;

  bool operator==(const WordForm &) const = default;
};

class Wordlist {
 public:
  Wordlist() = default;
  // Forms are stored sorted by id. Throws DuplicateId, EmptyForm or BadValue.
  explicit Wordlist(std::vector<WordForm> forms);

  const std::vector<WordForm> &forms() const { return forms_; }
  // Concept -> ids of its forms (ascending).
  const std::map<std::string, std::vector<int64_t>> &index() const { return index_; }
  // Distinct doculects, sorted.
  const std::vector<std::string> &languages() const { return languages_; }

  const WordForm &Form(int64_t id) const;
  std::vector<WordForm> FormsOfConcept(const std::string &gloss) const;
  bool HasGold() const;
  size_t size() const { return forms_.size(); }

  bool operator==(const Wordlist &) const = default;

 private:
  std::vector<WordForm> forms_;
  std::map<std::string, std::vector<int64_t>> index_;
  std::vector<std::string> languages_;
  std::map<int64_t, size_t> position_;
};

// Required columns ID, DOCULECT, CONCEPT, IPA; optional COGID.
Wordlist WordlistFromTable(const TsvTable &table, const SoundClassModel &model);
Wordlist LoadWordlist(const std::filesystem::path &path, const SoundClassModel &model);
std::string FormatWordlist(const Wordlist &wordlist);
void SaveWordlist(const Wordlist &wordlist, const std::filesystem::path &path);

int64_t ParseInteger(const std::string &text, const std::string &what);

}  // namespace lexiphy
