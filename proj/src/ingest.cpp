#include "lexiphy/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "lexiphy/error.hpp"

namespace lexiphy {

namespace {

bool IsTieBar(char32_t c) { return c == 0x0361 || c == 0x035C || c == 0x0362; }

// Class table of the built-in model. Each string lists the segments of one
// class, space-separated.
struct ClassRow {
  char label;
  const char *segments;
};

constexpr ClassRow kBuiltinClasses[] = {
    {'K', "k g x ɣ q ɢ c ɟ ç ʝ χ ɡ kx ɠ ʛ"},
    {'T', "t d θ ð ʈ ɖ ɗ"},
    {'R', "r l ʁ ɾ ɹ ɻ ʀ ɫ ɬ ɮ ʎ ɭ ʟ ɺ ɽ ʙ"},
    {'N', "n m ɱ ɴ ŋ ɲ ɳ"},
    {'S', "s z ʃ ʒ ɕ ʑ ʂ ʐ ts dz tʃ dʒ tɕ dʑ tʂ dʐ t͡s d͡z t͡ʃ d͡ʒ t͡ɕ d͡ʑ ʦ ʣ ʧ ʤ"},
    {'F', "p b f v ɸ β ʋ pf p͡f ɓ"},
    {'J', "j w ɥ ɰ ʍ"},
    {'H', "h ɦ ʔ ħ ʕ ʜ ʢ"},
    {'V', "a e i o u y ɛ ɔ ə ɪ ʊ æ ɑ ɒ ɐ ɨ ʉ ø œ ɯ ɤ ʌ ɘ ɵ ɜ ɞ ɶ ʏ ɚ ɝ ã ẽ ĩ õ ũ"},
};

const std::set<std::string> &BuiltinVowels() {
  static const std::set<std::string> vowels = [] {
    std::set<std::string> out;
    for (const auto &row : kBuiltinClasses) {
      if (row.label != SoundClassModel::kVowel) continue;
      for (auto &segment : SplitString(row.segments, ' ')) out.insert(segment);
    }
    return out;
  }();
  return vowels;
}

std::string StripMarks(std::string_view token) {
  std::string out;
  for (char32_t c : DecodeUtf8(token)) {
    if (!IsAttachingMark(c)) out += EncodeUtf8(c);
  }
  return out;
}

}  // namespace

std::vector<char32_t> DecodeUtf8(std::string_view text) {
  std::vector<char32_t> out;
  size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    size_t length = 0;
    char32_t c = 0;
    if (lead < 0x80) {
      length = 1;
      c = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      length = 2;
      c = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      length = 3;
      c = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      length = 4;
      c = lead & 0x07;
    } else {
      Fail(ErrorCode::kBadValue, "invalid UTF-8 lead byte at offset " + std::to_string(i));
    }
    if (i + length > text.size()) {
      Fail(ErrorCode::kBadValue, "truncated UTF-8 sequence at offset " + std::to_string(i));
    }
    for (size_t k = 1; k < length; ++k) {
      const auto next = static_cast<unsigned char>(text[i + k]);
      if ((next & 0xC0) != 0x80) {
        Fail(ErrorCode::kBadValue, "invalid UTF-8 continuation at offset " +
                                       std::to_string(i + k));
      }
      c = (c << 6) | (next & 0x3F);
    }
    out.push_back(c);
    i += length;
  }
  return out;
}

std::string EncodeUtf8(char32_t c) {
  std::string out;
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
  return out;
}

bool IsAttachingMark(char32_t c) {
  return (c >= 0x0300 && c <= 0x036F) ||  // combining diacritical marks
         (c >= 0x02B0 && c <= 0x02FF) ||  // spacing modifier letters, tone letters
         (c >= 0x1AB0 && c <= 0x1AFF) || (c >= 0x1DC0 && c <= 0x1DFF) ||
         (c >= 0x1D2C && c <= 0x1D6A) ||  // modifier (superscript) letters
         (c >= 0x1D9B && c <= 0x1DBF) || c == 0x207F ||
         (c >= 0x20D0 && c <= 0x20FF) || (c >= 0xFE20 && c <= 0xFE2F);
}

Tokens TokenizeIpa(std::string_view raw) {
  const std::string trimmed = Trim(std::string(raw));
  Tokens tokens;
  if (trimmed.find(' ') != std::string::npos) {
    for (auto &part : SplitString(trimmed, ' ')) {
      if (!part.empty()) tokens.push_back(std::move(part));
    }
  } else {
    bool join_next = false;
    for (char32_t c : DecodeUtf8(trimmed)) {
      const bool attach = IsAttachingMark(c) || join_next;
      if (attach && !tokens.empty()) {
        tokens.back() += EncodeUtf8(c);
      } else {
        tokens.push_back(EncodeUtf8(c));
      }
      // A tie bar binds the next base character to the current segment.
      join_next = IsTieBar(c);
    }
  }
  if (tokens.empty()) Fail(ErrorCode::kEmptyForm, "no segments in form");
  return tokens;
}

SoundClassModel::SoundClassModel(std::string name, std::map<std::string, char> mapping,
                                 char default_class)
    : name_(std::move(name)), mapping_(std::move(mapping)), default_class_(default_class) {
  for (const auto &[token, label] : mapping_) {
    if (label == default_class_) {
      Fail(ErrorCode::kBadValue, "token '" + token + "' mapped to the default class");
    }
    if (BuiltinVowels().count(token) > 0 && label != kVowel) {
      Fail(ErrorCode::kBadValue, "vowel '" + token + "' must map to V");
    }
  }
}

SoundClassModel SoundClassModel::Builtin() {
  std::map<std::string, char> mapping;
  for (const auto &row : kBuiltinClasses) {
    for (auto &segment : SplitString(row.segments, ' ')) mapping[segment] = row.label;
  }
  return SoundClassModel("builtin", std::move(mapping));
}

SoundClassModel SoundClassModel::FromTable(const TsvTable &table, std::string name) {
  const auto token_col = table.ColumnIndex("TOKEN");
  const auto class_col = table.ColumnIndex("CLASS");
  if (!token_col) Fail(ErrorCode::kMissingColumn, "sound model lacks TOKEN column");
  if (!class_col) Fail(ErrorCode::kMissingColumn, "sound model lacks CLASS column");
  std::map<std::string, char> mapping;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    const std::string where = "line " + std::to_string(table.line_numbers[r]);
    if (row.size() <= std::max(*token_col, *class_col)) {
      Fail(ErrorCode::kBadValue, where + ": too few fields");
    }
    const std::string token = Trim(row[*token_col]);
    const std::string label = Trim(row[*class_col]);
    if (token.empty() || label.size() != 1) {
      Fail(ErrorCode::kBadValue, where + ": class labels must be a single character");
    }
    mapping[token] = label[0];
  }
  return SoundClassModel(std::move(name), std::move(mapping));
}

SoundClassModel SoundClassModel::FromTsv(const std::filesystem::path &path) {
  return FromTable(ReadTsv(path), path.stem().string());
}

char SoundClassModel::ClassOf(std::string_view token) const {
  if (auto it = mapping_.find(std::string(token)); it != mapping_.end()) return it->second;
  const std::string stripped = StripMarks(token);
  if (stripped.empty()) return default_class_;
  if (auto it = mapping_.find(stripped); it != mapping_.end()) return it->second;
  const auto code_points = DecodeUtf8(stripped);
  if (auto it = mapping_.find(EncodeUtf8(code_points.front())); it != mapping_.end()) {
    return it->second;
  }
  return default_class_;
}

std::string Classify(const SoundClassModel &model, const Tokens &tokens) {
  std::string classes;
  classes.reserve(tokens.size());
  for (const auto &token : tokens) classes.push_back(model.ClassOf(token));
  return classes;
}

std::string ConsonantSkeleton(std::string_view classes, size_t k, char default_class) {
  std::string skeleton;
  for (char label : classes) {
    if (skeleton.size() >= k) break;
    if (label == SoundClassModel::kVowel || label == default_class) continue;
    skeleton.push_back(label);
  }
  return skeleton;
}

Wordlist::Wordlist(std::vector<WordForm> forms) : forms_(std::move(forms)) {
  std::sort(forms_.begin(), forms_.end(),
            [](const WordForm &a, const WordForm &b) { return a.id < b.id; });
  std::set<std::string> languages;
  for (size_t i = 0; i < forms_.size(); ++i) {
    const auto &form = forms_[i];
    if (i > 0 && forms_[i - 1].id == form.id) {
      Fail(ErrorCode::kDuplicateId, "form id " + std::to_string(form.id) + " repeated");
    }
    if (form.tokens.empty()) {
      Fail(ErrorCode::kEmptyForm, "form " + std::to_string(form.id) + " has no tokens");
    }
    if (form.classes.size() != form.tokens.size()) {
      Fail(ErrorCode::kBadValue,
           "form " + std::to_string(form.id) + " class string length differs from tokens");
    }
    index_[form.gloss].push_back(form.id);
    languages.insert(form.doculect);
    position_[form.id] = i;
  }
  languages_.assign(languages.begin(), languages.end());
}

const WordForm &Wordlist::Form(int64_t id) const {
  auto it = position_.find(id);
  if (it == position_.end()) Fail(ErrorCode::kInvalidArgument, "no form " + std::to_string(id));
  return forms_[it->second];
}

std::vector<WordForm> Wordlist::FormsOfConcept(const std::string &gloss) const {
  std::vector<WordForm> out;
  if (auto it = index_.find(gloss); it != index_.end()) {
    for (int64_t id : it->second) out.push_back(Form(id));
  }
  return out;
}

bool Wordlist::HasGold() const {
  return !forms_.empty() && std::all_of(forms_.begin(), forms_.end(), [](const WordForm &f) {
           return f.gold_cogid.has_value();
         });
}

int64_t ParseInteger(const std::string &text, const std::string &what) {
  const std::string trimmed = Trim(text);
  int64_t value = 0;
  const auto *end = trimmed.data() + trimmed.size();
  auto [ptr, ec] = std::from_chars(trimmed.data(), end, value);
  if (trimmed.empty() || ec != std::errc() || ptr != end) {
    Fail(ErrorCode::kBadValue, what + ": '" + text + "' is not an integer");
  }
  return value;
}

Wordlist WordlistFromTable(const TsvTable &table, const SoundClassModel &model) {
  std::map<std::string, size_t> columns;
  for (const char *name : {"ID", "DOCULECT", "CONCEPT", "IPA"}) {
    auto index = table.ColumnIndex(name);
    if (!index) Fail(ErrorCode::kMissingColumn, std::string("wordlist lacks column ") + name);
    columns[name] = *index;
  }
  const auto cogid_col = table.ColumnIndex("COGID");

  std::vector<WordForm> forms;
  std::map<int64_t, size_t> seen;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    const size_t line = table.line_numbers[r];
    const std::string where = "line " + std::to_string(line);
    auto field = [&](size_t column) -> std::string {
      return column < row.size() ? Trim(row[column]) : std::string();
    };
    WordForm form;
    try {
      form.id = ParseInteger(field(columns["ID"]), "ID");
      form.doculect = field(columns["DOCULECT"]);
      form.gloss = field(columns["CONCEPT"]);
      if (form.doculect.empty()) Fail(ErrorCode::kBadValue, "empty DOCULECT");
      if (form.gloss.empty()) Fail(ErrorCode::kBadValue, "empty CONCEPT");
      form.tokens = TokenizeIpa(field(columns["IPA"]));
      if (cogid_col) {
        const std::string cogid = field(*cogid_col);
        if (!cogid.empty()) {
          form.gold_cogid = ParseInteger(cogid, "COGID");
          if (*form.gold_cogid <= 0) Fail(ErrorCode::kBadValue, "COGID must be positive");
        }
      }
    } catch (const Error &e) {
      throw Error(e.code(), where + ": " + e.what());
    }
    if (auto [it, inserted] = seen.emplace(form.id, line); !inserted) {
      Fail(ErrorCode::kDuplicateId, where + ": ID " + std::to_string(form.id) +
                                        " already used on line " + std::to_string(it->second));
    }
    form.classes = Classify(model, form.tokens);
    forms.push_back(std::move(form));
  }
  return Wordlist(std::move(forms));
}

Wordlist LoadWordlist(const std::filesystem::path &path, const SoundClassModel &model) {
  return WordlistFromTable(ReadTsv(path), model);
}

std::string FormatWordlist(const Wordlist &wordlist) {
  TsvTable table;
  table.header = {"ID", "DOCULECT", "CONCEPT", "IPA"};
  const bool with_cogid = std::any_of(wordlist.forms().begin(), wordlist.forms().end(),
                                      [](const WordForm &f) { return f.gold_cogid.has_value(); });
  if (with_cogid) table.header.push_back("COGID");
  for (const auto &form : wordlist.forms()) {
    std::string ipa;
    for (size_t i = 0; i < form.tokens.size(); ++i) {
      if (i > 0) ipa.push_back(' ');
      ipa += form.tokens[i];
    }
    std::vector<std::string> row = {std::to_string(form.id), form.doculect, form.gloss, ipa};
    if (with_cogid) row.push_back(form.gold_cogid ? std::to_string(*form.gold_cogid) : "");
    table.rows.push_back(std::move(row));
  }
  return FormatTsv(table);
}

void SaveWordlist(const Wordlist &wordlist, const std::filesystem::path &path) {
  WriteTextFile(path, FormatWordlist(wordlist));
}

}  // namespace lexiphy
