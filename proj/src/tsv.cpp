#include "lexiphy/tsv.hpp"

#include <fstream>
#include <sstream>

#include "lexiphy/error.hpp"

namespace lexiphy {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyForm: return "EmptyForm";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kBadValue: return "BadValue";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kBothEmpty: return "BothEmpty";
    case ErrorCode::kConceptMismatch: return "ConceptMismatch";
    case ErrorCode::kLabelMismatch: return "LabelMismatch";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kNoInternalEdge: return "NoInternalEdge";
    case ErrorCode::kTooFewLanguages: return "TooFewLanguages";
    case ErrorCode::kDomainMismatch: return "DomainMismatch";
    case ErrorCode::kUnknownLeaf: return "UnknownLeaf";
    case ErrorCode::kLeafSetMismatch: return "LeafSetMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNumeric: return "NumericError";
  }
  return "Error";
}

std::optional<size_t> TsvTable::ColumnIndex(const std::string &name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> SplitString(const std::string &text, char separator) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == separator) {
      parts.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  parts.push_back(std::move(current));
  return parts;
}

std::string Trim(const std::string &text) {
  const char *space = " \t\r\n";
  const auto begin = text.find_first_not_of(space);
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(space);
  return text.substr(begin, end - begin + 1);
}

std::string ReadTextFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteTextFile(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

TsvTable ParseTsv(const std::string &text) {
  TsvTable table;
  std::istringstream in(text);
  std::string line;
  size_t line_number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = SplitString(line, '\t');
    if (!have_header) {
      if (line_number == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) {
        fields[0] = fields[0].substr(3);
      }
      for (auto &field : fields) field = Trim(field);
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_number);
  }
  if (!have_header) Fail(ErrorCode::kMissingColumn, "missing header row");
  return table;
}

TsvTable ReadTsv(const std::filesystem::path &path) {
  return ParseTsv(ReadTextFile(path));
}

std::string FormatTsv(const TsvTable &table) {
  std::string out;
  auto append_row = [&out](const std::vector<std::string> &row) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out.push_back('\t');
      out += row[i];
    }
    out.push_back('\n');
  };
  append_row(table.header);
  for (const auto &row : table.rows) append_row(row);
  return out;
}

}  // namespace lexiphy
