#include "sca/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace sca {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  if (line.find(',') != std::string::npos) {
    std::string_view rest(line);
    while (true) {
      const auto pos = rest.find(',');
      out.push_back(trim(rest.substr(0, pos)));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
  } else {
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
  }
  return out;
}

std::string cell_name(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row + 1) + ", column " + std::to_string(col + 1);
}

}  // namespace

SampleLayout parse_sample_layout(const std::string& text) {
  if (text == "rows") return SampleLayout::Rows;
  if (text == "cols" || text == "columns") return SampleLayout::Cols;
  throw std::invalid_argument("sample layout must be 'rows' or 'cols', got '" + text + "'");
}

DataMatrix parse_csv(const std::string& text, const CsvLayout& layout) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  bool header_pending = layout.header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (header_pending) {
      names = std::move(fields);
      header_pending = false;
      continue;
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string& f = fields[c];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
        throw CsvError("non-numeric cell '" + f + "' at " + cell_name(line_no - 1, c));
      }
      if (!std::isfinite(v)) {
        throw CsvError("non-finite cell '" + f + "' at " + cell_name(line_no - 1, c));
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw CsvError("ragged row at line " + std::to_string(line_no) + ": " +
                     std::to_string(row.size()) + " fields, expected " +
                     std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError("no numeric rows");

  const Index r = static_cast<Index>(rows.size());
  const Index c = static_cast<Index>(rows.front().size());
  Matrix table(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) table(i, j) = rows[i][j];
  }
  if (layout.samples == SampleLayout::Rows) {
    if (!names.empty() && static_cast<Index>(names.size()) != c) names.clear();
    return DataMatrix(table.transpose(), std::move(names));
  }
  return DataMatrix(std::move(table));
}

DataMatrix load_csv(const std::filesystem::path& path, const CsvLayout& layout) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str(), layout);
  } catch (const CsvError& e) {
    throw CsvError(path.string() + ": " + e.what());
  }
}

void save_csv(const std::filesystem::path& path, const DataMatrix& data) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot write " + path.string());
  const auto& names = data.variable_names();
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  if (!names.empty()) out << '\n';
  char buf[32];
  for (Index i = 0; i < data.samples(); ++i) {
    for (Index j = 0; j < data.variables(); ++j) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, data.values()(j, i));
      if (j) out << ',';
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
  if (!out) throw CsvError("write failed: " + path.string());
}

}  // namespace sca
