#include "raman/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <sstream>

#include "raman/errors.hpp"

namespace raman::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& cell, std::size_t line, const std::string& column) {
  double value = 0.0;
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (ec != std::errc() || ptr != end || cell.empty()) {
    throw ParseError(line, "column '" + column + "': cannot parse '" + cell + "' as a number");
  }
  return value;
}

}  // namespace

std::vector<fit::NoiseDataset> read_datasets(std::istream& in, const std::string& default_label) {
  std::string raw;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::size_t header_line = 0;
  std::map<std::string, std::size_t> column;
  std::vector<std::string> label_order;
  std::map<std::string, std::vector<fit::DataPoint>> groups;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::vector<std::string> cells = split(line);
    if (header.empty()) {
      header = cells;
      header_line = line_no;
      for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
      for (const char* required : {"gq_linear", "R_linear"}) {
        if (!column.contains(required)) {
          throw ParseError(line_no, std::string("header is missing column '") + required + "'");
        }
      }
      continue;
    }
    if (cells.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                    std::to_string(cells.size()));
    }
    fit::DataPoint p;
    p.gq = parse_number(cells[column["gq_linear"]], line_no, "gq_linear");
    p.R = parse_number(cells[column["R_linear"]], line_no, "R_linear");
    if (column.contains("sigma") && !cells[column["sigma"]].empty()) {
      p.sigma = parse_number(cells[column["sigma"]], line_no, "sigma");
      if (!(*p.sigma > 0.0)) throw ParseError(line_no, "sigma must be > 0");
    }
    if (!(p.gq >= 1.0)) throw ParseError(line_no, "gq_linear must be >= 1");
    if (!(p.R > 0.0 && p.R <= 1.05)) throw ParseError(line_no, "R_linear must lie in (0, 1.05]");
    const std::string label = column.contains("label") ? cells[column["label"]] : default_label;
    if (!groups.contains(label)) label_order.push_back(label);
    groups[label].push_back(p);
  }
  if (header.empty()) throw ParseError(line_no == 0 ? 1 : line_no, "no header row found");
  if (groups.empty()) throw ParseError(header_line, "no data rows after header");

  std::vector<fit::NoiseDataset> out;
  for (const std::string& label : label_order) out.emplace_back(label, std::move(groups[label]));
  return out;
}

}  // namespace raman::io
