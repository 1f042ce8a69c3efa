#include "ciforge/csv_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "ciforge/errors.hpp"

namespace ciforge {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw InputError("line " + std::to_string(line) + ": " + what);
}

template <class T>
T parse_number(std::string_view field, std::size_t line, std::string_view column) {
  T value{};
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    fail(line, "cannot parse " + std::string(column) + " value '" + std::string(field) + "'");
  }
  return value;
}

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::vector<RawRow> parse_prediction_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!read_line(in, line)) throw InputError("empty prediction file");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_fields(line);
  if (header.size() < 4 || header[0] != "sample_id" || header[1] != "fold" || header[2] != "label") {
    fail(line_no, "header must start with sample_id,fold,label followed by score columns");
  }
  const std::size_t configs = header.size() - 3;

  std::vector<RawRow> rows;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      fail(line_no, "ragged row: expected " + std::to_string(header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    }
    RawRow row;
    row.line = line_no;
    row.sample_id = std::string(fields[0]);
    if (row.sample_id.empty()) fail(line_no, "empty sample_id");
    row.fold = parse_number<long long>(fields[1], line_no, "fold");
    row.label = parse_number<long long>(fields[2], line_no, "label");
    row.scores.reserve(configs);
    for (std::size_t j = 0; j < configs; ++j) {
      row.scores.push_back(parse_number<double>(fields[3 + j], line_no, "score"));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

PredictionMatrix read_prediction_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  const auto rows = parse_prediction_csv(in);
  return validate_matrix(rows);
}

void write_prediction_csv(std::ostream& out, const PredictionMatrix& pm) {
  std::string line = "sample_id,fold,label";
  for (std::size_t j = 0; j < pm.configs(); ++j) line += ",c" + std::to_string(j);
  out << line << '\n';
  for (std::size_t i = 0; i < pm.samples(); ++i) {
    line = std::to_string(i) + ',' + std::to_string(pm.fold_of()[i]) + ',' +
           std::to_string(static_cast<int>(pm.labels()[i]));
    for (std::size_t j = 0; j < pm.configs(); ++j) {
      line += ',';
      line += format_double(pm.score(i, j));
    }
    out << line << '\n';
  }
}

void write_prediction_csv(const std::filesystem::path& path, const PredictionMatrix& pm) {
  auto out = open_out(path);
  write_prediction_csv(out, pm);
}

std::vector<double> parse_truth_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!read_line(in, line) || line != "config_index,true_auc") {
    fail(line_no, "truth header must be config_index,true_auc");
  }
  std::vector<double> truth;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 2) fail(line_no, "expected 2 fields");
    const auto index = parse_number<std::size_t>(fields[0], line_no, "config_index");
    if (index != truth.size()) fail(line_no, "config_index out of sequence");
    truth.push_back(parse_number<double>(fields[1], line_no, "true_auc"));
  }
  return truth;
}

std::vector<double> read_truth_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_truth_csv(in);
}

void write_truth_csv(std::ostream& out, std::span<const double> true_auc) {
  out << "config_index,true_auc\n";
  for (std::size_t j = 0; j < true_auc.size(); ++j) {
    out << j << ',' << format_double(true_auc[j]) << '\n';
  }
}

void write_truth_csv(const std::filesystem::path& path, std::span<const double> true_auc) {
  auto out = open_out(path);
  write_truth_csv(out, true_auc);
}

}  // namespace ciforge
