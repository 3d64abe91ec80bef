#include "mcgi/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "mcgi/error.hpp"

namespace mcgi {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_decimal(std::string_view field, std::size_t line) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    std::ostringstream msg;
    msg << "line " << line << ": cannot parse '" << field << "' as a number";
    throw Error(ErrorCode::ParseError, msg.str());
  }
  return value;
}

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  if (m == 0) throw Error(ErrorCode::ParseError, "no matrix rows");
  Matrix out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != m) {
      std::ostringstream msg;
      msg << "row " << i + 1 << " has " << row.size() << " entries, expected " << m;
      throw Error(ErrorCode::ShapeMismatch, msg.str());
    }
    for (Eigen::Index j = 0; j < m; ++j) out(i, j) = row[static_cast<std::size_t>(j)];
  }
  return out;
}

}  // namespace

std::optional<MatrixFormat> parse_format(std::string_view name) {
  if (name == "csv") return MatrixFormat::Csv;
  if (name == "json") return MatrixFormat::Json;
  return std::nullopt;
}

Matrix parse_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> row;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(parse_decimal(rest.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    rows.push_back(std::move(row));
  }
  return from_rows(rows);
}

Matrix parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object() || !doc.contains("p") || !doc["p"].is_array()) {
    throw Error(ErrorCode::ParseError, "expected an object with array field \"p\"");
  }
  std::vector<std::vector<double>> rows;
  std::size_t i = 0;
  for (const auto& jrow : doc["p"]) {
    ++i;
    if (!jrow.is_array()) throw Error(ErrorCode::ParseError, "row " + std::to_string(i) + " is not an array");
    std::vector<double> row;
    for (const auto& cell : jrow) {
      if (cell.is_number()) {
        row.push_back(cell.get<double>());
      } else if (cell.is_string()) {
        row.push_back(parse_decimal(cell.get_ref<const std::string&>(), i));
      } else {
        throw Error(ErrorCode::ParseError, "row " + std::to_string(i) + " holds a non-numeric entry");
      }
    }
    rows.push_back(std::move(row));
  }
  Matrix out = from_rows(rows);
  if (!doc.contains("m") || !doc["m"].is_number_integer()) {
    throw Error(ErrorCode::ParseError, "expected an integer field \"m\"");
  }
  if (doc["m"].get<long long>() != out.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "field \"m\" does not match the number of rows of \"p\"");
  }
  return out;
}

Matrix parse_matrix(std::string_view text, MatrixFormat format) {
  return format == MatrixFormat::Json ? parse_json(text) : parse_csv(text);
}

std::string format_double(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ec == std::errc{} ? ptr : buf);
}

std::string to_csv(const Matrix& x) {
  std::string out;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (j) out += ',';
      out += format_double(x(i, j));
    }
    out += '\n';
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

LoadedMatrix load_matrix(const std::string& path, std::optional<MatrixFormat> format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open input file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (!format) {
    const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    format = json ? MatrixFormat::Json : MatrixFormat::Csv;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
  return {parse_matrix(text, *format), *format, std::string("fnv1a64:") + hex};
}

}  // namespace mcgi
