#pragma once

// Matrix files for the command-line tool. CSV: m lines of m comma-separated
// decimals, blank lines and lines starting with '#' ignored. JSON:
// {"m": int, "p": [[...]]} with numbers or decimal strings.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "mcgi/linalg.hpp"

namespace mcgi {

enum class MatrixFormat { Csv, Json };

std::optional<MatrixFormat> parse_format(std::string_view name);

Matrix parse_csv(std::string_view text);
Matrix parse_json(std::string_view text);
Matrix parse_matrix(std::string_view text, MatrixFormat format);

/// Shortest round-trip decimal for every entry, so parse_csv(to_csv(x)) == x bit for bit.
std::string to_csv(const Matrix& x);

struct LoadedMatrix {
  Matrix values;
  MatrixFormat format;
  std::string digest;  // "fnv1a64:<16 hex digits>" of the raw bytes
};

/// Reads a file; the format defaults to the extension (.json, else CSV).
LoadedMatrix load_matrix(const std::string& path, std::optional<MatrixFormat> format = std::nullopt);

std::uint64_t fnv1a64(std::string_view bytes);
std::string format_double(double x);

}  // namespace mcgi
