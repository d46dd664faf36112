#pragma once

#include <string>
#include <vector>

#include "bsel/types.hpp"

namespace bsel::io {

// Shortest round-trippable decimal representation; used everywhere a
// double is printed so that reports are byte-stable.
std::string fmt(double x);

struct NamedMatrix {
  std::vector<std::string> names;
  Matrix values;
};

// Delimited text with one header row; tab or comma separated (sniffed).
NamedMatrix read_delimited(const std::string& path);
void write_delimited(const std::string& path, const std::vector<std::string>& names,
                     const Matrix& values);

// Compact binary alternative: magic "BSELMAT1", little-endian u64 row and
// column counts, then row-major little-endian f64.
Matrix read_binary(const std::string& path);
void write_binary(const std::string& path, const Matrix& values);

// Reads either format, keyed on the magic. Binary matrices carry no names.
NamedMatrix read_matrix(const std::string& path);

Dataset read_dataset(const std::string& path, const std::string& response_column,
                     ResponseKind kind);

// Write via temp file + rename so readers never observe a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace bsel::io
