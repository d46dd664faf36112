#include "bsel/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace bsel::io {

namespace {

constexpr char kMagic[8] = {'B', 'S', 'E', 'L', 'M', 'A', 'T', '1'};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

char sniff_sep(const std::string& header) {
  if (header.find('\t') != std::string::npos) return '\t';
  if (header.find(',') != std::string::npos) return ',';
  return '\t';
}

}  // namespace

std::string fmt(double x) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    double back;
    std::sscanf(buf, "%lf", &back);
    if (back == x || (std::isnan(back) && std::isnan(x))) break;
  }
  return buf;
}

NamedMatrix read_delimited(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("empty file: " + path);
  const char sep = sniff_sep(header);
  NamedMatrix m;
  m.names = split(header, sep);
  const std::size_t ncol = m.names.size();

  std::vector<double> data;
  std::string line;
  std::size_t nrow = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split(line, sep);
    if (fields.size() != ncol)
      throw std::runtime_error(path + ": row " + std::to_string(nrow + 1) + " has " +
                               std::to_string(fields.size()) + " fields, header has " +
                               std::to_string(ncol));
    for (const auto& f : fields) {
      std::size_t pos = 0;
      double v;
      try {
        v = std::stod(f, &pos);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": non-numeric field '" + f + "'");
      }
      if (pos != f.size()) throw std::runtime_error(path + ": non-numeric field '" + f + "'");
      data.push_back(v);
    }
    ++nrow;
  }
  m.values.resize(nrow, ncol);
  for (std::size_t i = 0; i < nrow; ++i)
    for (std::size_t j = 0; j < ncol; ++j) m.values(i, j) = data[i * ncol + j];
  return m;
}

void write_delimited(const std::string& path, const std::vector<std::string>& names,
                     const Matrix& values) {
  if (static_cast<Eigen::Index>(names.size()) != values.cols())
    throw std::invalid_argument("write_delimited: name count != column count");
  std::ostringstream out;
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (j) out << '\t';
    out << names[j];
  }
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j) out << '\t';
      out << fmt(values(i, j));
    }
    out << '\n';
  }
  write_text_atomic(path, out.str());
}

Matrix read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error(path + ": bad magic");
  std::uint64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), 8);
  in.read(reinterpret_cast<char*>(&cols), 8);
  if (!in) throw std::runtime_error(path + ": truncated header");
  Matrix m(rows, cols);
  std::vector<double> row(cols);
  for (std::uint64_t i = 0; i < rows; ++i) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(8 * cols));
    if (!in) throw std::runtime_error(path + ": truncated data");
    for (std::uint64_t j = 0; j < cols; ++j) m(i, j) = row[j];
  }
  return m;
}

void write_binary(const std::string& path, const Matrix& values) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + tmp);
    out.write(kMagic, 8);
    const std::uint64_t rows = values.rows(), cols = values.cols();
    out.write(reinterpret_cast<const char*>(&rows), 8);
    out.write(reinterpret_cast<const char*>(&cols), 8);
    std::vector<double> row(cols);
    for (std::uint64_t i = 0; i < rows; ++i) {
      for (std::uint64_t j = 0; j < cols; ++j) row[j] = values(i, j);
      out.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(8 * cols));
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed: " + path);
}

NamedMatrix read_matrix(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw std::runtime_error("cannot open file: " + path);
  char magic[8] = {};
  probe.read(magic, 8);
  probe.close();
  if (std::memcmp(magic, kMagic, 8) == 0) {
    NamedMatrix m;
    m.values = read_binary(path);
    m.names.resize(m.values.cols());
    for (Eigen::Index j = 0; j < m.values.cols(); ++j)
      m.names[j] = "c" + std::to_string(j);
    return m;
  }
  return read_delimited(path);
}

Dataset read_dataset(const std::string& path, const std::string& response_column,
                     ResponseKind kind) {
  NamedMatrix m = read_delimited(path);
  int ycol = -1;
  for (std::size_t j = 0; j < m.names.size(); ++j)
    if (m.names[j] == response_column) ycol = static_cast<int>(j);
  if (ycol < 0)
    throw std::runtime_error(path + ": response column '" + response_column + "' not found");
  Dataset d;
  d.response_kind = kind;
  d.y = m.values.col(ycol);
  d.X.resize(m.values.rows(), m.values.cols() - 1);
  for (Eigen::Index j = 0, k = 0; j < m.values.cols(); ++j) {
    if (j == ycol) continue;
    d.X.col(k) = m.values.col(j);
    d.column_names.push_back(m.names[j]);
    ++k;
  }
  d.validate();
  return d;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed: " + path);
}

}  // namespace bsel::io
