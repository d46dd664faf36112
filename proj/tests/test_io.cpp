#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "bsel/io.hpp"
#include "bsel/rng.hpp"

using namespace bsel;
namespace fs = std::filesystem;

namespace {

std::string tmp_path(const std::string& name) {
  return (fs::temp_directory_path() / ("bsel_io_" + name)).string();
}

Matrix random_matrix(int r, int c, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.normal() * std::pow(10.0, (i + j) % 7 - 3);
  return m;
}

}  // namespace

TEST_CASE("fmt round-trips doubles exactly") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.normal() * std::pow(10.0, static_cast<int>(rng.below(21)) - 10);
    CHECK(std::stod(io::fmt(x)) == x);
  }
  CHECK(std::stod(io::fmt(0.1)) == 0.1);
  CHECK(io::fmt(1.0) == "1");
}

TEST_CASE("delimited round trip preserves names and values") {
  const std::string path = tmp_path("rt.tsv");
  const Matrix m = random_matrix(13, 4, 9);
  io::write_delimited(path, {"a", "b", "c", "d"}, m);
  const io::NamedMatrix back = io::read_delimited(path);
  REQUIRE(back.names == std::vector<std::string>{"a", "b", "c", "d"});
  REQUIRE(back.values.rows() == 13);
  CHECK((back.values - m).cwiseAbs().maxCoeff() == 0.0);
  fs::remove(path);
}

TEST_CASE("comma-separated input is sniffed") {
  const std::string path = tmp_path("comma.csv");
  {
    std::ofstream out(path);
    out << "x,y\n1,2\n3.5,-4\n";
  }
  const io::NamedMatrix m = io::read_delimited(path);
  CHECK(m.names == std::vector<std::string>{"x", "y"});
  CHECK(m.values(1, 0) == 3.5);
  CHECK(m.values(1, 1) == -4.0);
  fs::remove(path);
}

TEST_CASE("ragged or non-numeric rows are rejected") {
  const std::string path = tmp_path("bad.tsv");
  {
    std::ofstream out(path);
    out << "x\ty\n1\t2\n3\n";
  }
  CHECK_THROWS(io::read_delimited(path));
  {
    std::ofstream out(path);
    out << "x\ty\n1\ttwo\n";
  }
  CHECK_THROWS(io::read_delimited(path));
  fs::remove(path);
}

TEST_CASE("binary round trip is bit exact and sniffed by magic") {
  const std::string path = tmp_path("rt.bin");
  const Matrix m = random_matrix(7, 9, 4);
  io::write_binary(path, m);
  CHECK((io::read_binary(path) - m).cwiseAbs().maxCoeff() == 0.0);
  const io::NamedMatrix sniffed = io::read_matrix(path);
  CHECK((sniffed.values - m).cwiseAbs().maxCoeff() == 0.0);
  // binary files carry no header; placeholder names are synthesized
  CHECK(sniffed.names == std::vector<std::string>{"c0", "c1", "c2", "c3", "c4", "c5",
                                                  "c6", "c7", "c8"});
  fs::remove(path);
}

TEST_CASE("read_dataset extracts the named response column") {
  const std::string path = tmp_path("data.tsv");
  {
    std::ofstream out(path);
    out << "intercept\tx1\ty\n1\t0.5\t2\n1\t-0.5\t0\n1\t1.5\t4\n";
  }
  const Dataset d = io::read_dataset(path, "y", ResponseKind::continuous);
  CHECK(d.n() == 3);
  CHECK(d.p() == 2);
  CHECK(d.column_names == std::vector<std::string>{"intercept", "x1"});
  CHECK(d.y(2) == 4.0);
  CHECK(d.intercept_column() == 0);
  CHECK_THROWS(io::read_dataset(path, "missing", ResponseKind::continuous));
  // a 0/1 check applies only to binary responses
  CHECK_THROWS(io::read_dataset(path, "y", ResponseKind::binary));
  fs::remove(path);
}

TEST_CASE("write_text_atomic leaves no partial files") {
  const std::string path = tmp_path("atomic.txt");
  io::write_text_atomic(path, "hello\n");
  io::write_text_atomic(path, "world\n");
  std::ifstream in(path);
  std::string s;
  std::getline(in, s);
  CHECK(s == "world");
  CHECK(!fs::exists(path + ".tmp"));
  fs::remove(path);
}
