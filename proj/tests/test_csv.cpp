#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>

#include <doctest.h>

#include <hsicwb/csv.hpp>
#include <hsicwb/error.hpp>

using namespace hsicwb;

namespace {

std::string error_text(auto&& fn, ErrorKind expected) {
  try {
    fn();
  } catch (const Error& e) {
    CHECK(e.kind() == expected);
    return e.what();
  }
  FAIL("expected an hsicwb::Error");
  return {};
}

}  // namespace

TEST_CASE("rows become observations on a uniform grid") {
  const auto s = parse_sample_csv("1,2,3\n4,5,6\n");
  CHECK(s.rows() == 2);
  CHECK(s.cols() == 3);
  CHECK(s.grid() == make_uniform_grid(3));
  CHECK(s.row(1)[0] == 4.0);
}

TEST_CASE("a leading 0..1 increasing row is read as the grid") {
  const auto s = parse_sample_csv("0,0.25,1\n1,2,3\n");
  CHECK(s.rows() == 1);
  CHECK(s.grid() == make_grid({0.0, 0.25, 1.0}));

  CsvOptions absent;
  absent.grid_row = GridRow::Absent;
  CHECK(parse_sample_csv("0,0.25,1\n1,2,3\n", absent).rows() == 2);

  CsvOptions present;
  present.grid_row = GridRow::Present;
  error_text([&] { (void)parse_sample_csv("0,2,1\n1,2,3\n", present); },
             ErrorKind::Data);
  // A single row is data even when it looks like a grid.
  CHECK(parse_sample_csv("0,0.5,1\n").rows() == 1);
}

TEST_CASE("vector mode and single columns use uniform 1/d weights") {
  CsvOptions opts;
  opts.vector = true;
  CHECK(parse_sample_csv("1,2\n3,4\n", opts).grid() == make_vector_grid(2));
  CHECK(parse_sample_csv("1\n2\n3\n").grid() == make_vector_grid(1));
}

TEST_CASE("malformed input reports row and column") {
  const auto msg = error_text([] { (void)parse_sample_csv("1,2\n3,x\n"); },
                              ErrorKind::Data);
  CHECK(msg.find("row 2, column 2") != std::string::npos);
  const auto ragged = error_text(
      [] { (void)parse_sample_csv("1,2\n3,4,5\n"); }, ErrorKind::Data);
  CHECK(ragged.find("row 2") != std::string::npos);
  error_text([] { (void)parse_sample_csv("1,,2\n"); }, ErrorKind::Data);
  error_text([] { (void)parse_sample_csv("1,nan\n"); }, ErrorKind::Data);
  error_text([] { (void)parse_sample_csv("\n\n"); }, ErrorKind::Data);
}

TEST_CASE("blank lines, CRLF, spaces and a BOM are tolerated") {
  const auto s = parse_sample_csv("\xEF\xBB\xBF" "1, 2\r\n\r\n 3 ,+4\r\n");
  CHECK(s.rows() == 2);
  CHECK(s.row(1)[1] == 4.0);
}

TEST_CASE("writing and reading round-trips bit for bit") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  RowMatrix v(4, 6);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v.data()[i] = normal(rng) * 1e3;
  }
  const FunctionalSample s(v, make_grid({0.0, 0.1, 0.3, 0.35, 0.8, 1.0}));
  std::ostringstream os;
  write_sample_csv(os, s, true);
  CHECK(parse_sample_csv(os.str()) == s);

  const auto path =
      (std::filesystem::temp_directory_path() / "hsicwb_csv_roundtrip.csv")
          .string();
  write_sample_csv(path, s, true);
  CsvOptions present;
  present.grid_row = GridRow::Present;
  CHECK(read_sample_csv(path, present) == s);
  std::remove(path.c_str());
}

TEST_CASE("missing files are i/o errors") {
  error_text([] { (void)read_sample_csv("/nonexistent/hsicwb.csv"); },
             ErrorKind::Io);
}
