#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include <hsicwb/error.hpp>
#include <hsicwb/grid.hpp>

using namespace hsicwb;

namespace {

std::vector<double> on_grid(const Grid& g, double (*f)(double)) {
  std::vector<double> v;
  for (const double t : g.points()) {
    v.push_back(f(t));
  }
  return v;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an hsicwb::Error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("uniform grid carries trapezoid weights") {
  const auto g = make_uniform_grid(5);
  REQUIRE(g.size() == 5);
  CHECK(g.kind() == Grid::Kind::Functional);
  const std::vector<double> expected{0.125, 0.25, 0.25, 0.25, 0.125};
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(g.weights()[k] == doctest::Approx(expected[k]).epsilon(1e-15));
    CHECK(g.points()[k] == doctest::Approx(0.25 * static_cast<double>(k)));
  }
  CHECK(g.points().back() == 1.0);
}

TEST_CASE("grids reject fewer than two points or bad point sets") {
  CHECK(kind_of([] { (void)make_uniform_grid(1); }) == ErrorKind::InvalidGrid);
  CHECK(kind_of([] { (void)make_uniform_grid(0); }) == ErrorKind::InvalidGrid);
  CHECK(kind_of([] { (void)make_grid({0.0, 0.5, 0.5, 1.0}); }) ==
        ErrorKind::InvalidGrid);
  CHECK(kind_of([] { (void)make_grid({0.1, 1.0}); }) == ErrorKind::InvalidGrid);
  CHECK(kind_of([] { (void)make_grid({0.0, 0.9}); }) == ErrorKind::InvalidGrid);
  CHECK(kind_of([] { (void)make_vector_grid(0); }) == ErrorKind::InvalidGrid);
}

TEST_CASE("non-uniform grid uses the general trapezoid formula") {
  const auto g = make_grid({0.0, 0.25, 1.0});
  CHECK(g.weights()[0] == doctest::Approx(0.125));
  CHECK(g.weights()[1] == doctest::Approx(0.5));
  CHECK(g.weights()[2] == doctest::Approx(0.375));
}

TEST_CASE("vector grid has uniform weights") {
  const auto g = make_vector_grid(4);
  CHECK(g.kind() == Grid::Kind::Vector);
  for (const double w : g.weights()) {
    CHECK(w == 0.25);
  }
  const auto scalar = make_vector_grid(1);
  CHECK(scalar.weights()[0] == 1.0);
}

TEST_CASE("norm and distance on constant curves") {
  const auto g = make_uniform_grid(11);
  const std::vector<double> zero(11, 0.0);
  const std::vector<double> two(11, 2.0);
  CHECK(norm(zero, g) == 0.0);
  CHECK(distance(two, two, g) == 0.0);
  CHECK(distance(two, zero, g) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("quadrature is exact for affine integrands on any grid") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> pts{0.0, 1.0};
    for (int k = 0; k < 7; ++k) {
      pts.push_back(u(rng));
    }
    std::sort(pts.begin(), pts.end());
    const auto g = make_grid(pts);
    const double a = u(rng) * 4 - 2;
    const double b = u(rng) * 4 - 2;
    std::vector<double> p;
    for (const double t : g.points()) {
      p.push_back(a + b * t);
    }
    const std::vector<double> one(g.size(), 1.0);
    CHECK(inner_product(p, one, g) ==
          doctest::Approx(a + b / 2).epsilon(1e-14));
  }
}

TEST_CASE("trapezoid error for t^2 falls as m^-2") {
  double previous = 0.0;
  for (const std::size_t intervals : {10, 20, 40, 80, 160}) {
    const auto g = make_uniform_grid(intervals + 1);
    const auto sq = on_grid(g, [](double t) { return t * t; });
    const std::vector<double> one(g.size(), 1.0);
    const double err = std::abs(inner_product(sq, one, g) - 1.0 / 3.0);
    if (previous > 0.0) {
      CHECK(previous / err == doctest::Approx(4.0).epsilon(0.2));
    }
    previous = err;
  }
}

TEST_CASE("Cauchy-Schwarz and the triangle inequality on random curves") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  const auto g = make_uniform_grid(33);
  auto draw = [&] {
    std::vector<double> v(g.size());
    for (auto& x : v) {
      x = normal(rng);
    }
    return v;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = draw();
    const auto h = draw();
    const auto k = draw();
    CHECK(std::abs(inner_product(f, h, g)) <= norm(f, g) * norm(h, g) + 1e-10);
    CHECK(distance(f, k, g) <= distance(f, h, g) + distance(h, k, g) + 1e-10);
    CHECK(squared_distance(f, h, g) ==
          doctest::Approx(distance(f, h, g) * distance(f, h, g)));
  }
}

TEST_CASE("length mismatch is a dimension error") {
  const auto g = make_uniform_grid(3);
  const std::vector<double> a(3, 1.0);
  const std::vector<double> b(2, 1.0);
  CHECK(kind_of([&] { (void)inner_product(a, b, g); }) ==
        ErrorKind::Dimension);
  CHECK(kind_of([&] { (void)norm(b, g); }) == ErrorKind::Dimension);
}

TEST_CASE("samples validate shape and finiteness") {
  RowMatrix v(2, 3);
  v << 1, 2, 3, 4, 5, 6;
  const FunctionalSample s(v, make_uniform_grid(3));
  CHECK(s.rows() == 2);
  CHECK(s.cols() == 3);
  CHECK(s.row(1)[2] == 6.0);
  const auto tail = s.slice(1, 1);
  CHECK(tail.rows() == 1);
  CHECK(tail.row(0)[0] == 4.0);

  CHECK(kind_of([&] { FunctionalSample(v, make_uniform_grid(4)); }) ==
        ErrorKind::Dimension);
  RowMatrix bad = v;
  bad(0, 1) = std::nan("");
  CHECK(kind_of([&] { FunctionalSample(bad, make_uniform_grid(3)); }) ==
        ErrorKind::Data);
  CHECK(kind_of([&] { (void)s.slice(1, 2); }) == ErrorKind::Dimension);
}
