#include "hsicwb/grid.hpp"

#include <cmath>
#include <string>

#include "hsicwb/error.hpp"

namespace hsicwb {

namespace {

void check_conforming(std::span<const double> f, std::span<const double> g,
                      const Grid& grid) {
  if (f.size() != grid.size() || g.size() != grid.size()) {
    throw Error(ErrorKind::Dimension,
                "curve length " + std::to_string(f.size()) + "/" +
                    std::to_string(g.size()) + " does not match grid size " +
                    std::to_string(grid.size()));
  }
}

}  // namespace

Grid make_uniform_grid(std::size_t m) {
  if (m < 2) {
    throw Error(ErrorKind::InvalidGrid,
                "a grid needs at least 2 points, got " + std::to_string(m));
  }
  const double h = 1.0 / static_cast<double>(m - 1);
  std::vector<double> points(m);
  std::vector<double> weights(m, h);
  for (std::size_t k = 0; k < m; ++k) {
    points[k] = static_cast<double>(k) * h;
  }
  points.back() = 1.0;
  weights.front() = h / 2.0;
  weights.back() = h / 2.0;
  return Grid(std::move(points), std::move(weights), Grid::Kind::Functional);
}

Grid make_grid(std::vector<double> points) {
  const std::size_t m = points.size();
  if (m < 2) {
    throw Error(ErrorKind::InvalidGrid,
                "a grid needs at least 2 points, got " + std::to_string(m));
  }
  if (points.front() != 0.0 || points.back() != 1.0) {
    throw Error(ErrorKind::InvalidGrid, "grid must start at 0 and end at 1");
  }
  for (std::size_t k = 1; k < m; ++k) {
    if (!(points[k] > points[k - 1])) {
      throw Error(ErrorKind::InvalidGrid,
                  "grid points must be strictly increasing (index " +
                      std::to_string(k) + ")");
    }
  }
  std::vector<double> weights(m);
  weights.front() = (points[1] - points[0]) / 2.0;
  weights.back() = (points[m - 1] - points[m - 2]) / 2.0;
  for (std::size_t k = 1; k + 1 < m; ++k) {
    weights[k] = (points[k + 1] - points[k - 1]) / 2.0;
  }
  return Grid(std::move(points), std::move(weights), Grid::Kind::Functional);
}

Grid make_vector_grid(std::size_t d) {
  if (d < 1) {
    throw Error(ErrorKind::InvalidGrid, "vector dimension must be positive");
  }
  std::vector<double> points(d, 0.0);
  if (d > 1) {
    for (std::size_t k = 0; k < d; ++k) {
      points[k] = static_cast<double>(k) / static_cast<double>(d - 1);
    }
    points.back() = 1.0;
  }
  std::vector<double> weights(d, 1.0 / static_cast<double>(d));
  return Grid(std::move(points), std::move(weights), Grid::Kind::Vector);
}

FunctionalSample::FunctionalSample(RowMatrix values, Grid grid)
    : values_(std::move(values)), grid_(std::move(grid)) {
  if (values_.rows() < 1) {
    throw Error(ErrorKind::Dimension, "a sample needs at least one curve");
  }
  if (cols() != grid_.size()) {
    throw Error(ErrorKind::Dimension,
                "sample has " + std::to_string(cols()) +
                    " columns but the grid has " +
                    std::to_string(grid_.size()) + " points");
  }
  if (!values_.allFinite()) {
    throw Error(ErrorKind::Data, "sample contains non-finite values");
  }
}

FunctionalSample FunctionalSample::slice(std::size_t first,
                                         std::size_t count) const {
  if (count == 0 || first + count > rows()) {
    throw Error(ErrorKind::Dimension, "slice out of range");
  }
  return {values_.middleRows(static_cast<Eigen::Index>(first),
                             static_cast<Eigen::Index>(count)),
          grid_};
}

double inner_product(std::span<const double> f, std::span<const double> g,
                     const Grid& grid) {
  check_conforming(f, g, grid);
  const auto w = grid.weights();
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    acc += w[k] * f[k] * g[k];
  }
  return acc;
}

double norm(std::span<const double> f, const Grid& grid) {
  return std::sqrt(inner_product(f, f, grid));
}

double squared_distance(std::span<const double> f, std::span<const double> g,
                        const Grid& grid) {
  check_conforming(f, g, grid);
  const auto w = grid.weights();
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double d = f[k] - g[k];
    acc += w[k] * d * d;
  }
  return acc;
}

double distance(std::span<const double> f, std::span<const double> g,
                const Grid& grid) {
  return std::sqrt(squared_distance(f, g, grid));
}

}  // namespace hsicwb
