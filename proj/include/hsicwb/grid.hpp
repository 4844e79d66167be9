#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hsicwb {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Discretization of [0,1] together with quadrature weights.
///
/// Functional grids carry trapezoid weights. Vector grids represent R^d with
/// uniform weights 1/d, so the induced inner product is the Euclidean one
/// scaled by 1/d; a vector grid may have a single point (scalar series).
class Grid {
 public:
  enum class Kind { Functional, Vector };

  [[nodiscard]] std::span<const double> points() const noexcept {
    return points_;
  }
  [[nodiscard]] std::span<const double> weights() const noexcept {
    return weights_;
  }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] Kind kind() const noexcept { return kind_; }

  bool operator==(const Grid&) const = default;

 private:
  friend Grid make_uniform_grid(std::size_t m);
  friend Grid make_grid(std::vector<double> points);
  friend Grid make_vector_grid(std::size_t d);

  Grid(std::vector<double> points, std::vector<double> weights, Kind kind)
      : points_(std::move(points)), weights_(std::move(weights)), kind_(kind) {}

  std::vector<double> points_;
  std::vector<double> weights_;
  Kind kind_ = Kind::Functional;
};

/// Equally spaced grid 0 = t_1 < ... < t_m = 1 with composite trapezoid
/// weights. Throws ErrorKind::InvalidGrid for m < 2.
[[nodiscard]] Grid make_uniform_grid(std::size_t m);

/// Arbitrary strictly increasing points from 0 to 1 with the general trapezoid
/// weights w_k = (t_{k+1} - t_{k-1}) / 2 (one-sided at the ends).
[[nodiscard]] Grid make_grid(std::vector<double> points);

/// Grid standing in for R^d: d points, uniform weights 1/d.
[[nodiscard]] Grid make_vector_grid(std::size_t d);

/// n curves on a common grid; row i holds curve i.
class FunctionalSample {
 public:
  FunctionalSample(RowMatrix values, Grid grid);

  [[nodiscard]] std::size_t rows() const noexcept {
    return static_cast<std::size_t>(values_.rows());
  }
  [[nodiscard]] std::size_t cols() const noexcept {
    return static_cast<std::size_t>(values_.cols());
  }
  [[nodiscard]] const RowMatrix& values() const noexcept { return values_; }
  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }

  [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * cols(), cols()};
  }

  /// Rows [first, first + count).
  [[nodiscard]] FunctionalSample slice(std::size_t first,
                                       std::size_t count) const;

  bool operator==(const FunctionalSample& other) const {
    return grid_ == other.grid_ && values_ == other.values_;
  }

 private:
  RowMatrix values_;
  Grid grid_;
};

/// Sum_k w_k f(t_k) g(t_k). Throws ErrorKind::Dimension on length mismatch.
[[nodiscard]] double inner_product(std::span<const double> f,
                                   std::span<const double> g,
                                   const Grid& grid);

[[nodiscard]] double norm(std::span<const double> f, const Grid& grid);

[[nodiscard]] double distance(std::span<const double> f,
                              std::span<const double> g, const Grid& grid);

/// ||f - g||^2 without the square root; the quantity the Gaussian kernel and
/// the median heuristic consume.
[[nodiscard]] double squared_distance(std::span<const double> f,
                                      std::span<const double> g,
                                      const Grid& grid);

}  // namespace hsicwb
