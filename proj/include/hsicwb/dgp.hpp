#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include <Eigen/Dense>

#include "hsicwb/grid.hpp"
#include "hsicwb/rng.hpp"

namespace hsicwb {

/// Common settings of the recursive generators. Every generator is a pure
/// function of this struct: the seed fixes all randomness.
struct DgpConfig {
  std::size_t n = 100;
  std::size_t burn_in = 100;
  Grid grid = make_uniform_grid(1001);
  std::uint64_t seed = 0;
};

/// Standard Wiener path on the grid: W(t_1) = 0 and independent N(0, dt)
/// increments.
[[nodiscard]] Eigen::VectorXd wiener(const Grid& grid, Rng& rng);

/// Covariance matrix exp(-|t - t'| / 2) on the grid points.
[[nodiscard]] Eigen::MatrixXd exp_covariance(const Grid& grid);

/// Zero-mean Gaussian vectors with a fixed covariance, drawn through its
/// Cholesky factor. If the plain factorization fails, diagonal jitter starts
/// at 1e-10 and grows tenfold up to 1e-6 before ErrorKind::Numerical.
class GaussianProcessSampler {
 public:
  explicit GaussianProcessSampler(const Eigen::MatrixXd& covariance);

  /// Sampler for exp(-|t - t'| / 2) on `grid`.
  [[nodiscard]] static GaussianProcessSampler exp_cov(const Grid& grid);

  [[nodiscard]] Eigen::VectorXd draw(Rng& rng) const;

  /// `count` independent draws as the columns of an m x count matrix;
  /// column j equals what the (j+1)-th sequential draw() would return.
  [[nodiscard]] Eigen::MatrixXd draw_many(std::size_t count, Rng& rng) const;

  [[nodiscard]] double jitter() const noexcept { return jitter_; }
  [[nodiscard]] std::size_t dimension() const noexcept {
    return static_cast<std::size_t>(factor_.rows());
  }

 private:
  Eigen::MatrixXd factor_;
  double jitter_ = 0.0;
};

[[nodiscard]] Eigen::VectorXd gp_exp_cov(const Grid& grid, Rng& rng);

/// Quadrature version of f -> int K(., t) f(t) dt on a grid: the matrix
/// K(t_l, t_k) * w_k acting on grid values.
class IntegralOperator {
 public:
  IntegralOperator(Eigen::MatrixXd kernel_values, Grid grid);

  [[nodiscard]] Eigen::VectorXd apply(std::span<const double> f) const;
  [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept {
    return matrix_;
  }
  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }

  /// Largest singular value of matrix().
  [[nodiscard]] double norm() const;

 private:
  Eigen::MatrixXd matrix_;
  Grid grid_;
};

/// Kernel gamma * min(t, t'); its L2 operator norm is 4 gamma / pi^2.
[[nodiscard]] IntegralOperator min_kernel_operator(double gamma,
                                                   const Grid& grid);

/// Same operator applied in O(m) with prefix sums:
///   (Af)(t_l) = gamma * (sum_{k<=l} w_k t_k f_k + t_l * sum_{k>l} w_k f_k).
[[nodiscard]] Eigen::VectorXd apply_min_kernel(double gamma, const Grid& grid,
                                               std::span<const double> f);

/// Largest singular value via power iteration on A'A.
[[nodiscard]] double largest_singular_value(const Eigen::MatrixXd& a);

/// S_i = A S_{i-1} + W_i with A the gamma1 * min kernel, S_0 = 0, Wiener
/// innovations; returns the n curves after the burn-in.
[[nodiscard]] FunctionalSample har1(double gamma1, const DgpConfig& cfg);

/// Threshold AR on the second lag:
///   Y_i = s_i * A Y_{i-2} + W_i,  A the 1.5 * min kernel,
///   s_i = +1 if ||Y_{i-2}|| <= 1, else -1; Y_{-1} = Y_0 = 0.
[[nodiscard]] FunctionalSample setar(const DgpConfig& cfg);

/// +1 when a lagged curve of norm `lag_norm` keeps the operator sign.
[[nodiscard]] constexpr double setar_sign(double lag_norm) noexcept {
  return lag_norm <= 1.0 ? 1.0 : -1.0;
}

struct FgarchPath {
  FunctionalSample x;
  RowMatrix sigma2;
};

/// Functional GARCH(1,1):
///   X_i(t') = sigma_i(t') E_i(t'),
///   sigma_i^2(t') = 0.1 + a(t') + int (0.2 + a(t) + a(t')) X_{i-1}^2(t) dt
///                 + int (0.4 + a(t) + a(t')) sigma_{i-1}^2(t) dt,
/// with a(t) = (t - 0.5)^2, E_i drawn from the exp(-|t-t'|/2) process and
/// X_0 = sigma_0^2 = 0. The sampler must match cfg.grid.
[[nodiscard]] FgarchPath fgarch_path(const DgpConfig& cfg,
                                     const GaussianProcessSampler& errors);
[[nodiscard]] FunctionalSample fgarch(const DgpConfig& cfg,
                                      const GaussianProcessSampler& errors);
[[nodiscard]] FunctionalSample fgarch(const DgpConfig& cfg);

/// Concurrent regression
///   Y = (g2 X + (1-g2) X')/3 + 2 (g3 sin(2X) + (1-g3) sin(2X''))
///       + (g4 X + (1-g4) X''') E_Y
/// with X, X', X'', X''' independent fGARCH samples and E_Y independent
/// exp-covariance errors. Each component has a fixed substream of cfg.seed,
/// so skipping unused components does not change the others.
[[nodiscard]] std::pair<FunctionalSample, FunctionalSample>
concurrent_regression(int g2, int g3, int g4, const DgpConfig& cfg,
                      const GaussianProcessSampler& errors);
[[nodiscard]] std::pair<FunctionalSample, FunctionalSample>
concurrent_regression(int g2, int g3, int g4, const DgpConfig& cfg);

/// i.i.d. curves from the exp-covariance process or Wiener paths.
[[nodiscard]] FunctionalSample iid_gp(const DgpConfig& cfg,
                                      const GaussianProcessSampler& errors);
[[nodiscard]] FunctionalSample iid_wiener(const DgpConfig& cfg);

/// Aligned pairs (X_i, Y_i) = (Y_{i-lag}, Y_i) for i = lag+1..n, an effective
/// sample of n - lag. Throws ErrorKind::InsufficientSample when lag >= n.
[[nodiscard]] std::pair<FunctionalSample, FunctionalSample> lag_pairs(
    const FunctionalSample& y, std::size_t lag);

}  // namespace hsicwb
