#include "hsicwb/dgp.hpp"

#include <cmath>
#include <random>
#include <string>

#include "hsicwb/error.hpp"

namespace hsicwb {

namespace {

constexpr double kInitialJitter = 1e-10;
constexpr double kMaxJitter = 1e-6;

// Substreams of a concurrent-regression seed.
enum Component : std::uint64_t { kX = 0, kX1 = 1, kX2 = 2, kX3 = 3, kEy = 4 };

void check_flag(int g, const char* name) {
  if (g != 0 && g != 1) {
    throw Error(ErrorKind::Configuration,
                std::string(name) + " must be 0 or 1");
  }
}

void check_n(const DgpConfig& cfg) {
  if (cfg.n < 1) {
    throw Error(ErrorKind::Configuration, "sample size must be at least 1");
  }
}

DgpConfig with_seed(const DgpConfig& cfg, std::uint64_t seed) {
  auto out = cfg;
  out.seed = seed;
  return out;
}

void check_sampler(const DgpConfig& cfg, const GaussianProcessSampler& s) {
  if (s.dimension() != cfg.grid.size()) {
    throw Error(ErrorKind::Dimension,
                "error sampler dimension does not match the grid");
  }
}

}  // namespace

Eigen::VectorXd wiener(const Grid& grid, Rng& rng) {
  const auto t = grid.points();
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd w(static_cast<Eigen::Index>(t.size()));
  w(0) = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double step = std::sqrt(t[k] - t[k - 1]);
    w(static_cast<Eigen::Index>(k)) =
        w(static_cast<Eigen::Index>(k - 1)) + step * normal(rng);
  }
  return w;
}

Eigen::MatrixXd exp_covariance(const Grid& grid) {
  const auto t = grid.points();
  const auto m = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd c(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      c(i, j) = std::exp(-std::abs(t[static_cast<std::size_t>(i)] -
                                   t[static_cast<std::size_t>(j)]) /
                         2.0);
    }
  }
  return c;
}

GaussianProcessSampler::GaussianProcessSampler(
    const Eigen::MatrixXd& covariance) {
  if (covariance.rows() != covariance.cols() || covariance.rows() == 0) {
    throw Error(ErrorKind::Dimension, "covariance must be a square matrix");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  double jitter = kInitialJitter;
  while (llt.info() != Eigen::Success) {
    if (jitter > kMaxJitter * 1.0000001) {
      throw Error(ErrorKind::Numerical,
                  "covariance factorization failed after jitter up to 1e-6");
    }
    Eigen::MatrixXd shifted = covariance;
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
    jitter_ = jitter;
    jitter *= 10.0;
  }
  factor_ = llt.matrixL();
}

GaussianProcessSampler GaussianProcessSampler::exp_cov(const Grid& grid) {
  return GaussianProcessSampler(exp_covariance(grid));
}

Eigen::VectorXd GaussianProcessSampler::draw(Rng& rng) const {
  return draw_many(1, rng).col(0);
}

Eigen::MatrixXd GaussianProcessSampler::draw_many(std::size_t count,
                                                  Rng& rng) const {
  Eigen::MatrixXd z(factor_.rows(), static_cast<Eigen::Index>(count));
  // A fresh distribution per column keeps draw_many(k) identical to k calls
  // of draw() on the same engine.
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index k = 0; k < z.rows(); ++k) {
      z(k, j) = normal(rng);
    }
  }
  return factor_.triangularView<Eigen::Lower>() * z;
}

Eigen::VectorXd gp_exp_cov(const Grid& grid, Rng& rng) {
  return GaussianProcessSampler::exp_cov(grid).draw(rng);
}

IntegralOperator::IntegralOperator(Eigen::MatrixXd kernel_values, Grid grid)
    : matrix_(std::move(kernel_values)), grid_(std::move(grid)) {
  const auto m = static_cast<Eigen::Index>(grid_.size());
  if (matrix_.rows() != m || matrix_.cols() != m) {
    throw Error(ErrorKind::Dimension,
                "kernel values must be an m x m matrix on the grid");
  }
  const auto w = grid_.weights();
  for (Eigen::Index k = 0; k < m; ++k) {
    matrix_.col(k) *= w[static_cast<std::size_t>(k)];
  }
}

Eigen::VectorXd IntegralOperator::apply(std::span<const double> f) const {
  if (f.size() != grid_.size()) {
    throw Error(ErrorKind::Dimension, "curve does not conform to the grid");
  }
  return matrix_ * Eigen::Map<const Eigen::VectorXd>(
                       f.data(), static_cast<Eigen::Index>(f.size()));
}

double IntegralOperator::norm() const { return largest_singular_value(matrix_); }

IntegralOperator min_kernel_operator(double gamma, const Grid& grid) {
  const auto t = grid.points();
  const auto m = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd k(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      k(i, j) = gamma * std::min(t[static_cast<std::size_t>(i)],
                                 t[static_cast<std::size_t>(j)]);
    }
  }
  return {std::move(k), grid};
}

Eigen::VectorXd apply_min_kernel(double gamma, const Grid& grid,
                                 std::span<const double> f) {
  const auto t = grid.points();
  const auto w = grid.weights();
  const auto m = t.size();
  if (f.size() != m) {
    throw Error(ErrorKind::Dimension, "curve does not conform to the grid");
  }
  // below[l] = sum_{k<=l} w_k t_k f_k; above[l] = sum_{k>l} w_k f_k
  std::vector<double> below(m);
  std::vector<double> above(m);
  double acc = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    acc += w[k] * t[k] * f[k];
    below[k] = acc;
  }
  acc = 0.0;
  for (std::size_t k = m; k-- > 0;) {
    above[k] = acc;
    acc += w[k] * f[k];
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(m));
  for (std::size_t l = 0; l < m; ++l) {
    out(static_cast<Eigen::Index>(l)) = gamma * (below[l] + t[l] * above[l]);
  }
  return out;
}

double largest_singular_value(const Eigen::MatrixXd& a) {
  if (a.size() == 0) {
    return 0.0;
  }
  Eigen::VectorXd v = Eigen::VectorXd::Ones(a.cols()).normalized();
  double lambda = 0.0;
  for (int iter = 0; iter < 10000; ++iter) {
    Eigen::VectorXd next = a.transpose() * (a * v);
    const double len = next.norm();
    if (len == 0.0) {
      return 0.0;
    }
    next /= len;
    const bool converged = std::abs(len - lambda) <= 1e-15 * len;
    lambda = len;
    v = std::move(next);
    if (converged) {
      break;
    }
  }
  return std::sqrt(lambda);
}

FunctionalSample har1(double gamma1, const DgpConfig& cfg) {
  check_n(cfg);
  const auto m = static_cast<Eigen::Index>(cfg.grid.size());
  auto rng = make_rng(cfg.seed);
  RowMatrix out(static_cast<Eigen::Index>(cfg.n), m);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(m);
  const std::size_t total = cfg.burn_in + cfg.n;
  for (std::size_t i = 0; i < total; ++i) {
    Eigen::VectorXd next = wiener(cfg.grid, rng);
    if (gamma1 != 0.0) {
      next += apply_min_kernel(gamma1, cfg.grid, {s.data(), static_cast<std::size_t>(s.size())});
    }
    s = std::move(next);
    if (i >= cfg.burn_in) {
      out.row(static_cast<Eigen::Index>(i - cfg.burn_in)) = s.transpose();
    }
  }
  return {std::move(out), cfg.grid};
}

FunctionalSample setar(const DgpConfig& cfg) {
  check_n(cfg);
  const auto m = static_cast<Eigen::Index>(cfg.grid.size());
  auto rng = make_rng(cfg.seed);
  RowMatrix out(static_cast<Eigen::Index>(cfg.n), m);
  // history: lag2 = Y_{i-2}, lag1 = Y_{i-1}
  Eigen::VectorXd lag2 = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd lag1 = Eigen::VectorXd::Zero(m);
  const std::size_t total = cfg.burn_in + cfg.n;
  for (std::size_t i = 0; i < total; ++i) {
    Eigen::VectorXd next = wiener(cfg.grid, rng);
    const std::span<const double> h{lag2.data(), static_cast<std::size_t>(lag2.size())};
    const double sign = setar_sign(norm(h, cfg.grid));
    next += sign * apply_min_kernel(1.5, cfg.grid, h);
    lag2 = std::move(lag1);
    lag1 = std::move(next);
    if (i >= cfg.burn_in) {
      out.row(static_cast<Eigen::Index>(i - cfg.burn_in)) = lag1.transpose();
    }
  }
  return {std::move(out), cfg.grid};
}

FgarchPath fgarch_path(const DgpConfig& cfg,
                       const GaussianProcessSampler& errors) {
  check_n(cfg);
  check_sampler(cfg, errors);
  const auto t = cfg.grid.points();
  const auto w = cfg.grid.weights();
  const auto m = t.size();
  const std::size_t total = cfg.burn_in + cfg.n;

  auto rng = make_rng(cfg.seed);
  const Eigen::MatrixXd e = errors.draw_many(total, rng);

  std::vector<double> a(m);
  for (std::size_t k = 0; k < m; ++k) {
    a[k] = (t[k] - 0.5) * (t[k] - 0.5);
  }

  RowMatrix x_out(static_cast<Eigen::Index>(cfg.n),
                  static_cast<Eigen::Index>(m));
  RowMatrix s_out(static_cast<Eigen::Index>(cfg.n),
                  static_cast<Eigen::Index>(m));
  std::vector<double> x(m, 0.0);
  std::vector<double> sigma2(m, 0.0);
  for (std::size_t i = 0; i < total; ++i) {
    // The integrands are separable in t and t', so each integral reduces to
    // two quadratures of the previous curves.
    double x2 = 0.0;
    double ax2 = 0.0;
    double s2 = 0.0;
    double as2 = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double xx = x[k] * x[k];
      x2 += w[k] * xx;
      ax2 += w[k] * a[k] * xx;
      s2 += w[k] * sigma2[k];
      as2 += w[k] * a[k] * sigma2[k];
    }
    const auto col = static_cast<Eigen::Index>(i);
    for (std::size_t l = 0; l < m; ++l) {
      sigma2[l] = 0.1 + a[l] + (0.2 + a[l]) * x2 + ax2 + (0.4 + a[l]) * s2 +
                  as2;
      x[l] = std::sqrt(sigma2[l]) * e(static_cast<Eigen::Index>(l), col);
    }
    if (i >= cfg.burn_in) {
      const auto r = static_cast<Eigen::Index>(i - cfg.burn_in);
      for (std::size_t l = 0; l < m; ++l) {
        x_out(r, static_cast<Eigen::Index>(l)) = x[l];
        s_out(r, static_cast<Eigen::Index>(l)) = sigma2[l];
      }
    }
  }
  return {FunctionalSample(std::move(x_out), cfg.grid), std::move(s_out)};
}

FunctionalSample fgarch(const DgpConfig& cfg,
                        const GaussianProcessSampler& errors) {
  return fgarch_path(cfg, errors).x;
}

FunctionalSample fgarch(const DgpConfig& cfg) {
  return fgarch(cfg, GaussianProcessSampler::exp_cov(cfg.grid));
}

std::pair<FunctionalSample, FunctionalSample> concurrent_regression(
    int g2, int g3, int g4, const DgpConfig& cfg,
    const GaussianProcessSampler& errors) {
  check_flag(g2, "gamma2");
  check_flag(g3, "gamma3");
  check_flag(g4, "gamma4");
  check_n(cfg);
  check_sampler(cfg, errors);

  auto component = [&](Component c) {
    return fgarch(with_seed(cfg, derive_seed(cfg.seed, c)), errors);
  };
  const auto x = component(kX);
  const auto& xv = x.values();

  auto ey_rng = make_rng(derive_seed(cfg.seed, kEy));
  const RowMatrix ey = errors.draw_many(cfg.n, ey_rng).transpose();

  RowMatrix y = RowMatrix::Zero(xv.rows(), xv.cols());
  y += (g2 == 1 ? xv : component(kX1).values()) / 3.0;
  y += 2.0 * (g3 == 1 ? xv : component(kX2).values()).array().unaryExpr(
                 [](double v) { return std::sin(2.0 * v); }).matrix();
  y += (g4 == 1 ? xv : component(kX3).values()).cwiseProduct(ey);
  return {x, FunctionalSample(std::move(y), cfg.grid)};
}

std::pair<FunctionalSample, FunctionalSample> concurrent_regression(
    int g2, int g3, int g4, const DgpConfig& cfg) {
  return concurrent_regression(g2, g3, g4, cfg,
                               GaussianProcessSampler::exp_cov(cfg.grid));
}

FunctionalSample iid_gp(const DgpConfig& cfg,
                        const GaussianProcessSampler& errors) {
  check_n(cfg);
  check_sampler(cfg, errors);
  auto rng = make_rng(cfg.seed);
  RowMatrix values = errors.draw_many(cfg.n, rng).transpose();
  return {std::move(values), cfg.grid};
}

FunctionalSample iid_wiener(const DgpConfig& cfg) {
  return har1(0.0, [&] {
    auto c = cfg;
    c.burn_in = 0;
    return c;
  }());
}

std::pair<FunctionalSample, FunctionalSample> lag_pairs(
    const FunctionalSample& y, std::size_t lag) {
  if (lag == 0) {
    throw Error(ErrorKind::Configuration, "lag must be positive");
  }
  if (lag >= y.rows()) {
    throw Error(ErrorKind::InsufficientSample,
                "lag " + std::to_string(lag) + " leaves no pairs in a series of " +
                    std::to_string(y.rows()));
  }
  const auto effective = y.rows() - lag;
  return {y.slice(0, effective), y.slice(lag, effective)};
}

}  // namespace hsicwb
