#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include <hsicwb/dgp.hpp>
#include <hsicwb/error.hpp>

using namespace hsicwb;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an hsicwb::Error");
  return ErrorKind::Io;
}

// Empirical covariance matrix of the columns of `draws` (one draw per row).
Eigen::MatrixXd empirical_cov(const Eigen::MatrixXd& draws) {
  const Eigen::RowVectorXd mean = draws.colwise().mean();
  const Eigen::MatrixXd c = draws.rowwise() - mean;
  return c.transpose() * c / static_cast<double>(draws.rows());
}

DgpConfig config(std::size_t n, std::size_t burn_in, std::size_t m,
                 std::uint64_t seed) {
  return {n, burn_in, make_uniform_grid(m), seed};
}

}  // namespace

TEST_CASE("Wiener paths start at zero and have min(s,t) covariance") {
  const auto g = make_uniform_grid(5);
  auto rng = make_rng(1);
  constexpr int draws = 100000;
  Eigen::MatrixXd w(draws, 5);
  for (int d = 0; d < draws; ++d) {
    const auto path = wiener(g, rng);
    REQUIRE(path(0) == 0.0);
    w.row(d) = path.transpose();
  }
  const auto cov = empirical_cov(w);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      CHECK(std::abs(cov(i, j) - std::min(g.points()[static_cast<std::size_t>(i)],
                                          g.points()[static_cast<std::size_t>(j)])) <=
            0.02);
    }
  }
  CHECK(std::abs(cov(4, 4) - 1.0) <= 0.02);
  CHECK(std::abs(cov(2, 4) - 0.5) <= 0.02);
}

TEST_CASE("exponential-covariance process moments") {
  const auto g = make_uniform_grid(5);
  const auto sampler = GaussianProcessSampler::exp_cov(g);
  CHECK(sampler.dimension() == 5);
  auto rng = make_rng(2);
  const Eigen::MatrixXd draws = sampler.draw_many(100000, rng).transpose();
  const auto cov = empirical_cov(draws);
  const auto expected = exp_covariance(g);
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(draws.col(i).mean()) <= 0.02);
    for (int j = 0; j < 5; ++j) {
      CHECK(std::abs(cov(i, j) - expected(i, j)) <= 0.02);
    }
  }
  CHECK(expected(0, 4) == doctest::Approx(std::exp(-0.5)));
  CHECK(std::abs(cov(0, 4) / std::sqrt(cov(0, 0) * cov(4, 4)) -
                 std::exp(-0.5)) <= 0.02);
}

TEST_CASE("batched draws equal sequential draws") {
  const auto g = make_uniform_grid(17);
  const auto sampler = GaussianProcessSampler::exp_cov(g);
  auto a = make_rng(3);
  auto b = make_rng(3);
  const auto many = sampler.draw_many(4, a);
  for (int j = 0; j < 4; ++j) {
    CHECK((many.col(j) - sampler.draw(b)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  auto c = make_rng(3);
  CHECK(gp_exp_cov(g, c).size() == 17);
}

TEST_CASE("factorization jitter escalates and then fails") {
  const GaussianProcessSampler singular(Eigen::MatrixXd::Ones(3, 3));
  CHECK(singular.jitter() > 0.0);
  CHECK(singular.jitter() <= 1e-6);
  CHECK(GaussianProcessSampler(Eigen::MatrixXd::Identity(3, 3)).jitter() == 0.0);
  CHECK(kind_of([] {
          GaussianProcessSampler(-Eigen::MatrixXd::Identity(3, 3));
        }) == ErrorKind::Numerical);
}

TEST_CASE("min-kernel operator") {
  const auto g = make_uniform_grid(101);
  const auto zero = min_kernel_operator(0.0, g);
  CHECK(zero.matrix().isZero(0.0));
  CHECK(zero.norm() == 0.0);

  const auto op = min_kernel_operator(1.5, g);
  std::vector<double> f(101);
  std::vector<double> h(101);
  for (std::size_t k = 0; k < f.size(); ++k) {
    f[k] = std::sin(7.0 * g.points()[k]) + 0.3;
    h[k] = g.points()[k] * g.points()[k];
  }
  const auto dense = op.apply(f);
  const auto fast = apply_min_kernel(1.5, g, f);
  CHECK((dense - fast).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(op.apply(std::vector<double>(101, 0.0)).isZero(0.0));
  std::vector<double> combo(101);
  for (std::size_t k = 0; k < f.size(); ++k) {
    combo[k] = 2.0 * f[k] - 3.0 * h[k];
  }
  CHECK((op.apply(combo) - (2.0 * op.apply(f) - 3.0 * op.apply(h)))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
  // The image vanishes at t = 0.
  CHECK(fast(0) == 0.0);
}

TEST_CASE("discretized min-kernel norms approach 4 gamma / pi^2") {
  const auto g = make_uniform_grid(1001);
  for (const double gamma : {0.75, 1.5, 2.25}) {
    const double target = 4.0 * gamma / (std::numbers::pi * std::numbers::pi);
    CHECK(std::abs(min_kernel_operator(gamma, g).norm() - target) <= 1e-3);
  }
  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(3, 3);
  diag.diagonal() << 1.0, -4.0, 2.0;
  CHECK(largest_singular_value(diag) == doctest::Approx(4.0));
}

TEST_CASE("generators are deterministic and slice cleanly after burn-in") {
  const auto sampler = GaussianProcessSampler::exp_cov(make_uniform_grid(21));
  for (const std::uint64_t seed : {0u, 5u}) {
    const auto cfg = config(12, 7, 21, seed);
    const auto full = config(19, 0, 21, seed);
    CHECK(har1(0.75, cfg) == har1(0.75, cfg));
    CHECK(har1(0.75, cfg) == har1(0.75, full).slice(7, 12));
    CHECK(setar(cfg) == setar(full).slice(7, 12));
    CHECK(fgarch(cfg, sampler) == fgarch(full, sampler).slice(7, 12));
    CHECK(concurrent_regression(0, 1, 1, cfg, sampler) ==
          concurrent_regression(0, 1, 1, cfg, sampler));
  }
  CHECK_FALSE(har1(0.75, config(5, 0, 21, 1)) == har1(0.75, config(5, 0, 21, 2)));
}

TEST_CASE("har1 with a zero operator yields Wiener curves from zero") {
  const auto cfg = config(10, 0, 11, 1);
  const auto s = har1(0.0, cfg);
  CHECK(s == iid_wiener(cfg));
  auto rng = make_rng(cfg.seed);
  for (std::size_t i = 0; i < s.rows(); ++i) {
    const auto w = wiener(cfg.grid, rng);
    for (std::size_t k = 0; k < s.cols(); ++k) {
      CHECK(s.row(i)[k] == w(static_cast<Eigen::Index>(k)));
    }
  }
  const auto dependent = har1(2.25, config(20, 10, 11, 3));
  for (std::size_t i = 0; i < dependent.rows(); ++i) {
    CHECK(dependent.row(i)[0] == 0.0);
  }
}

TEST_CASE("stronger operators give stronger serial dependence") {
  auto lag_corr = [](const FunctionalSample& s) {
    double cross = 0.0;
    double own = 0.0;
    for (std::size_t i = 1; i < s.rows(); ++i) {
      cross += inner_product(s.row(i), s.row(i - 1), s.grid());
      own += inner_product(s.row(i), s.row(i), s.grid());
    }
    return cross / own;
  };
  const auto cfg = config(1000, 100, 101, 4);
  const double weak = lag_corr(har1(0.75, cfg));
  const double strong = lag_corr(har1(2.25, cfg));
  CHECK(strong > weak + 0.2);
  CHECK(std::abs(lag_corr(har1(0.0, cfg))) < 0.1);
}

TEST_CASE("setar starts from zero history") {
  CHECK(setar_sign(0.5) == 1.0);
  CHECK(setar_sign(1.0) == 1.0);
  CHECK(setar_sign(2.0) == -1.0);
  const auto cfg = config(2, 0, 11, 6);
  const auto s = setar(cfg);
  auto rng = make_rng(cfg.seed);
  const auto w1 = wiener(cfg.grid, rng);
  const auto w2 = wiener(cfg.grid, rng);
  for (std::size_t k = 0; k < 11; ++k) {
    CHECK(s.row(0)[k] == w1(static_cast<Eigen::Index>(k)));
    CHECK(s.row(1)[k] == w2(static_cast<Eigen::Index>(k)));
  }
  // Third curve reacts to the first with the threshold sign.
  const auto s3 = setar(config(3, 0, 11, 6));
  const auto w3 = wiener(cfg.grid, rng);
  const double sign = setar_sign(norm(s3.row(0), cfg.grid));
  const Eigen::VectorXd expected = sign * apply_min_kernel(1.5, cfg.grid, s3.row(0)) + w3;
  for (std::size_t k = 0; k < 11; ++k) {
    CHECK(s3.row(2)[k] ==
          doctest::Approx(expected(static_cast<Eigen::Index>(k))).epsilon(1e-14));
  }
}

TEST_CASE("fgarch volatility") {
  const auto cfg = config(60, 0, 21, 7);
  const auto sampler = GaussianProcessSampler::exp_cov(cfg.grid);
  const auto path = fgarch_path(cfg, sampler);
  for (std::size_t k = 0; k < 21; ++k) {
    const double t = cfg.grid.points()[k];
    CHECK(path.sigma2(0, static_cast<Eigen::Index>(k)) ==
          doctest::Approx(0.1 + (t - 0.5) * (t - 0.5)).epsilon(1e-15));
  }
  CHECK(path.sigma2(0, 10) == doctest::Approx(0.1));
  CHECK(path.sigma2.minCoeff() >= 0.1);
  CHECK(fgarch_path(config(200, 100, 21, 8), sampler).sigma2.minCoeff() >= 0.1);
}

TEST_CASE("fgarch has mean zero") {
  const auto cfg = config(10000, 100, 11, 9);
  const auto x = fgarch(cfg, GaussianProcessSampler::exp_cov(cfg.grid));
  for (Eigen::Index k = 0; k < 11; ++k) {
    const auto col = x.values().col(k);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().mean());
    CHECK(std::abs(mean) <= 3.0 * sd / std::sqrt(10000.0));
  }
}

TEST_CASE("concurrent designs share the covariate stream") {
  const auto cfg = config(15, 20, 11, 10);
  const auto sampler = GaussianProcessSampler::exp_cov(cfg.grid);
  const auto [x1, y1] = concurrent_regression(0, 0, 0, cfg, sampler);
  const auto [x2, y2] = concurrent_regression(1, 0, 0, cfg, sampler);
  const auto [x4, y4] = concurrent_regression(0, 0, 1, cfg, sampler);
  CHECK(x1 == x2);
  CHECK(x1 == x4);
  CHECK_FALSE(y1 == y4);
  CHECK_FALSE(y1 == y2);
  const RowMatrix diff = y2.values() - y1.values();
  CHECK(std::abs(diff.sum()) > 0.0);
  // Turning on g2 swaps X' for X in the linear term.
  const auto xp = fgarch({cfg.n, cfg.burn_in, cfg.grid, derive_seed(cfg.seed, 1)},
                         sampler);
  CHECK((diff - (x1.values() - xp.values()) / 3.0).cwiseAbs().maxCoeff() <=
        1e-12);
  CHECK(kind_of([&] { (void)concurrent_regression(2, 0, 0, cfg, sampler); }) ==
        ErrorKind::Configuration);
}

TEST_CASE("lagged pairs") {
  RowMatrix v(5, 2);
  v << 0, 0, 1, 1, 2, 2, 3, 3, 4, 4;
  const FunctionalSample y(v, make_uniform_grid(2));
  const auto [x2, y2] = lag_pairs(y, 2);
  CHECK(x2.rows() == 3);
  CHECK(x2.row(0)[0] == 0.0);
  CHECK(y2.row(0)[0] == 2.0);
  CHECK(y2.row(2)[0] == 4.0);
  CHECK(kind_of([&] { (void)lag_pairs(y, 0); }) == ErrorKind::Configuration);
  CHECK(kind_of([&] { (void)lag_pairs(y, 5); }) ==
        ErrorKind::InsufficientSample);
}

TEST_CASE("sample size and sampler shape are validated") {
  CHECK(kind_of([] { (void)har1(0.5, config(0, 0, 5, 1)); }) ==
        ErrorKind::Configuration);
  const auto sampler = GaussianProcessSampler::exp_cov(make_uniform_grid(4));
  CHECK(kind_of([&] { (void)fgarch(config(3, 0, 5, 1), sampler); }) ==
        ErrorKind::Dimension);
}
