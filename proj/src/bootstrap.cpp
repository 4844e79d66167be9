#include "hsicwb/bootstrap.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace hsicwb {

namespace {

void check_multipliers(std::size_t n, std::span<const double> r) {
  if (r.size() != n) {
    throw Error(ErrorKind::Dimension,
                "multiplier vector has length " + std::to_string(r.size()) +
                    ", expected " + std::to_string(n));
  }
}

Eigen::VectorXd centered(std::span<const double> r) {
  Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(
      r.data(), static_cast<Eigen::Index>(r.size()));
  u.array() -= u.mean();
  return u;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::vector<double> ma_weights(std::size_t l) {
  if (l == 0) {
    throw Error(ErrorKind::Configuration, "block length must be at least 1");
  }
  const auto ld = static_cast<double>(l);
  std::vector<double> w(l);
  double sum_sq = 0.0;
  for (std::size_t k = 1; k <= l; ++k) {
    const double delta =
        0.5 - std::abs((static_cast<double>(k) - 0.5) / ld - 0.5);
    w[k - 1] = delta;
    sum_sq += delta * delta;
  }
  const double scale = std::sqrt(sum_sq);
  for (auto& v : w) {
    v /= scale;
  }
  return w;
}

Eigen::VectorXd draw_multipliers(std::size_t n, std::size_t l, Rng& rng) {
  const auto w = ma_weights(l);
  std::normal_distribution<double> normal(0.0, 1.0);
  // eps[idx] holds epsilon_{idx + 2 - l}; r_i (0-based i) uses idx i..i+l-1.
  std::vector<double> eps(n + l - 1);
  for (auto& e : eps) {
    e = normal(rng);
  }
  Eigen::VectorXd r(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 1; k <= l; ++k) {
      acc += w[k - 1] * eps[i + l - k];
    }
    r(static_cast<Eigen::Index>(i)) = acc;
  }
  return r;
}

double hsic_star(const CenteredGram& gc_x, const CenteredGram& gc_y,
                 std::span<const double> r) {
  if (gc_x.size() != gc_y.size()) {
    throw Error(ErrorKind::Dimension, "centered Gram matrices differ in size");
  }
  const auto n = gc_x.size();
  check_multipliers(n, r);
  const Eigen::VectorXd u = centered(r);
  const Eigen::MatrixXd h = gc_x.matrix().cwiseProduct(gc_y.matrix());
  const auto nd = static_cast<double>(n);
  return u.dot(h * u) / (nd * nd);
}

double hsic_q_star(std::span<const Eigen::MatrixXd> grams,
                   std::span<const double> r) {
  if (grams.size() < 2) {
    throw Error(ErrorKind::Dimension, "need at least two Gram matrices");
  }
  const auto n = grams.front().rows();
  for (const auto& g : grams) {
    if (g.rows() != n || g.cols() != n || n == 0) {
      throw Error(ErrorKind::Dimension,
                  "Gram matrices must be square and of equal size");
    }
  }
  check_multipliers(static_cast<std::size_t>(n), r);
  const Eigen::VectorXd u = centered(r);
  const auto nd = static_cast<double>(n);

  Eigen::MatrixXd prod = grams[0];
  Eigen::VectorXd weighted_row = grams[0] * u / nd;
  double quad = u.dot(grams[0] * u) / (nd * nd);
  for (std::size_t k = 1; k < grams.size(); ++k) {
    prod.array() *= grams[k].array();
    weighted_row.array() *= (grams[k] * u / nd).array();
    quad *= u.dot(grams[k] * u) / (nd * nd);
  }
  const double term1 = u.dot(prod * u) / (nd * nd);
  const double term2 = u.dot(weighted_row) / nd;
  return term1 - 2.0 * term2 + quad;
}

BlockRule parse_block_rule(std::string_view text) {
  auto parse_number = [&](std::string_view s) -> double {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() ||
        !(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::Configuration,
                  "invalid block-length rule '" + std::string(text) +
                      "' (expected fixed:<k>, scaled:<c> or <k>)");
    }
    return v;
  };
  if (text.starts_with("scaled:")) {
    return BlockRule::scaled(parse_number(text.substr(7)));
  }
  const auto body = text.starts_with("fixed:") ? text.substr(6) : text;
  const double k = parse_number(body);
  if (k != std::floor(k)) {
    throw Error(ErrorKind::Configuration,
                "fixed block length must be an integer: '" +
                    std::string(text) + "'");
  }
  return BlockRule::fixed(static_cast<std::size_t>(k));
}

std::string to_string(const BlockRule& rule) {
  if (rule.kind == BlockRule::Kind::Fixed) {
    return "fixed:" + std::to_string(static_cast<std::size_t>(rule.value));
  }
  return "scaled:" + format_number(rule.value);
}

std::size_t block_length(const BlockRule& rule, std::size_t n) {
  if (rule.kind == BlockRule::Kind::Fixed) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(rule.value));
  }
  const double raw = rule.value * std::pow(static_cast<double>(n), 0.2);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::round(raw)));
}

std::size_t quantile_rank(double alpha, std::size_t n_b) {
  // The slack keeps products like 0.95 * 200 from landing one rank high.
  const double target = (1.0 - alpha) * static_cast<double>(n_b);
  const auto rank = static_cast<std::size_t>(std::ceil(target - 1e-9));
  return std::clamp<std::size_t>(rank, 1, n_b);
}

TestReport bootstrap_from_grams(const CenteredGram& gc_x,
                                const CenteredGram& gc_y, double alpha,
                                const MultiplierConfig& cfg) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::Configuration, "alpha must lie in (0, 1)");
  }
  if (cfg.l < 1 || cfg.n_b < 1) {
    throw Error(ErrorKind::Configuration,
                "block length and resample count must be positive");
  }
  if (gc_x.size() != gc_y.size()) {
    throw Error(ErrorKind::Dimension, "centered Gram matrices differ in size");
  }
  const auto n = gc_x.size();
  const auto nd = static_cast<double>(n);

  TestReport report;
  report.alpha = alpha;
  report.n = n;
  report.seed = cfg.seed;
  report.l = cfg.l;
  report.n_b = cfg.n_b;

  const auto value = hsic_v(gc_x, gc_y);
  report.hsic_raw = value.raw;
  report.statistic = nd * value.value();

  // All n_b quadratic forms u_b' H u_b at once.
  const Eigen::MatrixXd h = gc_x.matrix().cwiseProduct(gc_y.matrix());
  Eigen::MatrixXd u(static_cast<Eigen::Index>(n),
                    static_cast<Eigen::Index>(cfg.n_b));
  for (std::size_t b = 0; b < cfg.n_b; ++b) {
    auto rng = make_rng(derive_seed(cfg.seed, b));
    auto col = u.col(static_cast<Eigen::Index>(b));
    col = draw_multipliers(n, cfg.l, rng);
    col.array() -= col.mean();
  }
  const Eigen::MatrixXd hu = h * u;
  report.replicates.resize(cfg.n_b);
  for (std::size_t b = 0; b < cfg.n_b; ++b) {
    const auto bi = static_cast<Eigen::Index>(b);
    report.replicates[b] = u.col(bi).dot(hu.col(bi)) / nd;
  }

  auto sorted = report.replicates;
  report.quantile_rank = quantile_rank(alpha, cfg.n_b);
  const auto kth = sorted.begin() + static_cast<long>(report.quantile_rank - 1);
  std::nth_element(sorted.begin(), kth, sorted.end());
  report.quantile = *kth;

  const auto exceed = std::count_if(
      report.replicates.begin(), report.replicates.end(),
      [&](double v) { return v >= report.statistic; });
  report.p_value = static_cast<double>(1 + exceed) /
                   static_cast<double>(cfg.n_b + 1);
  // A statistic of exactly zero carries no evidence against the null, even
  // when every replicate is zero as well.
  report.reject = report.statistic > 0.0 && report.statistic >= report.quantile;
  return report;
}

TestReport wild_bootstrap_test(const FunctionalSample& x,
                               const FunctionalSample& y,
                               const KernelSpec& kernel_x,
                               const KernelSpec& kernel_y, double alpha,
                               const MultiplierConfig& cfg) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::Configuration, "alpha must lie in (0, 1)");
  }
  if (x.rows() != y.rows()) {
    throw Error(ErrorKind::Dimension, "X and Y must have the same length");
  }
  if (x.rows() < 2) {
    throw Error(ErrorKind::InsufficientSample,
                "the test needs at least two observations");
  }
  const SampleGeometry gx(x);
  const SampleGeometry gy(y);
  const auto kx = gx.resolve(kernel_x);
  const auto ky = gy.resolve(kernel_y);
  auto report = bootstrap_from_grams(double_center(gx.gram(kx)),
                                     double_center(gy.gram(ky)), alpha, cfg);
  report.kernel_x = kx;
  report.kernel_y = ky;
  return report;
}

TestReport wild_bootstrap_test(const FunctionalSample& x,
                               const FunctionalSample& y, Preset preset,
                               double alpha, const MultiplierConfig& cfg) {
  const auto p = make_preset(preset);
  auto report = wild_bootstrap_test(x, y, p.kernel_x, p.kernel_y, alpha, cfg);
  report.preset = preset;
  return report;
}

std::string to_json(const TestReport& report, bool include_replicates,
                    int indent) {
  nlohmann::ordered_json j;
  j["statistic"] = report.statistic;
  j["hsic"] = report.hsic_raw;
  j["quantile"] = report.quantile;
  j["quantile_rank"] = report.quantile_rank;
  j["p_value"] = report.p_value;
  j["reject"] = report.reject;
  j["alpha"] = report.alpha;
  j["n"] = report.n;
  auto& prov = j["provenance"];
  prov["seed"] = report.seed;
  prov["l"] = report.l;
  prov["n_b"] = report.n_b;
  if (report.l_rule) {
    prov["l_rule"] = to_string(*report.l_rule);
  }
  if (report.preset) {
    prov["preset"] = to_string(*report.preset);
  }
  if (report.lag) {
    prov["lag"] = *report.lag;
  }
  prov["kernel_x"] = to_string(report.kernel_x);
  prov["kernel_y"] = to_string(report.kernel_y);
  prov["quantile_rule"] = "order statistic at rank ceil((1-alpha)*n_b)";
  prov["p_value_rule"] = "(1 + #{replicates >= statistic}) / (n_b + 1)";
  if (include_replicates) {
    j["replicates"] = report.replicates;
  }
  return j.dump(indent);
}

std::string report_csv_header() {
  return "preset,lag,n,l,n_b,seed,alpha,kernel_x,kernel_y,statistic,quantile,"
         "p_value,reject";
}

std::string to_csv_row(const TestReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << (report.preset ? to_string(*report.preset) : std::string()) << ','
     << (report.lag ? std::to_string(*report.lag) : std::string()) << ','
     << report.n << ',' << report.l << ',' << report.n_b << ',' << report.seed
     << ',' << report.alpha << ',' << to_string(report.kernel_x) << ','
     << to_string(report.kernel_y) << ',' << report.statistic << ','
     << report.quantile << ',' << report.p_value << ','
     << (report.reject ? 1 : 0);
  return os.str();
}

}  // namespace hsicwb
