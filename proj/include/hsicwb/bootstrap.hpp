#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hsicwb/hsic.hpp"
#include "hsicwb/rng.hpp"

namespace hsicwb {

/// Block length l, resample count n_b and the seed every multiplier draw
/// derives from.
struct MultiplierConfig {
  std::size_t l = 1;
  std::size_t n_b = 1000;
  std::uint64_t seed = 0;
};

/// Moving-average weights Delta_k = 0.5 - |(k - 0.5)/l - 0.5|, k = 1..l,
/// scaled to unit sum of squares.
[[nodiscard]] std::vector<double> ma_weights(std::size_t l);

/// Gaussian multiplier series r_i = sum_k w_k eps_{i-k+1}, i = 1..n, with the
/// l - 1 presample innovations drawn first so every r_i has unit variance.
[[nodiscard]] Eigen::VectorXd draw_multipliers(std::size_t n, std::size_t l,
                                               Rng& rng);

/// (1/n^2) sum_ij (r_i - rbar)(r_j - rbar) Gc_x[i][j] Gc_y[i][j].
[[nodiscard]] double hsic_star(const CenteredGram& gc_x,
                               const CenteredGram& gc_y,
                               std::span<const double> r);

/// Bootstrap counterpart of hsic_q_from_grams with centered multipliers
/// u = r - rbar:
///   (1/n^2) u' (K^1 o ... o K^q) u
///   - (2/n) sum_i u_i prod_k [(1/n) (K^k u)_i]
///   + prod_k [(1/n^2) u' K^k u]
[[nodiscard]] double hsic_q_star(std::span<const Eigen::MatrixXd> grams,
                                 std::span<const double> r);

/// l = k, or l = round(c * n^(1/5)) (half away from zero, at least 1).
struct BlockRule {
  enum class Kind { Fixed, Scaled };
  Kind kind = Kind::Fixed;
  double value = 1.0;

  [[nodiscard]] static BlockRule fixed(std::size_t k) {
    return {Kind::Fixed, static_cast<double>(k)};
  }
  [[nodiscard]] static BlockRule scaled(double c) { return {Kind::Scaled, c}; }

  bool operator==(const BlockRule&) const = default;
};

/// Accepts `fixed:<k>`, `scaled:<c>` or a bare integer k.
[[nodiscard]] BlockRule parse_block_rule(std::string_view text);
[[nodiscard]] std::string to_string(const BlockRule& rule);

[[nodiscard]] std::size_t block_length(const BlockRule& rule, std::size_t n);

/// Outcome of one wild-bootstrap test. Statistic and replicates are the
/// n-scaled quantities n*HSIC_n and n*HSIC*_n.
struct TestReport {
  double statistic = 0.0;
  double hsic_raw = 0.0;
  std::vector<double> replicates;
  double quantile = 0.0;
  std::size_t quantile_rank = 0;
  double p_value = 1.0;
  bool reject = false;
  double alpha = 0.05;
  std::size_t n = 0;

  // provenance
  std::uint64_t seed = 0;
  std::size_t l = 1;
  std::size_t n_b = 0;
  KernelSpec kernel_x;
  KernelSpec kernel_y;
  std::optional<Preset> preset;
  std::optional<BlockRule> l_rule;
  std::optional<std::size_t> lag;

  bool operator==(const TestReport&) const = default;
};

/// 1-based rank ceil((1 - alpha) * n_b) of the order statistic used as the
/// bootstrap critical value.
[[nodiscard]] std::size_t quantile_rank(double alpha, std::size_t n_b);

/// Bootstrap calibration on precomputed centered Gram matrices. Multiplier
/// vector b is drawn from substream derive_seed(cfg.seed, b). Kernel
/// provenance is left for the caller to fill.
[[nodiscard]] TestReport bootstrap_from_grams(const CenteredGram& gc_x,
                                              const CenteredGram& gc_y,
                                              double alpha,
                                              const MultiplierConfig& cfg);

[[nodiscard]] TestReport wild_bootstrap_test(const FunctionalSample& x,
                                             const FunctionalSample& y,
                                             const KernelSpec& kernel_x,
                                             const KernelSpec& kernel_y,
                                             double alpha,
                                             const MultiplierConfig& cfg);

[[nodiscard]] TestReport wild_bootstrap_test(const FunctionalSample& x,
                                             const FunctionalSample& y,
                                             Preset preset, double alpha,
                                             const MultiplierConfig& cfg);

[[nodiscard]] std::string to_json(const TestReport& report,
                                  bool include_replicates = false,
                                  int indent = -1);

[[nodiscard]] std::string report_csv_header();
[[nodiscard]] std::string to_csv_row(const TestReport& report);

}  // namespace hsicwb
