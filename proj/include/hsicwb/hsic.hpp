#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsicwb/kernels.hpp"

namespace hsicwb {

enum class Preset { MDD, KCMD_G, DCOV, HSIC_G };

/// Named kernel pair. MDD and KCMD_G test mean independence of Y given X
/// (linear kernel on Y); DCOV and HSIC_G test independence.
struct StatPreset {
  Preset name = Preset::MDD;
  KernelSpec kernel_x;
  KernelSpec kernel_y;
};

[[nodiscard]] StatPreset make_preset(Preset name);

/// Case-insensitive; "MMD" is accepted as an alias of MDD.
[[nodiscard]] Preset parse_preset(std::string_view text);
[[nodiscard]] std::string to_string(Preset preset);
[[nodiscard]] std::span<const Preset> all_presets() noexcept;

/// Empirical HSIC. `raw` keeps the arithmetic result; value() clamps
/// rounding-level negatives to zero.
struct HsicValue {
  double raw = 0.0;
  std::size_t n = 0;
  KernelSpec kernel_x;
  KernelSpec kernel_y;

  [[nodiscard]] double value() const noexcept;
};

/// Rounding slack below zero tolerated before a value is reported as is.
inline constexpr double kNegativeClampTolerance = 1e-12;

/// (1/n^2) sum_ij Gc_x[i][j] * Gc_y[i][j].
[[nodiscard]] HsicValue hsic_v(const CenteredGram& gc_x,
                               const CenteredGram& gc_y);

[[nodiscard]] HsicValue hsic_pair(const FunctionalSample& x,
                                  const FunctionalSample& y,
                                  const KernelSpec& kernel_x,
                                  const KernelSpec& kernel_y);

[[nodiscard]] HsicValue hsic_pair(const FunctionalSample& x,
                                  const FunctionalSample& y, Preset preset);

/// q-variable statistic from uncentered Gram matrices K^1..K^q:
///   (1/n^2) sum_ij prod_k K^k_ij
///   - (2/n) sum_i prod_k [(1/n) sum_j K^k_ij]
///   + prod_k [(1/n^2) sum_ij K^k_ij]
[[nodiscard]] double hsic_q_from_grams(std::span<const Eigen::MatrixXd> grams);

/// Mutual-independence statistic for q >= 2 samples. The returned HsicValue
/// records the first two resolved kernels.
[[nodiscard]] HsicValue hsic_q(std::span<const FunctionalSample> samples,
                               std::span<const KernelSpec> kernels);

}  // namespace hsicwb
