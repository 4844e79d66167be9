#include "hsicwb/hsic.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace hsicwb {

namespace {

constexpr std::array<Preset, 4> kPresets = {Preset::MDD, Preset::KCMD_G,
                                            Preset::DCOV, Preset::HSIC_G};

void check_grams(std::span<const Eigen::MatrixXd> grams) {
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
}

}  // namespace

StatPreset make_preset(Preset name) {
  switch (name) {
    case Preset::MDD:
      return {name, KernelSpec::distance(), KernelSpec::linear()};
    case Preset::KCMD_G:
      return {name, KernelSpec::gaussian_median(), KernelSpec::linear()};
    case Preset::DCOV:
      return {name, KernelSpec::distance(), KernelSpec::distance()};
    case Preset::HSIC_G:
      return {name, KernelSpec::gaussian_median(),
              KernelSpec::gaussian_median()};
  }
  throw Error(ErrorKind::Configuration, "unknown preset");
}

Preset parse_preset(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) {
    return static_cast<char>(std::toupper(c));
  });
  std::replace(t.begin(), t.end(), '-', '_');
  if (t == "MDD" || t == "MMD") {
    return Preset::MDD;
  }
  if (t == "KCMD_G") {
    return Preset::KCMD_G;
  }
  if (t == "DCOV") {
    return Preset::DCOV;
  }
  if (t == "HSIC_G") {
    return Preset::HSIC_G;
  }
  throw Error(ErrorKind::Configuration,
              "unknown preset '" + std::string(text) +
                  "' (expected MDD, KCMD_G, DCOV or HSIC_G)");
}

std::string to_string(Preset preset) {
  switch (preset) {
    case Preset::MDD:
      return "MDD";
    case Preset::KCMD_G:
      return "KCMD_G";
    case Preset::DCOV:
      return "DCOV";
    case Preset::HSIC_G:
      return "HSIC_G";
  }
  return "?";
}

std::span<const Preset> all_presets() noexcept { return kPresets; }

double HsicValue::value() const noexcept {
  if (raw < 0.0 && raw >= -kNegativeClampTolerance) {
    return 0.0;
  }
  return raw;
}

HsicValue hsic_v(const CenteredGram& gc_x, const CenteredGram& gc_y) {
  if (gc_x.size() != gc_y.size()) {
    throw Error(ErrorKind::Dimension,
                "centered Gram matrices differ in size: " +
                    std::to_string(gc_x.size()) + " vs " +
                    std::to_string(gc_y.size()));
  }
  const auto n = static_cast<double>(gc_x.size());
  HsicValue out;
  out.n = gc_x.size();
  out.raw = gc_x.matrix().cwiseProduct(gc_y.matrix()).sum() / (n * n);
  return out;
}

HsicValue hsic_pair(const FunctionalSample& x, const FunctionalSample& y,
                    const KernelSpec& kernel_x, const KernelSpec& kernel_y) {
  if (x.rows() != y.rows()) {
    throw Error(ErrorKind::Dimension, "X and Y must have the same length");
  }
  const SampleGeometry gx(x);
  const SampleGeometry gy(y);
  const auto kx = gx.resolve(kernel_x);
  const auto ky = gy.resolve(kernel_y);
  auto out = hsic_v(double_center(gx.gram(kx)), double_center(gy.gram(ky)));
  out.kernel_x = kx;
  out.kernel_y = ky;
  return out;
}

HsicValue hsic_pair(const FunctionalSample& x, const FunctionalSample& y,
                    Preset preset) {
  const auto p = make_preset(preset);
  return hsic_pair(x, y, p.kernel_x, p.kernel_y);
}

double hsic_q_from_grams(std::span<const Eigen::MatrixXd> grams) {
  check_grams(grams);
  const auto n = grams.front().rows();
  const auto nd = static_cast<double>(n);

  Eigen::MatrixXd prod = grams[0];
  Eigen::VectorXd row_prod = grams[0].rowwise().mean();
  double mean_prod = grams[0].mean();
  for (std::size_t k = 1; k < grams.size(); ++k) {
    prod.array() *= grams[k].array();
    row_prod.array() *= grams[k].rowwise().mean().array();
    mean_prod *= grams[k].mean();
  }
  const double term1 = prod.sum() / (nd * nd);
  const double term2 = row_prod.sum() / nd;
  return term1 - 2.0 * term2 + mean_prod;
}

HsicValue hsic_q(std::span<const FunctionalSample> samples,
                 std::span<const KernelSpec> kernels) {
  if (samples.size() < 2) {
    throw Error(ErrorKind::Dimension, "hsic_q needs q >= 2 samples");
  }
  if (kernels.size() != samples.size()) {
    throw Error(ErrorKind::Dimension, "need one kernel per sample");
  }
  const auto n = samples.front().rows();
  std::vector<Eigen::MatrixXd> grams;
  std::vector<KernelSpec> resolved;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (samples[k].rows() != n) {
      throw Error(ErrorKind::Dimension,
                  "all samples must have the same number of observations");
    }
    const SampleGeometry geometry(samples[k]);
    resolved.push_back(geometry.resolve(kernels[k]));
    grams.push_back(geometry.gram(resolved.back()));
  }
  HsicValue out;
  out.n = n;
  out.raw = hsic_q_from_grams(grams);
  out.kernel_x = resolved[0];
  out.kernel_y = resolved[1];
  return out;
}

}  // namespace hsicwb
