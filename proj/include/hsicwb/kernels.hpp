#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hsicwb/error.hpp"
#include "hsicwb/grid.hpp"

namespace hsicwb {

enum class KernelKind { Linear, Distance, Gaussian };
enum class BandwidthPolicy { Fixed, MedianHeuristic };

/// Kernel on the sample space:
///   Linear    <x, y>
///   Distance  ||x|| + ||y|| - ||x - y||
///   Gaussian  exp(-||x - y||^2 / bandwidth_sq)
struct KernelSpec {
  KernelKind kind = KernelKind::Linear;
  double bandwidth_sq = 0.0;
  BandwidthPolicy policy = BandwidthPolicy::Fixed;

  [[nodiscard]] static KernelSpec linear() { return {}; }
  [[nodiscard]] static KernelSpec distance() {
    return {KernelKind::Distance, 0.0, BandwidthPolicy::Fixed};
  }
  [[nodiscard]] static KernelSpec gaussian(double bandwidth_sq) {
    return {KernelKind::Gaussian, bandwidth_sq, BandwidthPolicy::Fixed};
  }
  [[nodiscard]] static KernelSpec gaussian_median() {
    return {KernelKind::Gaussian, 0.0, BandwidthPolicy::MedianHeuristic};
  }

  /// Linear and Distance are always resolved; Gaussian needs a positive
  /// bandwidth.
  [[nodiscard]] bool resolved() const noexcept {
    return kind != KernelKind::Gaussian || bandwidth_sq > 0.0;
  }

  bool operator==(const KernelSpec&) const = default;
};

/// Accepts `linear`, `distance`, `gaussian:median` and `gaussian:<value>`
/// (case-insensitive). Throws ErrorKind::Configuration otherwise.
[[nodiscard]] KernelSpec parse_kernel_spec(std::string_view text);

/// Inverse of parse_kernel_spec; a resolved median bandwidth is printed as
/// its numeric value.
[[nodiscard]] std::string to_string(const KernelSpec& spec);

[[nodiscard]] double kernel_eval(const KernelSpec& spec,
                                 std::span<const double> x,
                                 std::span<const double> y, const Grid& grid);

/// Median of ||x_i - x_j||^2 over pairs i < j whose rows are not bitwise
/// identical. For an even count the two middle values are averaged.
/// Throws ErrorKind::DegenerateSample when no positive bandwidth results.
[[nodiscard]] double median_heuristic(const FunctionalSample& sample);

/// Pairwise quantities of one sample, computed once and shared by every
/// kernel evaluated on it.
class SampleGeometry {
 public:
  explicit SampleGeometry(const FunctionalSample& sample);

  [[nodiscard]] std::size_t size() const noexcept {
    return static_cast<std::size_t>(sq_dist_.rows());
  }
  [[nodiscard]] const Eigen::MatrixXd& squared_distances() const noexcept {
    return sq_dist_;
  }

  [[nodiscard]] double median_squared_distance() const;

  /// Replaces a MedianHeuristic bandwidth by its value on this sample.
  [[nodiscard]] KernelSpec resolve(const KernelSpec& spec) const;

  /// Throws ErrorKind::Configuration for an unresolved spec.
  [[nodiscard]] Eigen::MatrixXd gram(const KernelSpec& resolved) const;

 private:
  const FunctionalSample* sample_;
  Eigen::MatrixXd sq_dist_;
  Eigen::VectorXd norms_;
  // Pairs with zero distance whose rows differ in some bit; they still count
  // as distinct for the median heuristic.
  std::vector<bool> zero_but_distinct_;
};

[[nodiscard]] KernelSpec resolve(const KernelSpec& spec,
                                 const FunctionalSample& sample);

/// G[i][j] = kernel_eval(x_i, x_j), resolving the bandwidth policy first.
[[nodiscard]] Eigen::MatrixXd gram(const FunctionalSample& sample,
                                   const KernelSpec& spec);

/// Doubly centered Gram matrix; every row and column sums to zero.
class CenteredGram {
 public:
  [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept {
    return matrix_;
  }
  [[nodiscard]] std::size_t size() const noexcept {
    return static_cast<std::size_t>(matrix_.rows());
  }

 private:
  friend CenteredGram double_center(const Eigen::MatrixXd& gram);
  explicit CenteredGram(Eigen::MatrixXd m) : matrix_(std::move(m)) {}

  Eigen::MatrixXd matrix_;
};

/// Gc[i][j] = G[i][j] - rowmean_i - colmean_j + grandmean. A constant input
/// centers to the exact zero matrix.
[[nodiscard]] CenteredGram double_center(const Eigen::MatrixXd& gram);

/// Embedding of a metric space into l2 through distances to anchor points:
/// coordinate k is weights[k] * min(metric_cap, metric(s, anchors[k])).
template <class Element>
struct EmbeddingSpec {
  std::vector<Element> anchors;
  std::vector<double> weights;
  double metric_cap = 1.0;
};

namespace detail {
void validate_embedding(std::size_t anchors, std::span<const double> weights,
                        double metric_cap);
}

template <class Element, class Metric>
[[nodiscard]] std::vector<double> embed_to_l2(
    const EmbeddingSpec<Element>& spec, const Element& s, Metric&& metric) {
  detail::validate_embedding(spec.anchors.size(), spec.weights,
                             spec.metric_cap);
  std::vector<double> out(spec.anchors.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double d = static_cast<double>(metric(s, spec.anchors[k]));
    out[k] = spec.weights[k] * std::min(spec.metric_cap, d);
  }
  return out;
}

/// Embeds every element and packs the results as a sample over a K-point
/// vector grid, ready for any KernelSpec.
template <class Element, class Metric>
[[nodiscard]] FunctionalSample embed_sample(const EmbeddingSpec<Element>& spec,
                                            std::span<const Element> elements,
                                            Metric&& metric) {
  if (elements.empty()) {
    throw Error(ErrorKind::Dimension, "nothing to embed");
  }
  const auto k = spec.anchors.size();
  RowMatrix values(static_cast<Eigen::Index>(elements.size()),
                   static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto row = embed_to_l2(spec, elements[i], metric);
    for (std::size_t j = 0; j < k; ++j) {
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          row[j];
    }
  }
  return {std::move(values), make_vector_grid(k)};
}

}  // namespace hsicwb
