#include "hsicwb/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <sstream>

namespace hsicwb {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

double median_of(std::vector<double>& values) {
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<long>(mid),
                   values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) {
    return upper;
  }
  const double lower_mid =
      *std::max_element(values.begin(), values.begin() + static_cast<long>(mid));
  return (lower_mid + upper) / 2.0;
}

bool rows_identical(std::span<const double> a, std::span<const double> b) {
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

void require_resolved(const KernelSpec& spec) {
  if (!spec.resolved()) {
    throw Error(ErrorKind::Configuration,
                "gaussian kernel used without a positive bandwidth");
  }
}

}  // namespace

KernelSpec parse_kernel_spec(std::string_view text) {
  const auto t = lower(text);
  if (t == "linear") {
    return KernelSpec::linear();
  }
  if (t == "distance") {
    return KernelSpec::distance();
  }
  if (t == "gaussian:median" || t == "gaussian") {
    return KernelSpec::gaussian_median();
  }
  if (t.starts_with("gaussian:")) {
    const auto value = std::string_view(t).substr(9);
    double bw = 0.0;
    const auto [ptr, ec] =
        std::from_chars(value.data(), value.data() + value.size(), bw);
    if (ec == std::errc() && ptr == value.data() + value.size() && bw > 0.0 &&
        std::isfinite(bw)) {
      return KernelSpec::gaussian(bw);
    }
  }
  throw Error(ErrorKind::Configuration,
              "unknown kernel '" + std::string(text) +
                  "' (expected linear, distance, gaussian:median or "
                  "gaussian:<bandwidth_sq>)");
}

std::string to_string(const KernelSpec& spec) {
  switch (spec.kind) {
    case KernelKind::Linear:
      return "linear";
    case KernelKind::Distance:
      return "distance";
    case KernelKind::Gaussian:
      break;
  }
  if (!spec.resolved()) {
    return "gaussian:median";
  }
  std::ostringstream os;
  os.precision(17);
  os << "gaussian:" << spec.bandwidth_sq;
  return os.str();
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y, const Grid& grid) {
  switch (spec.kind) {
    case KernelKind::Linear:
      return inner_product(x, y, grid);
    case KernelKind::Distance:
      return norm(x, grid) + norm(y, grid) - distance(x, y, grid);
    case KernelKind::Gaussian:
      require_resolved(spec);
      return std::exp(-squared_distance(x, y, grid) / spec.bandwidth_sq);
  }
  return 0.0;
}

SampleGeometry::SampleGeometry(const FunctionalSample& sample)
    : sample_(&sample) {
  const auto n = static_cast<Eigen::Index>(sample.rows());
  const auto& grid = sample.grid();
  sq_dist_ = Eigen::MatrixXd::Zero(n, n);
  norms_.resize(n);
  zero_but_distinct_.assign(static_cast<std::size_t>(n * n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto xi = sample.row(static_cast<std::size_t>(i));
    norms_(i) = norm(xi, grid);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto xj = sample.row(static_cast<std::size_t>(j));
      const double d2 = squared_distance(xi, xj, grid);
      sq_dist_(i, j) = d2;
      sq_dist_(j, i) = d2;
      if (d2 == 0.0 && !rows_identical(xi, xj)) {
        zero_but_distinct_[static_cast<std::size_t>(i * n + j)] = true;
      }
    }
  }
}

double SampleGeometry::median_squared_distance() const {
  const auto n = sq_dist_.rows();
  std::vector<double> pairs;
  pairs.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d2 = sq_dist_(i, j);
      if (d2 > 0.0 || zero_but_distinct_[static_cast<std::size_t>(i * n + j)]) {
        pairs.push_back(d2);
      }
    }
  }
  if (pairs.empty()) {
    throw Error(ErrorKind::DegenerateSample,
                "median heuristic needs at least two distinct observations");
  }
  const double med = median_of(pairs);
  if (!(med > 0.0)) {
    throw Error(ErrorKind::DegenerateSample,
                "median squared distance is zero; no positive bandwidth");
  }
  return med;
}

KernelSpec SampleGeometry::resolve(const KernelSpec& spec) const {
  if (spec.kind == KernelKind::Gaussian &&
      spec.policy == BandwidthPolicy::MedianHeuristic) {
    auto out = spec;
    out.bandwidth_sq = median_squared_distance();
    return out;
  }
  return spec;
}

Eigen::MatrixXd SampleGeometry::gram(const KernelSpec& resolved) const {
  const auto n = sq_dist_.rows();
  Eigen::MatrixXd g(n, n);
  switch (resolved.kind) {
    case KernelKind::Linear: {
      const auto& grid = sample_->grid();
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto xi = sample_->row(static_cast<std::size_t>(i));
        for (Eigen::Index j = i; j < n; ++j) {
          const double v =
              inner_product(xi, sample_->row(static_cast<std::size_t>(j)), grid);
          g(i, j) = v;
          g(j, i) = v;
        }
      }
      break;
    }
    case KernelKind::Distance:
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
          const double v = norms_(i) + norms_(j) - std::sqrt(sq_dist_(i, j));
          g(i, j) = v;
          g(j, i) = v;
        }
      }
      break;
    case KernelKind::Gaussian:
      require_resolved(resolved);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
          const double v = std::exp(-sq_dist_(i, j) / resolved.bandwidth_sq);
          g(i, j) = v;
          g(j, i) = v;
        }
      }
      break;
  }
  return g;
}

double median_heuristic(const FunctionalSample& sample) {
  if (sample.rows() < 2) {
    throw Error(ErrorKind::DegenerateSample,
                "median heuristic needs at least two observations");
  }
  return SampleGeometry(sample).median_squared_distance();
}

KernelSpec resolve(const KernelSpec& spec, const FunctionalSample& sample) {
  if (spec.kind == KernelKind::Gaussian &&
      spec.policy == BandwidthPolicy::MedianHeuristic) {
    auto out = spec;
    out.bandwidth_sq = median_heuristic(sample);
    return out;
  }
  return spec;
}

Eigen::MatrixXd gram(const FunctionalSample& sample, const KernelSpec& spec) {
  const SampleGeometry geometry(sample);
  return geometry.gram(geometry.resolve(spec));
}

CenteredGram double_center(const Eigen::MatrixXd& gram) {
  if (gram.rows() != gram.cols() || gram.rows() == 0) {
    throw Error(ErrorKind::Dimension, "double centering needs a square matrix");
  }
  const auto n = gram.rows();
  const double first = gram(0, 0);
  if ((gram.array() == first).all()) {
    return CenteredGram(Eigen::MatrixXd::Zero(n, n));
  }
  const Eigen::VectorXd row_mean = gram.rowwise().mean();
  const Eigen::RowVectorXd col_mean = gram.colwise().mean();
  const double grand = row_mean.mean();
  Eigen::MatrixXd c = gram;
  c.colwise() -= row_mean;
  c.rowwise() -= col_mean;
  c.array() += grand;
  return CenteredGram(std::move(c));
}

namespace detail {

void validate_embedding(std::size_t anchors, std::span<const double> weights,
                        double metric_cap) {
  if (anchors == 0) {
    throw Error(ErrorKind::EmptyEmbedding, "embedding has no anchors");
  }
  if (weights.size() != anchors) {
    throw Error(ErrorKind::Configuration,
                "embedding needs one weight per anchor");
  }
  for (const double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::Configuration,
                  "embedding weights must be positive and finite");
    }
  }
  if (!(metric_cap > 0.0)) {
    throw Error(ErrorKind::Configuration, "metric cap must be positive");
  }
}

}  // namespace detail

}  // namespace hsicwb
