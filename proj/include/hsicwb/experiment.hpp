#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hsicwb/bootstrap.hpp"
#include "hsicwb/dgp.hpp"

namespace hsicwb {

/// A simulation design producing paired samples (X, Y).
struct DgpSpec {
  enum class Kind {
    Har1,        // X, Y independent copies of the Hilbertian AR(1)
    SetarLag,    // X_i = Y_{i-lag} on a functional SETAR series
    Concurrent,  // concurrent regression on fGARCH covariates
    IidWiener,   // independent i.i.d. Wiener samples
    ConstantY,   // i.i.d. Wiener X, Y identically zero
  };

  Kind kind = Kind::Har1;
  double gamma1 = 0.0;
  std::size_t lag = 1;
  int g2 = 0;
  int g3 = 0;
  int g4 = 0;

  [[nodiscard]] static DgpSpec har1(double gamma1) {
    return {Kind::Har1, gamma1};
  }
  [[nodiscard]] static DgpSpec setar_lag(std::size_t lag) {
    DgpSpec d;
    d.kind = Kind::SetarLag;
    d.lag = lag;
    return d;
  }
  /// DGP 1..4: all flags off, linear, nonlinear, heteroscedastic.
  [[nodiscard]] static DgpSpec concurrent(int dgp);
  [[nodiscard]] static DgpSpec concurrent(int g2, int g3, int g4);

  /// Stable text key, e.g. "har1(gamma1=0.75)", "setar(lag=2)",
  /// "concurrent(dgp=4)". Cell seeds derive from it.
  [[nodiscard]] std::string label() const;

  bool operator==(const DgpSpec&) const = default;
};

/// Draws one (X, Y) pair of nominal size cfg.n. SETAR pairs have n - lag
/// observations. `sampler` is required for concurrent designs and must match
/// cfg.grid.
[[nodiscard]] std::pair<FunctionalSample, FunctionalSample> generate_pair(
    const DgpSpec& spec, const DgpConfig& cfg,
    const GaussianProcessSampler* sampler);

struct Scenario {
  std::string name = "custom";
  std::vector<DgpSpec> dgps;
  std::vector<Preset> presets;
  std::vector<std::size_t> n_values;
  std::vector<BlockRule> l_rules;
  double alpha = 0.05;
  std::size_t n_b = 200;
  std::size_t mc_reps = 200;
  std::uint64_t master_seed = 1;
  std::size_t grid_points = 1001;
  std::size_t burn_in = 100;
};

struct RejectionCell {
  std::string dgp;
  Preset preset = Preset::MDD;
  BlockRule l_rule;
  std::size_t n = 0;
  std::size_t l = 0;
  std::size_t rejections = 0;
  std::size_t reps = 0;
  std::string error;

  [[nodiscard]] bool ok() const noexcept { return error.empty(); }
  [[nodiscard]] double rate() const noexcept {
    return reps == 0 ? 0.0
                     : static_cast<double>(rejections) /
                           static_cast<double>(reps);
  }
  bool operator==(const RejectionCell&) const = default;
};

struct RejectionTable {
  std::string scenario;
  std::vector<RejectionCell> cells;
  std::size_t mc_reps = 0;
  std::size_t n_b = 0;
  double alpha = 0.05;
  std::uint64_t master_seed = 0;
  std::size_t grid_points = 0;
  double wall_seconds = 0.0;

  /// Cell lookup by its row key; nullptr when absent.
  [[nodiscard]] const RejectionCell* find(std::string_view dgp, Preset preset,
                                          const BlockRule& rule,
                                          std::size_t n) const;

  /// Equality of everything except the wall time.
  bool operator==(const RejectionTable& other) const;
};

/// Validates the scenario; throws ErrorKind::Configuration.
void validate(const Scenario& s);

/// Every (dgp, n) group draws mc_reps fresh samples; each sample is tested
/// with every preset and block-length rule. Seeds derive from master_seed and
/// the group label, so results do not depend on `workers` or on the order of
/// cells. A failure inside a cell is recorded in that cell's `error`.
[[nodiscard]] RejectionTable run_scenario(const Scenario& s,
                                          std::size_t workers = 1);

/// For each lag, tests (Y_{i-lag}, Y_i), i = lag+1..n, with seed
/// derive_seed(cfg.seed, lag) and block length cfg.l.
[[nodiscard]] std::vector<TestReport> autodep_scan(
    const FunctionalSample& y, std::span<const std::size_t> lags,
    Preset preset, double alpha, const MultiplierConfig& cfg);

/// As above, with the block length resolved per lag from the effective
/// sample size n - lag.
[[nodiscard]] std::vector<TestReport> autodep_scan(
    const FunctionalSample& y, std::span<const std::size_t> lags,
    Preset preset, double alpha, const BlockRule& rule, std::size_t n_b,
    std::uint64_t seed);

/// Built-in desk-scale scenarios: table1-desk, table2-desk, table3-desk and
/// smoke. With `full`, the table scenarios use 1000 replications, 1000
/// resamples and n in {100, 250, 1000}.
[[nodiscard]] Scenario named_scenario(std::string_view name, bool full = false);
[[nodiscard]] std::vector<std::string> scenario_names();

/// JSON scenario (see README for the schema). `text` may hold one scenario
/// object or {"scenarios": [...]}, in which case `name` selects one.
[[nodiscard]] Scenario scenario_from_json(std::string_view text,
                                          std::string_view name = {});
[[nodiscard]] std::string to_json(const Scenario& s, int indent = 2);

[[nodiscard]] std::string to_csv(const RejectionTable& table);
[[nodiscard]] std::string to_json(const RejectionTable& table,
                                  int indent = 2);

}  // namespace hsicwb
