#include "hsicwb/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "hsicwb/parallel.hpp"

namespace hsicwb {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

DgpConfig with_seed(const DgpConfig& cfg, std::uint64_t seed) {
  auto out = cfg;
  out.seed = seed;
  return out;
}

// Centered Gram matrices of one sample, computed at most once per kernel.
class CenteredCache {
 public:
  explicit CenteredCache(const FunctionalSample& sample) : geometry_(sample) {}

  std::pair<const CenteredGram*, KernelSpec> get(const KernelSpec& spec) {
    const auto key = static_cast<std::size_t>(spec.kind) * 2 +
                     static_cast<std::size_t>(spec.policy);
    for (auto& [k, resolved, gram] : entries_) {
      if (k == key && (spec.policy == BandwidthPolicy::MedianHeuristic ||
                       resolved == spec)) {
        return {gram.get(), resolved};
      }
    }
    auto resolved = geometry_.resolve(spec);
    auto gram =
        std::make_unique<CenteredGram>(double_center(geometry_.gram(resolved)));
    entries_.push_back({key, resolved, std::move(gram)});
    return {entries_.back().gram.get(), resolved};
  }

 private:
  struct Entry {
    std::size_t key;
    KernelSpec resolved;
    std::unique_ptr<CenteredGram> gram;
  };
  SampleGeometry geometry_;
  std::vector<Entry> entries_;
};

// Outcome of one replication for every (preset, rule) pair of a group.
struct Replication {
  std::vector<char> reject;         // preset-major, rule-minor
  std::vector<std::string> errors;  // one per preset
};

BlockRule rule_from_json(const json& j) {
  if (j.is_number_integer()) {
    return BlockRule::fixed(j.get<std::size_t>());
  }
  return parse_block_rule(j.get<std::string>());
}

DgpSpec dgp_from_json(const json& j) {
  const auto name = j.at("name").get<std::string>();
  if (name == "har1") {
    return DgpSpec::har1(j.value("gamma1", 0.0));
  }
  if (name == "setar") {
    return DgpSpec::setar_lag(j.value("lag", std::size_t{1}));
  }
  if (name == "concurrent") {
    if (j.contains("dgp")) {
      return DgpSpec::concurrent(j.at("dgp").get<int>());
    }
    return DgpSpec::concurrent(j.value("g2", 0), j.value("g3", 0),
                               j.value("g4", 0));
  }
  if (name == "iid_wiener") {
    DgpSpec d;
    d.kind = DgpSpec::Kind::IidWiener;
    return d;
  }
  if (name == "constant_y") {
    DgpSpec d;
    d.kind = DgpSpec::Kind::ConstantY;
    return d;
  }
  throw Error(ErrorKind::Configuration, "unknown dgp '" + name + "'");
}

ordered_json dgp_to_json(const DgpSpec& d) {
  ordered_json j;
  switch (d.kind) {
    case DgpSpec::Kind::Har1:
      j["name"] = "har1";
      j["gamma1"] = d.gamma1;
      break;
    case DgpSpec::Kind::SetarLag:
      j["name"] = "setar";
      j["lag"] = d.lag;
      break;
    case DgpSpec::Kind::Concurrent:
      j["name"] = "concurrent";
      j["g2"] = d.g2;
      j["g3"] = d.g3;
      j["g4"] = d.g4;
      break;
    case DgpSpec::Kind::IidWiener:
      j["name"] = "iid_wiener";
      break;
    case DgpSpec::Kind::ConstantY:
      j["name"] = "constant_y";
      break;
  }
  return j;
}

Scenario scenario_from_object(const json& j) {
  Scenario s;
  s.name = j.value("name", std::string("custom"));
  for (const auto& d : j.at("dgps")) {
    s.dgps.push_back(dgp_from_json(d));
  }
  for (const auto& p : j.at("presets")) {
    s.presets.push_back(parse_preset(p.get<std::string>()));
  }
  s.n_values = j.at("n").get<std::vector<std::size_t>>();
  for (const auto& r : j.at("l_rules")) {
    s.l_rules.push_back(rule_from_json(r));
  }
  s.alpha = j.value("alpha", s.alpha);
  s.n_b = j.value("n_b", s.n_b);
  s.mc_reps = j.value("mc_reps", s.mc_reps);
  s.master_seed = j.value("master_seed", s.master_seed);
  s.grid_points = j.value("grid_points", s.grid_points);
  s.burn_in = j.value("burn_in", s.burn_in);
  validate(s);
  return s;
}

std::vector<Preset> every_preset() {
  const auto all = all_presets();
  return {all.begin(), all.end()};
}

}  // namespace

DgpSpec DgpSpec::concurrent(int dgp) {
  switch (dgp) {
    case 1:
      return concurrent(0, 0, 0);
    case 2:
      return concurrent(1, 0, 0);
    case 3:
      return concurrent(0, 1, 0);
    case 4:
      return concurrent(0, 0, 1);
    default:
      throw Error(ErrorKind::Configuration,
                  "concurrent regression DGP must be 1, 2, 3 or 4");
  }
}

DgpSpec DgpSpec::concurrent(int g2, int g3, int g4) {
  for (const int g : {g2, g3, g4}) {
    if (g != 0 && g != 1) {
      throw Error(ErrorKind::Configuration,
                  "concurrent regression flags must be 0 or 1");
    }
  }
  DgpSpec d;
  d.kind = Kind::Concurrent;
  d.g2 = g2;
  d.g3 = g3;
  d.g4 = g4;
  return d;
}

std::string DgpSpec::label() const {
  switch (kind) {
    case Kind::Har1:
      return "har1(gamma1=" + format_number(gamma1) + ")";
    case Kind::SetarLag:
      return "setar(lag=" + std::to_string(lag) + ")";
    case Kind::Concurrent: {
      const int code = g2 * 4 + g3 * 2 + g4;
      switch (code) {
        case 0:
          return "concurrent(dgp=1)";
        case 4:
          return "concurrent(dgp=2)";
        case 2:
          return "concurrent(dgp=3)";
        case 1:
          return "concurrent(dgp=4)";
        default:
          return "concurrent(g2=" + std::to_string(g2) +
                 ",g3=" + std::to_string(g3) + ",g4=" + std::to_string(g4) +
                 ")";
      }
    }
    case Kind::IidWiener:
      return "iid_wiener";
    case Kind::ConstantY:
      return "constant_y";
  }
  return "?";
}

std::pair<FunctionalSample, FunctionalSample> generate_pair(
    const DgpSpec& spec, const DgpConfig& cfg,
    const GaussianProcessSampler* sampler) {
  switch (spec.kind) {
    case DgpSpec::Kind::Har1:
      return {har1(spec.gamma1, with_seed(cfg, derive_seed(cfg.seed, 0))),
              har1(spec.gamma1, with_seed(cfg, derive_seed(cfg.seed, 1)))};
    case DgpSpec::Kind::SetarLag:
      return lag_pairs(setar(cfg), spec.lag);
    case DgpSpec::Kind::Concurrent:
      if (sampler == nullptr) {
        throw Error(ErrorKind::Configuration,
                    "concurrent regression needs an error sampler");
      }
      return concurrent_regression(spec.g2, spec.g3, spec.g4, cfg, *sampler);
    case DgpSpec::Kind::IidWiener:
      return {iid_wiener(with_seed(cfg, derive_seed(cfg.seed, 0))),
              iid_wiener(with_seed(cfg, derive_seed(cfg.seed, 1)))};
    case DgpSpec::Kind::ConstantY: {
      auto x = iid_wiener(with_seed(cfg, derive_seed(cfg.seed, 0)));
      FunctionalSample y(RowMatrix::Zero(x.values().rows(), x.values().cols()),
                         cfg.grid);
      return {std::move(x), std::move(y)};
    }
  }
  throw Error(ErrorKind::Configuration, "unknown dgp");
}

const RejectionCell* RejectionTable::find(std::string_view dgp, Preset preset,
                                          const BlockRule& rule,
                                          std::size_t n) const {
  for (const auto& c : cells) {
    if (c.dgp == dgp && c.preset == preset && c.l_rule == rule && c.n == n) {
      return &c;
    }
  }
  return nullptr;
}

bool RejectionTable::operator==(const RejectionTable& other) const {
  return scenario == other.scenario && cells == other.cells &&
         mc_reps == other.mc_reps && n_b == other.n_b &&
         alpha == other.alpha && master_seed == other.master_seed &&
         grid_points == other.grid_points;
}

void validate(const Scenario& s) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::Configuration, "scenario: " + what);
  };
  if (s.dgps.empty() || s.presets.empty() || s.n_values.empty() ||
      s.l_rules.empty()) {
    fail("dgps, presets, n and l_rules must all be non-empty");
  }
  if (s.mc_reps < 1) {
    fail("mc_reps must be at least 1");
  }
  if (s.n_b < 1) {
    fail("n_b must be at least 1");
  }
  if (!(s.alpha > 0.0 && s.alpha < 1.0)) {
    fail("alpha must lie in (0, 1)");
  }
  if (s.grid_points < 2) {
    fail("grid_points must be at least 2");
  }
  for (const auto& rule : s.l_rules) {
    if (!(rule.value > 0.0)) {
      fail("block-length rules need a positive value");
    }
  }
  for (const auto n : s.n_values) {
    if (n < 2) {
      fail("sample sizes must be at least 2");
    }
    for (const auto& d : s.dgps) {
      if (d.kind == DgpSpec::Kind::SetarLag && d.lag + 2 > n) {
        fail("lag " + std::to_string(d.lag) + " too large for n = " +
             std::to_string(n));
      }
    }
  }
}

RejectionTable run_scenario(const Scenario& s, std::size_t workers) {
  validate(s);
  const auto started = std::chrono::steady_clock::now();
  const auto grid = make_uniform_grid(s.grid_points);

  std::unique_ptr<GaussianProcessSampler> sampler;
  if (std::any_of(s.dgps.begin(), s.dgps.end(), [](const DgpSpec& d) {
        return d.kind == DgpSpec::Kind::Concurrent;
      })) {
    sampler = std::make_unique<GaussianProcessSampler>(
        GaussianProcessSampler::exp_cov(grid));
  }

  struct Group {
    DgpSpec dgp;
    std::size_t n;
    std::uint64_t seed;
  };
  std::vector<Group> groups;
  for (const auto& d : s.dgps) {
    for (const auto n : s.n_values) {
      const auto key = d.label() + "|n=" + std::to_string(n);
      groups.push_back({d, n, derive_seed(s.master_seed, key)});
    }
  }

  const auto n_presets = s.presets.size();
  const auto n_rules = s.l_rules.size();
  std::vector<Replication> results(groups.size() * s.mc_reps);
  std::vector<std::size_t> effective_n(groups.size(), 0);

  parallel_for(results.size(), workers, [&](std::size_t task) {
    const auto& group = groups[task / s.mc_reps];
    const auto rep = task % s.mc_reps;
    auto& out = results[task];
    out.reject.assign(n_presets * n_rules, 0);
    out.errors.assign(n_presets, {});

    DgpConfig cfg{group.n, s.burn_in, grid, derive_seed(group.seed, rep)};
    std::optional<std::pair<FunctionalSample, FunctionalSample>> data;
    try {
      data.emplace(generate_pair(group.dgp, cfg, sampler.get()));
    } catch (const Error& e) {
      std::fill(out.errors.begin(), out.errors.end(),
                std::string("data generation: ") + e.what());
      return;
    }
    const auto& [x, y] = *data;
    CenteredCache cache_x(x);
    CenteredCache cache_y(y);
    for (std::size_t p = 0; p < n_presets; ++p) {
      const auto preset = make_preset(s.presets[p]);
      try {
        const auto gx = cache_x.get(preset.kernel_x);
        const auto gy = cache_y.get(preset.kernel_y);
        for (std::size_t r = 0; r < n_rules; ++r) {
          const auto& rule = s.l_rules[r];
          const auto tag = to_string(s.presets[p]) + "|" + to_string(rule);
          const MultiplierConfig mcfg{block_length(rule, x.rows()), s.n_b,
                                      derive_seed(cfg.seed, tag)};
          const auto report =
              bootstrap_from_grams(*gx.first, *gy.first, s.alpha, mcfg);
          out.reject[p * n_rules + r] = report.reject ? 1 : 0;
        }
      } catch (const Error& e) {
        out.errors[p] = e.what();
      }
    }
  });

  RejectionTable table;
  table.scenario = s.name;
  table.mc_reps = s.mc_reps;
  table.n_b = s.n_b;
  table.alpha = s.alpha;
  table.master_seed = s.master_seed;
  table.grid_points = s.grid_points;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& group = groups[g];
    const auto pairs_n = group.dgp.kind == DgpSpec::Kind::SetarLag
                             ? group.n - group.dgp.lag
                             : group.n;
    for (std::size_t p = 0; p < n_presets; ++p) {
      for (std::size_t r = 0; r < n_rules; ++r) {
        RejectionCell cell;
        cell.dgp = group.dgp.label();
        cell.preset = s.presets[p];
        cell.l_rule = s.l_rules[r];
        cell.n = group.n;
        cell.l = block_length(s.l_rules[r], pairs_n);
        cell.reps = s.mc_reps;
        for (std::size_t rep = 0; rep < s.mc_reps; ++rep) {
          const auto& res = results[g * s.mc_reps + rep];
          if (!res.errors[p].empty()) {
            cell.error =
                "replication " + std::to_string(rep) + ": " + res.errors[p];
            break;
          }
          cell.rejections += static_cast<std::size_t>(res.reject[p * n_rules + r]);
        }
        table.cells.push_back(std::move(cell));
      }
    }
  }
  table.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return table;
}

std::vector<TestReport> autodep_scan(const FunctionalSample& y,
                                     std::span<const std::size_t> lags,
                                     Preset preset, double alpha,
                                     const MultiplierConfig& cfg) {
  for (const auto lag : lags) {
    if (lag >= y.rows()) {
      throw Error(ErrorKind::InsufficientSample,
                  "lag " + std::to_string(lag) +
                      " is not smaller than the series length " +
                      std::to_string(y.rows()));
    }
  }
  std::vector<TestReport> out;
  out.reserve(lags.size());
  for (const auto lag : lags) {
    const auto [x_lagged, y_now] = lag_pairs(y, lag);
    auto lag_cfg = cfg;
    lag_cfg.seed = derive_seed(cfg.seed, lag);
    auto report = wild_bootstrap_test(x_lagged, y_now, preset, alpha, lag_cfg);
    report.lag = lag;
    out.push_back(std::move(report));
  }
  return out;
}

std::vector<TestReport> autodep_scan(const FunctionalSample& y,
                                     std::span<const std::size_t> lags,
                                     Preset preset, double alpha,
                                     const BlockRule& rule, std::size_t n_b,
                                     std::uint64_t seed) {
  std::vector<TestReport> out;
  out.reserve(lags.size());
  for (const auto lag : lags) {
    const std::size_t one[] = {lag};
    const auto effective = lag < y.rows() ? y.rows() - lag : 1;
    const MultiplierConfig cfg{block_length(rule, effective), n_b, seed};
    auto reports = autodep_scan(y, one, preset, alpha, cfg);
    reports.front().l_rule = rule;
    out.push_back(std::move(reports.front()));
  }
  return out;
}

std::vector<std::string> scenario_names() {
  return {"table1-desk", "table2-desk", "table3-desk", "smoke"};
}

Scenario named_scenario(std::string_view name, bool full) {
  Scenario s;
  s.name = std::string(name);
  s.presets = every_preset();
  s.n_values = {100, 250};
  s.l_rules = {BlockRule::scaled(2.0)};
  if (name == "table1-desk") {
    for (const double g : {0.0, 0.75, 1.5, 2.25}) {
      s.dgps.push_back(DgpSpec::har1(g));
    }
    s.l_rules = {BlockRule::fixed(1), BlockRule::scaled(2.0),
                 BlockRule::scaled(5.0), BlockRule::scaled(10.0)};
  } else if (name == "table2-desk") {
    for (const std::size_t lag : {1, 2, 4, 6}) {
      s.dgps.push_back(DgpSpec::setar_lag(lag));
    }
  } else if (name == "table3-desk") {
    for (const int d : {1, 2, 3, 4}) {
      s.dgps.push_back(DgpSpec::concurrent(d));
    }
  } else if (name == "smoke") {
    s.dgps = {DgpSpec::har1(0.0)};
    s.presets = {Preset::MDD, Preset::DCOV};
    s.n_values = {30};
    s.l_rules = {BlockRule::fixed(1), BlockRule::scaled(2.0)};
    s.n_b = 49;
    s.mc_reps = 10;
    s.grid_points = 51;
    return s;
  } else {
    throw Error(ErrorKind::Configuration,
                "unknown scenario '" + std::string(name) + "'");
  }
  if (full) {
    s.mc_reps = 1000;
    s.n_b = 1000;
    s.n_values = {100, 250, 1000};
  }
  return s;
}

Scenario scenario_from_json(std::string_view text, std::string_view name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Configuration,
                std::string("scenario config is not valid JSON: ") + e.what());
  }
  try {
    if (j.contains("scenarios")) {
      for (const auto& entry : j.at("scenarios")) {
        if (name.empty() || entry.value("name", std::string()) == name) {
          return scenario_from_object(entry);
        }
      }
      throw Error(ErrorKind::Configuration,
                  "scenario '" + std::string(name) + "' not found in config");
    }
    if (!name.empty() && j.value("name", std::string()) != name) {
      throw Error(ErrorKind::Configuration,
                  "config holds scenario '" + j.value("name", std::string()) +
                      "', not '" + std::string(name) + "'");
    }
    return scenario_from_object(j);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Configuration,
                std::string("malformed scenario config: ") + e.what());
  }
}

std::string to_json(const Scenario& s, int indent) {
  ordered_json j;
  j["name"] = s.name;
  j["dgps"] = ordered_json::array();
  for (const auto& d : s.dgps) {
    j["dgps"].push_back(dgp_to_json(d));
  }
  j["presets"] = ordered_json::array();
  for (const auto p : s.presets) {
    j["presets"].push_back(to_string(p));
  }
  j["n"] = s.n_values;
  j["l_rules"] = ordered_json::array();
  for (const auto& r : s.l_rules) {
    j["l_rules"].push_back(to_string(r));
  }
  j["alpha"] = s.alpha;
  j["n_b"] = s.n_b;
  j["mc_reps"] = s.mc_reps;
  j["master_seed"] = s.master_seed;
  j["grid_points"] = s.grid_points;
  j["burn_in"] = s.burn_in;
  return j.dump(indent);
}

std::string to_csv(const RejectionTable& table) {
  std::ostringstream os;
  os << "dgp,preset,l_rule,n,l,rejections,reps,rate,error\n";
  for (const auto& c : table.cells) {
    os << '"' << c.dgp << "\"," << to_string(c.preset) << ','
       << to_string(c.l_rule) << ',' << c.n << ',' << c.l << ',';
    if (c.ok()) {
      os << c.rejections << ',' << c.reps << ',' << format_number(c.rate())
         << ",\n";
    } else {
      std::string msg = c.error;
      std::replace(msg.begin(), msg.end(), '"', '\'');
      os << ',' << c.reps << ",,\"" << msg << "\"\n";
    }
  }
  return os.str();
}

std::string to_json(const RejectionTable& table, int indent) {
  ordered_json j;
  j["scenario"] = table.scenario;
  auto& meta = j["metadata"];
  meta["mc_reps"] = table.mc_reps;
  meta["n_b"] = table.n_b;
  meta["alpha"] = table.alpha;
  meta["master_seed"] = table.master_seed;
  meta["grid_points"] = table.grid_points;
  meta["wall_seconds"] = table.wall_seconds;
  j["cells"] = ordered_json::array();
  for (const auto& c : table.cells) {
    ordered_json cell;
    cell["dgp"] = c.dgp;
    cell["preset"] = to_string(c.preset);
    cell["l_rule"] = to_string(c.l_rule);
    cell["n"] = c.n;
    cell["l"] = c.l;
    cell["reps"] = c.reps;
    if (c.ok()) {
      cell["rejections"] = c.rejections;
      cell["rate"] = c.rate();
    } else {
      cell["error"] = c.error;
    }
    j["cells"].push_back(std::move(cell));
  }
  return j.dump(indent);
}

}  // namespace hsicwb
