// Command-line front end over the hsicwb C API.
#include <hsicwb/hsicwb.h>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct Failure {
  int code;
  std::string message;
};

int exit_code(hsicwb_status status) {
  switch (status) {
    case HSICWB_OK:
      return kExitOk;
    case HSICWB_ERR_INVALID_ARGUMENT:
    case HSICWB_ERR_CONFIG:
      return kExitConfig;
    case HSICWB_ERR_DATA:
    case HSICWB_ERR_DIMENSION:
    case HSICWB_ERR_DEGENERATE:
    case HSICWB_ERR_INSUFFICIENT:
    case HSICWB_ERR_IO:
      return kExitData;
    default:
      return kExitFailure;
  }
}

void check(hsicwb_status status) {
  if (status != HSICWB_OK) {
    throw Failure{exit_code(status), std::string(hsicwb_status_name(status)) +
                                         ": " + hsicwb_last_error()};
  }
}

struct SampleDeleter {
  void operator()(hsicwb_sample* s) const { hsicwb_sample_free(s); }
};
struct ReportDeleter {
  void operator()(hsicwb_report* r) const { hsicwb_report_free(r); }
};
struct TableDeleter {
  void operator()(hsicwb_table* t) const { hsicwb_table_free(t); }
};
using SamplePtr = std::unique_ptr<hsicwb_sample, SampleDeleter>;
using ReportPtr = std::unique_ptr<hsicwb_report, ReportDeleter>;
using TablePtr = std::unique_ptr<hsicwb_table, TableDeleter>;

// Takes ownership of a string returned by the library.
std::string take(char* s) {
  std::string out = s != nullptr ? s : "";
  hsicwb_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Failure{kExitData, "cannot open '" + path + "'"};
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    throw Failure{kExitData, "cannot write '" + path + "'"};
  }
}

json read_config(const std::string& path) {
  try {
    auto j = json::parse(read_file(path));
    if (!j.is_object()) {
      throw Failure{kExitConfig, "config '" + path + "' must hold an object"};
    }
    return j;
  } catch (const json::exception& e) {
    throw Failure{kExitConfig,
                  "config '" + path + "' is not valid JSON: " + e.what()};
  }
}

// Fills `value` from the config when the flag was not given on the command
// line. Keys may use '_' or '-'.
template <class T>
void from_config(const json& config, const CLI::App& app,
                 const std::string& flag, T& value) {
  if (app.count("--" + flag) > 0) {
    return;
  }
  std::string key = flag;
  std::replace(key.begin(), key.end(), '-', '_');
  for (const auto& k : {key, flag}) {
    if (config.contains(k)) {
      try {
        config.at(k).get_to(value);
      } catch (const json::exception& e) {
        throw Failure{kExitConfig,
                      "config key '" + k + "' has the wrong type: " + e.what()};
      }
      return;
    }
  }
}

hsicwb_grid_row grid_row_of(const std::string& s) {
  if (s == "auto") {
    return HSICWB_GRID_ROW_AUTO;
  }
  if (s == "present" || s == "yes") {
    return HSICWB_GRID_ROW_PRESENT;
  }
  if (s == "absent" || s == "no") {
    return HSICWB_GRID_ROW_ABSENT;
  }
  throw Failure{kExitConfig, "--grid-row must be auto, present or absent"};
}

SamplePtr load_sample(const std::string& path, const std::string& grid_row,
                      bool vector) {
  hsicwb_sample* s = nullptr;
  check(hsicwb_sample_read_csv(path.c_str(), grid_row_of(grid_row),
                               vector ? 1 : 0, &s));
  return SamplePtr(s);
}

struct TestFlags {
  std::string preset = "MDD";
  std::string kernel_x;
  std::string kernel_y;
  double alpha = 0.05;
  std::string ln_rule = "scaled:2";
  std::size_t nb = 1000;
  std::uint64_t seed = 1;
  std::string format = "json";
  bool replicates = false;
  std::string grid_row = "auto";
  bool vector = false;
  std::string config;
};

void add_test_flags(CLI::App* cmd, TestFlags& f) {
  cmd->add_option("--preset", f.preset,
                  "MDD, KCMD_G, DCOV or HSIC_G (default MDD)");
  cmd->add_option("--kernel-x", f.kernel_x,
                  "kernel on X: linear, distance, gaussian:median, "
                  "gaussian:<bandwidth_sq>; overrides the preset");
  cmd->add_option("--kernel-y", f.kernel_y, "kernel on Y");
  cmd->add_option("--alpha", f.alpha, "nominal level (default 0.05)");
  cmd->add_option("--ln-rule", f.ln_rule,
                  "block length: fixed:<k>, scaled:<c> (default scaled:2)");
  cmd->add_option("--nb", f.nb, "bootstrap resamples (default 1000)");
  cmd->add_option("--seed", f.seed, "bootstrap seed (default 1)");
  cmd->add_option("--format", f.format, "json, table or csv")
      ->check(CLI::IsMember({"json", "table", "csv"}));
  cmd->add_flag("--replicates", f.replicates,
                "include bootstrap replicates in JSON output");
  cmd->add_option("--grid-row", f.grid_row,
                  "first CSV row is the grid: auto, present, absent");
  cmd->add_flag("--vector", f.vector,
                "treat columns as coordinates of vectors");
  cmd->add_option("--config", f.config,
                  "JSON file with flag defaults (command line wins)");
}

void apply_test_config(const CLI::App& cmd, TestFlags& f) {
  if (f.config.empty()) {
    return;
  }
  const auto c = read_config(f.config);
  from_config(c, cmd, "preset", f.preset);
  from_config(c, cmd, "kernel-x", f.kernel_x);
  from_config(c, cmd, "kernel-y", f.kernel_y);
  from_config(c, cmd, "alpha", f.alpha);
  from_config(c, cmd, "ln-rule", f.ln_rule);
  from_config(c, cmd, "nb", f.nb);
  from_config(c, cmd, "seed", f.seed);
  from_config(c, cmd, "format", f.format);
  from_config(c, cmd, "replicates", f.replicates);
  from_config(c, cmd, "grid-row", f.grid_row);
  from_config(c, cmd, "vector", f.vector);
}

hsicwb_test_options to_options(const TestFlags& f) {
  hsicwb_test_options o;
  hsicwb_test_options_init(&o);
  const bool kernels = !f.kernel_x.empty() || !f.kernel_y.empty();
  if (kernels && (f.kernel_x.empty() || f.kernel_y.empty())) {
    throw Failure{kExitConfig, "--kernel-x and --kernel-y go together"};
  }
  o.preset = kernels ? nullptr : f.preset.c_str();
  o.kernel_x = kernels ? f.kernel_x.c_str() : nullptr;
  o.kernel_y = kernels ? f.kernel_y.c_str() : nullptr;
  o.alpha = f.alpha;
  o.ln_rule = f.ln_rule.c_str();
  o.n_b = f.nb;
  o.seed = f.seed;
  return o;
}

json report_json(const hsicwb_report* r, bool replicates) {
  char* text = nullptr;
  check(hsicwb_report_to_json(r, replicates ? 1 : 0, -1, &text));
  return json::parse(take(text));
}

std::string scalar_text(const json& v) {
  if (v.is_string()) {
    return v.get<std::string>();
  }
  if (v.is_null()) {
    return "-";
  }
  return v.dump();
}

void print_table(const json& j, const std::string& prefix = {}) {
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      print_table(value, prefix + key + ".");
    } else if (value.is_array()) {
      std::cout << std::left << std::setw(28) << prefix + key << '['
                << value.size() << " values]\n";
    } else {
      std::cout << std::left << std::setw(28) << prefix + key
                << scalar_text(value) << '\n';
    }
  }
}

int run_test(const TestFlags& f, const std::string& x_path,
             const std::string& y_path) {
  const auto x = load_sample(x_path, f.grid_row, f.vector);
  const auto y = load_sample(y_path, f.grid_row, f.vector);
  const auto options = to_options(f);
  hsicwb_report* raw = nullptr;
  check(hsicwb_test(x.get(), y.get(), &options, &raw));
  const ReportPtr report(raw);
  if (f.format == "csv") {
    char* row = nullptr;
    check(hsicwb_report_to_csv_row(report.get(), &row));
    std::cout << hsicwb_report_csv_header() << '\n' << take(row) << '\n';
  } else if (f.format == "table") {
    print_table(report_json(report.get(), false));
  } else {
    char* text = nullptr;
    check(hsicwb_report_to_json(report.get(), f.replicates ? 1 : 0, 2, &text));
    std::cout << take(text) << '\n';
  }
  return kExitOk;
}

int run_autodep(const TestFlags& f, const std::string& y_path,
                const std::vector<std::size_t>& lags) {
  const auto y = load_sample(y_path, f.grid_row, f.vector);
  const auto options = to_options(f);
  std::vector<hsicwb_report*> raw(lags.size(), nullptr);
  check(hsicwb_autodep(y.get(), lags.data(), lags.size(), &options,
                       raw.data()));
  std::vector<ReportPtr> reports;
  for (auto* r : raw) {
    reports.emplace_back(r);
  }
  if (f.format == "csv") {
    std::cout << hsicwb_report_csv_header() << '\n';
    for (const auto& r : reports) {
      char* row = nullptr;
      check(hsicwb_report_to_csv_row(r.get(), &row));
      std::cout << take(row) << '\n';
    }
  } else if (f.format == "table") {
    std::cout << std::left << std::setw(6) << "lag" << std::setw(6) << "n"
              << std::setw(5) << "l" << std::setw(16) << "statistic"
              << std::setw(16) << "quantile" << std::setw(10) << "p_value"
              << "reject\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto* r = reports[i].get();
      const auto j = report_json(r, false);
      std::cout << std::left << std::setw(6) << lags[i] << std::setw(6)
                << scalar_text(j.value("n", json())) << std::setw(5)
                << hsicwb_report_block_length(r) << std::setw(16)
                << hsicwb_report_statistic(r) << std::setw(16)
                << hsicwb_report_quantile(r) << std::setw(10)
                << hsicwb_report_p_value(r)
                << (hsicwb_report_reject(r) != 0 ? "yes" : "no") << '\n';
    }
  } else {
    json out = json::array();
    for (const auto& r : reports) {
      out.push_back(report_json(r.get(), f.replicates));
    }
    std::cout << out.dump(2) << '\n';
  }
  return kExitOk;
}

struct SimulateFlags {
  std::string dgp;
  std::size_t n = 100;
  std::size_t m = 1001;
  std::size_t burn_in = 100;
  std::uint64_t seed = 1;
  double gamma1 = 0.0;
  int g2 = 0;
  int g3 = 0;
  int g4 = 0;
  std::string out;
  std::string y_out;
  std::string sidecar;
  bool with_grid = false;
  std::string config;
};

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash)) {
    return path + suffix;
  }
  return path.substr(0, dot) + suffix + path.substr(dot);
}

int run_simulate(const CLI::App& cmd, SimulateFlags f) {
  if (!f.config.empty()) {
    const auto c = read_config(f.config);
    from_config(c, cmd, "n", f.n);
    from_config(c, cmd, "m", f.m);
    from_config(c, cmd, "burn-in", f.burn_in);
    from_config(c, cmd, "seed", f.seed);
    from_config(c, cmd, "gamma1", f.gamma1);
    from_config(c, cmd, "g2", f.g2);
    from_config(c, cmd, "g3", f.g3);
    from_config(c, cmd, "g4", f.g4);
    from_config(c, cmd, "with-grid", f.with_grid);
  }
  hsicwb_dgp_options o;
  hsicwb_dgp_options_init(&o);
  o.name = f.dgp.c_str();
  o.n = f.n;
  o.m = f.m;
  o.burn_in = f.burn_in;
  o.seed = f.seed;
  o.gamma1 = f.gamma1;
  o.g2 = f.g2;
  o.g3 = f.g3;
  o.g4 = f.g4;
  const bool paired = f.dgp == "concurrent";
  if (paired && f.out.empty() && f.y_out.empty()) {
    throw Failure{kExitConfig, "concurrent designs need --out"};
  }
  hsicwb_sample* x_raw = nullptr;
  hsicwb_sample* y_raw = nullptr;
  char* side_raw = nullptr;
  check(hsicwb_simulate(&o, &x_raw, &y_raw, &side_raw));
  const SamplePtr x(x_raw);
  const SamplePtr y(y_raw);
  auto side = json::parse(take(side_raw));

  const int grid = f.with_grid ? 1 : 0;
  char* text = nullptr;
  check(hsicwb_sample_to_csv(x.get(), grid, &text));
  const auto x_csv = take(text);
  if (f.out.empty()) {
    std::cout << x_csv;
  } else {
    write_file(f.out, x_csv);
    side["x_file"] = f.out;
  }
  if (y) {
    const auto y_path = f.y_out.empty() ? with_suffix(f.out, "_y") : f.y_out;
    check(hsicwb_sample_to_csv(y.get(), grid, &text));
    write_file(y_path, take(text));
    side["y_file"] = y_path;
  }
  side["grid_row"] = f.with_grid;
  const auto sidecar =
      !f.sidecar.empty() ? f.sidecar
      : !f.out.empty()   ? f.out + ".json"
                         : std::string();
  if (!sidecar.empty()) {
    write_file(sidecar, side.dump(2) + "\n");
  }
  return kExitOk;
}

struct ReplicateFlags {
  std::string name;
  std::string config;
  bool full = false;
  std::size_t mc_reps = 0;
  std::size_t nb = 0;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
  std::string out;
  bool show = false;
};

int run_replicate(const ReplicateFlags& f) {
  if (f.name.empty() && f.config.empty()) {
    throw Failure{kExitConfig, "replicate needs a scenario name or --config"};
  }
  if (f.show) {
    if (!f.config.empty()) {
      std::cout << read_file(f.config);
      return kExitOk;
    }
    char* text = nullptr;
    check(hsicwb_scenario_to_json(f.name.c_str(), f.full ? 1 : 0, &text));
    std::cout << take(text) << '\n';
    return kExitOk;
  }
  hsicwb_replicate_options o;
  hsicwb_replicate_options_init(&o);
  o.full = f.full ? 1 : 0;
  o.workers = f.threads;
  o.mc_reps = f.mc_reps;
  o.n_b = f.nb;
  if (f.seed) {
    o.override_seed = 1;
    o.seed = *f.seed;
  }
  std::string config_text;
  if (!f.config.empty()) {
    config_text = read_file(f.config);
  }
  hsicwb_table* raw = nullptr;
  check(hsicwb_replicate(f.name.empty() ? nullptr : f.name.c_str(),
                         f.config.empty() ? nullptr : config_text.c_str(), &o,
                         &raw));
  const TablePtr table(raw);
  char* csv = nullptr;
  check(hsicwb_table_to_csv(table.get(), &csv));
  char* js = nullptr;
  check(hsicwb_table_to_json(table.get(), &js));
  const auto csv_text = take(csv);
  const auto json_text = take(js);
  if (f.out.empty()) {
    std::cout << csv_text;
    std::cerr << json_text << '\n';
  } else {
    write_file(f.out + ".csv", csv_text);
    write_file(f.out + ".json", json_text + "\n");
    std::cerr << "wrote " << f.out << ".csv and " << f.out << ".json\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel independence and mean-independence tests for "
               "functional time series"};
  app.set_version_flag("--version", std::string(hsicwb_version()));
  app.require_subcommand(1);

  TestFlags test_flags;
  std::string x_path;
  std::string y_path;
  auto* test = app.add_subcommand("test", "test independence of X and Y");
  test->add_option("x", x_path, "CSV sample of X (one observation per row)")
      ->required();
  test->add_option("y", y_path, "CSV sample of Y")->required();
  add_test_flags(test, test_flags);

  TestFlags auto_flags;
  std::string series_path;
  std::vector<std::size_t> lags;
  auto* autodep =
      app.add_subcommand("autodep", "test Y_i against its own lags Y_{i-lag}");
  autodep->add_option("y", series_path, "CSV series")->required();
  autodep->add_option("--lags", lags, "lags to scan, e.g. --lags 1,2,4,6")
      ->delimiter(',')
      ->required();
  add_test_flags(autodep, auto_flags);

  SimulateFlags sim;
  auto* simulate = app.add_subcommand(
      "simulate", "draw a sample from a simulation design");
  simulate
      ->add_option("dgp", sim.dgp,
                   "har1, setar, fgarch, gp, wiener or concurrent")
      ->required();
  simulate->add_option("--n", sim.n, "observations (default 100)");
  simulate->add_option("--m", sim.m, "grid points on [0,1] (default 1001)");
  simulate->add_option("--burn-in", sim.burn_in, "discarded warm-up draws");
  simulate->add_option("--seed", sim.seed, "seed (default 1)");
  simulate->add_option("--gamma1", sim.gamma1, "har1 operator scale");
  simulate->add_option("--g2", sim.g2, "concurrent: linear term (0/1)");
  simulate->add_option("--g3", sim.g3, "concurrent: nonlinear term (0/1)");
  simulate->add_option("--g4", sim.g4,
                       "concurrent: heteroscedastic term (0/1)");
  simulate->add_option("--out", sim.out, "CSV path for X (default stdout)");
  simulate->add_option("--y-out", sim.y_out,
                       "CSV path for Y (concurrent; default <out>_y.csv)");
  simulate->add_option("--sidecar", sim.sidecar,
                       "JSON record of the configuration (default "
                       "<out>.json)");
  simulate->add_flag("--with-grid", sim.with_grid,
                     "write the grid as the first CSV row");
  simulate->add_option("--config", sim.config, "JSON file with flag defaults");

  ReplicateFlags rep;
  std::uint64_t rep_seed = 0;
  auto* replicate = app.add_subcommand(
      "replicate", "run a Monte Carlo scenario and write rejection rates");
  replicate->add_option("name", rep.name,
                        "built-in scenario (table1-desk, table2-desk, "
                        "table3-desk, smoke) or a name in --config");
  replicate->add_option("--config", rep.config, "JSON scenario file");
  replicate->add_flag("--full", rep.full,
                      "1000 replications, 1000 resamples, n up to 1000");
  replicate->add_option("--mc-reps", rep.mc_reps, "override replications");
  replicate->add_option("--nb", rep.nb, "override bootstrap resamples");
  auto* seed_opt =
      replicate->add_option("--seed", rep_seed, "override master seed");
  replicate->add_option("--threads", rep.threads,
                        "workers (default HSICWB_THREADS or all cores)");
  replicate->add_option("--out", rep.out,
                        "write <out>.csv and <out>.json instead of stdout");
  replicate->add_flag("--show", rep.show,
                      "print the scenario definition and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*test) {
      apply_test_config(*test, test_flags);
      return run_test(test_flags, x_path, y_path);
    }
    if (*autodep) {
      apply_test_config(*autodep, auto_flags);
      return run_autodep(auto_flags, series_path, lags);
    }
    if (*simulate) {
      return run_simulate(*simulate, sim);
    }
    if (*replicate) {
      if (seed_opt->count() > 0) {
        rep.seed = rep_seed;
      }
      return run_replicate(rep);
    }
  } catch (const Failure& f) {
    std::cerr << "hsicwb: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "hsicwb: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitConfig;
}
