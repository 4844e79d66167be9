#include "hsicwb/hsicwb.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsicwb/bootstrap.hpp"
#include "hsicwb/csv.hpp"
#include "hsicwb/dgp.hpp"
#include "hsicwb/error.hpp"
#include "hsicwb/experiment.hpp"
#include "hsicwb/hsic.hpp"
#include "hsicwb/parallel.hpp"

struct hsicwb_sample {
  hsicwb::FunctionalSample sample;
};

struct hsicwb_report {
  hsicwb::TestReport report;
};

struct hsicwb_table {
  hsicwb::RejectionTable table;
};

namespace {

thread_local std::string g_last_error;

hsicwb_status status_of(hsicwb::ErrorKind kind) {
  using hsicwb::ErrorKind;
  switch (kind) {
    case ErrorKind::InvalidGrid:
    case ErrorKind::Configuration:
    case ErrorKind::EmptyEmbedding:
      return HSICWB_ERR_CONFIG;
    case ErrorKind::Data:
      return HSICWB_ERR_DATA;
    case ErrorKind::Dimension:
      return HSICWB_ERR_DIMENSION;
    case ErrorKind::DegenerateSample:
      return HSICWB_ERR_DEGENERATE;
    case ErrorKind::InsufficientSample:
      return HSICWB_ERR_INSUFFICIENT;
    case ErrorKind::Numerical:
      return HSICWB_ERR_NUMERICAL;
    case ErrorKind::Io:
      return HSICWB_ERR_IO;
  }
  return HSICWB_ERR_INTERNAL;
}

// Runs `fn`, translating exceptions into a status and the thread's message.
template <class Fn>
hsicwb_status guarded(Fn&& fn) noexcept {
  g_last_error.clear();
  try {
    fn();
    return HSICWB_OK;
  } catch (const hsicwb::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown failure";
  }
  return HSICWB_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
  if (p == nullptr) {
    throw hsicwb::Error(hsicwb::ErrorKind::Configuration,
                        std::string(what) + " must not be NULL");
  }
}

char* duplicate(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) {
    throw std::bad_alloc();
  }
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

struct ResolvedOptions {
  std::optional<hsicwb::Preset> preset;
  hsicwb::KernelSpec kernel_x;
  hsicwb::KernelSpec kernel_y;
  double alpha;
  hsicwb::BlockRule rule;
  std::size_t n_b;
  std::uint64_t seed;
};

ResolvedOptions resolve_options(const hsicwb_test_options* options) {
  hsicwb_test_options defaults;
  hsicwb_test_options_init(&defaults);
  const auto& o = options != nullptr ? *options : defaults;
  ResolvedOptions r;
  if (o.preset != nullptr) {
    r.preset = hsicwb::parse_preset(o.preset);
    const auto p = hsicwb::make_preset(*r.preset);
    r.kernel_x = p.kernel_x;
    r.kernel_y = p.kernel_y;
  } else {
    if (o.kernel_x == nullptr || o.kernel_y == nullptr) {
      throw hsicwb::Error(hsicwb::ErrorKind::Configuration,
                          "either a preset or both kernels are required");
    }
    r.kernel_x = hsicwb::parse_kernel_spec(o.kernel_x);
    r.kernel_y = hsicwb::parse_kernel_spec(o.kernel_y);
  }
  r.alpha = o.alpha;
  r.rule = hsicwb::parse_block_rule(o.ln_rule != nullptr ? o.ln_rule
                                                         : "scaled:2");
  if (o.n_b < 1) {
    throw hsicwb::Error(hsicwb::ErrorKind::Configuration,
                        "n_b must be at least 1");
  }
  r.n_b = o.n_b;
  r.seed = o.seed;
  return r;
}

hsicwb::TestReport run_test(const hsicwb::FunctionalSample& x,
                            const hsicwb::FunctionalSample& y,
                            const ResolvedOptions& o) {
  const hsicwb::MultiplierConfig cfg{hsicwb::block_length(o.rule, x.rows()),
                                     o.n_b, o.seed};
  auto report =
      hsicwb::wild_bootstrap_test(x, y, o.kernel_x, o.kernel_y, o.alpha, cfg);
  report.preset = o.preset;
  report.l_rule = o.rule;
  return report;
}

}  // namespace

extern "C" {

const char* hsicwb_version(void) { return "0.1.0"; }

const char* hsicwb_last_error(void) { return g_last_error.c_str(); }

const char* hsicwb_status_name(hsicwb_status status) {
  switch (status) {
    case HSICWB_OK:
      return "ok";
    case HSICWB_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case HSICWB_ERR_CONFIG:
      return "configuration error";
    case HSICWB_ERR_DATA:
      return "data error";
    case HSICWB_ERR_DIMENSION:
      return "dimension mismatch";
    case HSICWB_ERR_DEGENERATE:
      return "degenerate sample";
    case HSICWB_ERR_INSUFFICIENT:
      return "insufficient sample";
    case HSICWB_ERR_NUMERICAL:
      return "numerical failure";
    case HSICWB_ERR_IO:
      return "i/o error";
    case HSICWB_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void hsicwb_string_free(char* s) { std::free(s); }

hsicwb_status hsicwb_sample_read_csv(const char* path,
                                     hsicwb_grid_row grid_row, int vector,
                                     hsicwb_sample** out) {
  if (path == nullptr || out == nullptr) {
    g_last_error = "path and out must not be NULL";
    return HSICWB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    hsicwb::CsvOptions options;
    options.grid_row = grid_row == HSICWB_GRID_ROW_PRESENT
                           ? hsicwb::GridRow::Present
                       : grid_row == HSICWB_GRID_ROW_ABSENT
                           ? hsicwb::GridRow::Absent
                           : hsicwb::GridRow::Auto;
    options.vector = vector != 0;
    *out = new hsicwb_sample{hsicwb::read_sample_csv(path, options)};
  });
}

hsicwb_status hsicwb_sample_from_values(const double* values, size_t n,
                                        size_t m, const double* grid_points,
                                        int vector, hsicwb_sample** out) {
  if (values == nullptr || out == nullptr) {
    g_last_error = "values and out must not be NULL";
    return HSICWB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    if (n == 0 || m == 0) {
      throw hsicwb::Error(hsicwb::ErrorKind::Dimension,
                          "sample must have at least one row and column");
    }
    auto grid = grid_points != nullptr
                    ? hsicwb::make_grid({grid_points, grid_points + m})
                : (vector != 0 || m == 1) ? hsicwb::make_vector_grid(m)
                                          : hsicwb::make_uniform_grid(m);
    hsicwb::RowMatrix v = Eigen::Map<const hsicwb::RowMatrix>(
        values, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    *out = new hsicwb_sample{hsicwb::FunctionalSample(std::move(v),
                                                      std::move(grid))};
  });
}

size_t hsicwb_sample_rows(const hsicwb_sample* s) {
  return s != nullptr ? s->sample.rows() : 0;
}

size_t hsicwb_sample_cols(const hsicwb_sample* s) {
  return s != nullptr ? s->sample.cols() : 0;
}

hsicwb_status hsicwb_sample_values(const hsicwb_sample* s, double* out,
                                   size_t capacity) {
  if (s == nullptr || out == nullptr) {
    g_last_error = "sample and out must not be NULL";
    return HSICWB_ERR_INVALID_ARGUMENT;
  }
  const auto count = s->sample.rows() * s->sample.cols();
  if (capacity < count) {
    g_last_error = "output buffer too small";
    return HSICWB_ERR_INVALID_ARGUMENT;
  }
  std::memcpy(out, s->sample.values().data(), count * sizeof(double));
  return HSICWB_OK;
}

hsicwb_status hsicwb_sample_write_csv(const hsicwb_sample* s, const char* path,
                                      int include_grid_row) {
  if (s == nullptr || path == nullptr) {
    g_last_error = "sample and path must not be NULL";
    return HSICWB_ERR_INVALID_ARGUMENT;
  }
  return guarded(
      [&] { hsicwb::write_sample_csv(path, s->sample, include_grid_row != 0); });
}

hsicwb_status hsicwb_sample_to_csv(const hsicwb_sample* s,
                                   int include_grid_row, char** out) {
  if (s == nullptr || out == nullptr) {
    g_last_error = "sample and out must not be NULL";
    return HSICWB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    std::ostringstream os;
    hsicwb::write_sample_csv(os, s->sample, include_grid_row != 0);
    *out = duplicate(os.str());
  });
}

void hsicwb_sample_free(hsicwb_sample* s) { delete s; }

hsicwb_status hsicwb_hsic(const hsicwb_sample* x, const hsicwb_sample* y,
                          const char* preset, const char* kernel_x,
                          const char* kernel_y, double* out) {
  if (x == nullptr || y == nullptr || out == nullptr) {
    g_last_error = "samples and out must not be NULL";
    return HSICWB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    if (preset != nullptr) {
      *out = hsicwb::hsic_pair(x->sample, y->sample,
                               hsicwb::parse_preset(preset))
                 .value();
      return;
    }
    require(kernel_x, "kernel_x");
    require(kernel_y, "kernel_y");
    *out = hsicwb::hsic_pair(x->sample, y->sample,
                             hsicwb::parse_kernel_spec(kernel_x),
                             hsicwb::parse_kernel_spec(kernel_y))
               .value();
  });
}

void hsicwb_test_options_init(hsicwb_test_options* options) {
  if (options == nullptr) {
    return;
  }
  options->preset = "MDD";
  options->kernel_x = nullptr;
  options->kernel_y = nullptr;
  options->alpha = 0.05;
  options->ln_rule = "scaled:2";
  options->n_b = 1000;
  options->seed = 1;
}

hsicwb_status hsicwb_test(const hsicwb_sample* x, const hsicwb_sample* y,
                          const hsicwb_test_options* options,
                          hsicwb_report** out) {
  if (x == nullptr || y == nullptr || out == nullptr) {
    g_last_error = "samples and out must not be NULL";
    return HSICWB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const auto o = resolve_options(options);
    *out = new hsicwb_report{run_test(x->sample, y->sample, o)};
  });
}

hsicwb_status hsicwb_autodep(const hsicwb_sample* y, const size_t* lags,
                             size_t n_lags,
                             const hsicwb_test_options* options,
                             hsicwb_report** out) {
  if (y == nullptr || (n_lags > 0 && (lags == nullptr || out == nullptr))) {
    g_last_error = "sample, lags and out must not be NULL";
    return HSICWB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const auto o = resolve_options(options);
    if (!o.preset) {
      throw hsicwb::Error(hsicwb::ErrorKind::Configuration,
                          "autodependence scans need a preset");
    }
    const std::vector<std::size_t> lag_list(lags, lags + n_lags);
    auto reports = hsicwb::autodep_scan(y->sample, lag_list, *o.preset,
                                        o.alpha, o.rule, o.n_b, o.seed);
    std::vector<std::unique_ptr<hsicwb_report>> owned;
    for (auto& r : reports) {
      owned.push_back(std::make_unique<hsicwb_report>(hsicwb_report{r}));
    }
    for (std::size_t i = 0; i < owned.size(); ++i) {
      out[i] = owned[i].release();
    }
  });
}

double hsicwb_report_statistic(const hsicwb_report* r) {
  return r != nullptr ? r->report.statistic : 0.0;
}

double hsicwb_report_quantile(const hsicwb_report* r) {
  return r != nullptr ? r->report.quantile : 0.0;
}

double hsicwb_report_p_value(const hsicwb_report* r) {
  return r != nullptr ? r->report.p_value : 1.0;
}

int hsicwb_report_reject(const hsicwb_report* r) {
  return r != nullptr && r->report.reject ? 1 : 0;
}

size_t hsicwb_report_block_length(const hsicwb_report* r) {
  return r != nullptr ? r->report.l : 0;
}

size_t hsicwb_report_replicate_count(const hsicwb_report* r) {
  return r != nullptr ? r->report.replicates.size() : 0;
}

const double* hsicwb_report_replicates(const hsicwb_report* r) {
  return r != nullptr ? r->report.replicates.data() : nullptr;
}

hsicwb_status hsicwb_report_to_json(const hsicwb_report* r,
                                    int include_replicates, int indent,
                                    char** out) {
  if (r == nullptr || out == nullptr) {
    g_last_error = "report and out must not be NULL";
    return HSICWB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    *out = duplicate(
        hsicwb::to_json(r->report, include_replicates != 0, indent));
  });
}

const char* hsicwb_report_csv_header(void) {
  static const std::string header = hsicwb::report_csv_header();
  return header.c_str();
}

hsicwb_status hsicwb_report_to_csv_row(const hsicwb_report* r, char** out) {
  if (r == nullptr || out == nullptr) {
    g_last_error = "report and out must not be NULL";
    return HSICWB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *out = duplicate(hsicwb::to_csv_row(r->report)); });
}

void hsicwb_report_free(hsicwb_report* r) { delete r; }

void hsicwb_dgp_options_init(hsicwb_dgp_options* options) {
  if (options == nullptr) {
    return;
  }
  options->name = "har1";
  options->n = 100;
  options->m = 1001;
  options->burn_in = 100;
  options->seed = 1;
  options->gamma1 = 0.0;
  options->g2 = 0;
  options->g3 = 0;
  options->g4 = 0;
}

hsicwb_status hsicwb_simulate(const hsicwb_dgp_options* options,
                              hsicwb_sample** x, hsicwb_sample** y,
                              char** sidecar_json) {
  if (options == nullptr || options->name == nullptr || x == nullptr) {
    g_last_error = "options, name and x must not be NULL";
    return HSICWB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const std::string name = options->name;
    hsicwb::DgpConfig cfg{options->n, options->burn_in,
                          hsicwb::make_uniform_grid(options->m),
                          options->seed};
    if (cfg.n < 1) {
      throw hsicwb::Error(hsicwb::ErrorKind::Configuration,
                          "n must be at least 1");
    }
    nlohmann::ordered_json side;
    side["dgp"] = name;
    side["n"] = cfg.n;
    side["m"] = options->m;
    side["grid"] = "uniform trapezoid on [0,1]";
    side["burn_in"] = cfg.burn_in;
    side["seed"] = cfg.seed;

    std::unique_ptr<hsicwb_sample> x_out;
    std::unique_ptr<hsicwb_sample> y_out;
    if (name == "har1") {
      side["gamma1"] = options->gamma1;
      x_out.reset(new hsicwb_sample{hsicwb::har1(options->gamma1, cfg)});
    } else if (name == "setar") {
      x_out.reset(new hsicwb_sample{hsicwb::setar(cfg)});
    } else if (name == "fgarch") {
      x_out.reset(new hsicwb_sample{hsicwb::fgarch(cfg)});
    } else if (name == "gp") {
      side.erase("burn_in");
      x_out.reset(new hsicwb_sample{hsicwb::iid_gp(
          cfg, hsicwb::GaussianProcessSampler::exp_cov(cfg.grid))});
    } else if (name == "wiener") {
      side.erase("burn_in");
      x_out.reset(new hsicwb_sample{hsicwb::iid_wiener(cfg)});
    } else if (name == "concurrent") {
      if (y == nullptr) {
        throw hsicwb::Error(hsicwb::ErrorKind::Configuration,
                            "concurrent regression returns two samples; y "
                            "must not be NULL");
      }
      side["g2"] = options->g2;
      side["g3"] = options->g3;
      side["g4"] = options->g4;
      auto [xs, ys] = hsicwb::concurrent_regression(options->g2, options->g3,
                                                    options->g4, cfg);
      x_out.reset(new hsicwb_sample{std::move(xs)});
      y_out.reset(new hsicwb_sample{std::move(ys)});
    } else {
      throw hsicwb::Error(hsicwb::ErrorKind::Configuration,
                          "unknown dgp '" + name +
                              "' (expected har1, setar, fgarch, gp, wiener or "
                              "concurrent)");
    }
    if (sidecar_json != nullptr) {
      *sidecar_json = duplicate(side.dump(2));
    }
    *x = x_out.release();
    if (y != nullptr) {
      *y = y_out.release();
    }
  });
}

hsicwb_status hsicwb_min_kernel_norm(double gamma, size_t m, double* out) {
  if (out == nullptr) {
    g_last_error = "out must not be NULL";
    return HSICWB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    *out = hsicwb::min_kernel_operator(gamma, hsicwb::make_uniform_grid(m))
               .norm();
  });
}

const char* hsicwb_scenario_names(void) {
  static const std::string names = [] {
    std::string s;
    for (const auto& n : hsicwb::scenario_names()) {
      s += n;
      s += '\n';
    }
    return s;
  }();
  return names.c_str();
}

void hsicwb_replicate_options_init(hsicwb_replicate_options* o) {
  if (o == nullptr) {
    return;
  }
  o->full = 0;
  o->workers = 0;
  o->mc_reps = 0;
  o->n_b = 0;
  o->override_seed = 0;
  o->seed = 0;
}

hsicwb_status hsicwb_replicate(const char* name, const char* config_json,
                               const hsicwb_replicate_options* o,
                               hsicwb_table** out) {
  if (out == nullptr || (name == nullptr && config_json == nullptr)) {
    g_last_error = "out and one of name/config must not be NULL";
    return HSICWB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    hsicwb_replicate_options defaults;
    hsicwb_replicate_options_init(&defaults);
    const auto& opts = o != nullptr ? *o : defaults;
    auto scenario =
        config_json != nullptr
            ? hsicwb::scenario_from_json(config_json,
                                         name != nullptr ? name : "")
            : hsicwb::named_scenario(name, opts.full != 0);
    if (config_json != nullptr && opts.full != 0) {
      scenario.mc_reps = 1000;
      scenario.n_b = 1000;
    }
    if (opts.mc_reps > 0) {
      scenario.mc_reps = opts.mc_reps;
    }
    if (opts.n_b > 0) {
      scenario.n_b = opts.n_b;
    }
    if (opts.override_seed != 0) {
      scenario.master_seed = opts.seed;
    }
    const auto workers =
        opts.workers > 0 ? opts.workers : hsicwb::default_workers();
    *out = new hsicwb_table{hsicwb::run_scenario(scenario, workers)};
  });
}

hsicwb_status hsicwb_table_to_csv(const hsicwb_table* t, char** out) {
  if (t == nullptr || out == nullptr) {
    g_last_error = "table and out must not be NULL";
    return HSICWB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *out = duplicate(hsicwb::to_csv(t->table)); });
}

hsicwb_status hsicwb_table_to_json(const hsicwb_table* t, char** out) {
  if (t == nullptr || out == nullptr) {
    g_last_error = "table and out must not be NULL";
    return HSICWB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *out = duplicate(hsicwb::to_json(t->table)); });
}

hsicwb_status hsicwb_scenario_to_json(const char* name, int full, char** out) {
  if (name == nullptr || out == nullptr) {
    g_last_error = "name and out must not be NULL";
    return HSICWB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    *out = duplicate(hsicwb::to_json(hsicwb::named_scenario(name, full != 0)));
  });
}

void hsicwb_table_free(hsicwb_table* t) { delete t; }

}  // extern "C"
