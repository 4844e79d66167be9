#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <hsicwb/hsicwb.h>

namespace {

std::string take(char* s) {
  std::string out = s != nullptr ? s : "";
  hsicwb_string_free(s);
  return out;
}

hsicwb_sample* simulate(const char* name, size_t n, size_t m, uint64_t seed,
                        hsicwb_sample** y = nullptr) {
  hsicwb_dgp_options o;
  hsicwb_dgp_options_init(&o);
  o.name = name;
  o.n = n;
  o.m = m;
  o.burn_in = 20;
  o.seed = seed;
  hsicwb_sample* x = nullptr;
  REQUIRE(hsicwb_simulate(&o, &x, y, nullptr) == HSICWB_OK);
  return x;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(hsicwb_version()) == "0.1.0");
  CHECK(std::string(hsicwb_status_name(HSICWB_OK)) == "ok");
  CHECK(std::string(hsicwb_status_name(HSICWB_ERR_CONFIG)) ==
        "configuration error");
}

TEST_CASE("simulate har1 with a zero first column") {
  hsicwb_dgp_options o;
  hsicwb_dgp_options_init(&o);
  CHECK(o.n == 100);
  CHECK(o.m == 1001);
  o.name = "har1";
  o.n = 10;
  o.m = 11;
  o.gamma1 = 0.0;
  hsicwb_sample* x = nullptr;
  hsicwb_sample* y = reinterpret_cast<hsicwb_sample*>(&o);
  char* sidecar = nullptr;
  REQUIRE(hsicwb_simulate(&o, &x, &y, &sidecar) == HSICWB_OK);
  CHECK(y == nullptr);
  CHECK(hsicwb_sample_rows(x) == 10);
  CHECK(hsicwb_sample_cols(x) == 11);
  std::vector<double> v(110);
  REQUIRE(hsicwb_sample_values(x, v.data(), v.size()) == HSICWB_OK);
  for (size_t i = 0; i < 10; ++i) {
    CHECK(v[i * 11] == 0.0);
  }
  CHECK(hsicwb_sample_values(x, v.data(), 5) == HSICWB_ERR_INVALID_ARGUMENT);
  const auto meta = nlohmann::json::parse(take(sidecar));
  CHECK(meta.at("dgp") == "har1");
  CHECK(meta.at("n") == 10);
  hsicwb_sample_free(x);
}

TEST_CASE("concurrent designs need a response handle") {
  hsicwb_dgp_options o;
  hsicwb_dgp_options_init(&o);
  o.name = "concurrent";
  o.n = 20;
  o.m = 11;
  hsicwb_sample* x = nullptr;
  CHECK(hsicwb_simulate(&o, &x, nullptr, nullptr) == HSICWB_ERR_CONFIG);
  hsicwb_sample* y = nullptr;
  REQUIRE(hsicwb_simulate(&o, &x, &y, nullptr) == HSICWB_OK);
  CHECK(hsicwb_sample_rows(y) == 20);
  hsicwb_sample_free(x);
  hsicwb_sample_free(y);
  o.name = "nope";
  CHECK(hsicwb_simulate(&o, &x, &y, nullptr) == HSICWB_ERR_CONFIG);
  CHECK(std::string(hsicwb_last_error()).find("nope") != std::string::npos);
}

TEST_CASE("statistics and tests") {
  const double xv[] = {0, 1, 2, 3, 4, 5};
  const double yv[] = {1, 0, 3, 2, 5, 4};
  hsicwb_sample* x = nullptr;
  hsicwb_sample* y = nullptr;
  REQUIRE(hsicwb_sample_from_values(xv, 6, 1, nullptr, 1, &x) == HSICWB_OK);
  REQUIRE(hsicwb_sample_from_values(yv, 6, 1, nullptr, 1, &y) == HSICWB_OK);

  double h = -1.0;
  REQUIRE(hsicwb_hsic(x, y, "DCOV", nullptr, nullptr, &h) == HSICWB_OK);
  CHECK(h > 0.0);
  double h2 = -1.0;
  REQUIRE(hsicwb_hsic(x, y, nullptr, "distance", "distance", &h2) == HSICWB_OK);
  CHECK(h == doctest::Approx(h2).epsilon(1e-14));
  CHECK(hsicwb_hsic(x, y, "XYZ", nullptr, nullptr, &h) == HSICWB_ERR_CONFIG);
  CHECK(hsicwb_hsic(x, nullptr, "MDD", nullptr, nullptr, &h) ==
        HSICWB_ERR_INVALID_ARGUMENT);

  hsicwb_test_options opt;
  hsicwb_test_options_init(&opt);
  CHECK(std::string(opt.preset) == "MDD");
  CHECK(opt.alpha == 0.05);
  CHECK(opt.n_b == 1000);
  opt.preset = "DCOV";
  opt.n_b = 99;
  opt.seed = 5;
  hsicwb_report* r = nullptr;
  REQUIRE(hsicwb_test(x, y, &opt, &r) == HSICWB_OK);
  CHECK(hsicwb_report_statistic(r) == doctest::Approx(6 * h2).epsilon(1e-12));
  CHECK(hsicwb_report_replicate_count(r) == 99);
  CHECK(hsicwb_report_block_length(r) >= 1);
  const double p = hsicwb_report_p_value(r);
  CHECK(p > 0.0);
  CHECK(p <= 1.0);
  CHECK(hsicwb_report_reject(r) ==
        (hsicwb_report_statistic(r) >= hsicwb_report_quantile(r) ? 1 : 0));
  char* text = nullptr;
  REQUIRE(hsicwb_report_to_json(r, 1, 2, &text) == HSICWB_OK);
  const auto j = nlohmann::json::parse(take(text));
  CHECK(j.at("provenance").at("preset") == "DCOV");
  CHECK(j.at("replicates").size() == 99);
  REQUIRE(hsicwb_report_to_csv_row(r, &text) == HSICWB_OK);
  const auto row = take(text);
  const std::string header = hsicwb_report_csv_header();
  CHECK(std::count(row.begin(), row.end(), ',') ==
        std::count(header.begin(), header.end(), ','));
  hsicwb_report_free(r);

  opt.preset = "nope";
  r = nullptr;
  CHECK(hsicwb_test(x, y, &opt, &r) == HSICWB_ERR_CONFIG);
  CHECK(r == nullptr);

  hsicwb_sample* short_y = nullptr;
  REQUIRE(hsicwb_sample_from_values(yv, 5, 1, nullptr, 1, &short_y) == HSICWB_OK);
  opt.preset = "MDD";
  CHECK(hsicwb_test(x, short_y, &opt, &r) == HSICWB_ERR_DIMENSION);
  hsicwb_sample_free(short_y);
  hsicwb_sample_free(x);
  hsicwb_sample_free(y);
}

TEST_CASE("input errors map to status codes") {
  hsicwb_sample* s = nullptr;
  CHECK(hsicwb_sample_read_csv("/nonexistent/file.csv", HSICWB_GRID_ROW_AUTO, 0,
                               &s) == HSICWB_ERR_IO);
  CHECK(std::string(hsicwb_last_error()).find("/nonexistent/file.csv") !=
        std::string::npos);
  const std::string path = "capi_bad.csv";
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f != nullptr);
    std::fputs("1,2\n3,abc\n", f);
    std::fclose(f);
  }
  CHECK(hsicwb_sample_read_csv(path.c_str(), HSICWB_GRID_ROW_AUTO, 0, &s) ==
        HSICWB_ERR_DATA);
  CHECK(std::string(hsicwb_last_error()).find("row 2, column 2") !=
        std::string::npos);
  std::remove(path.c_str());
  CHECK(hsicwb_sample_read_csv(nullptr, HSICWB_GRID_ROW_AUTO, 0, &s) ==
        HSICWB_ERR_INVALID_ARGUMENT);
  const double nan_values[] = {0.0, std::nan("")};
  CHECK(hsicwb_sample_from_values(nan_values, 2, 1, nullptr, 1, &s) ==
        HSICWB_ERR_DATA);
  hsicwb_sample_free(nullptr);
  hsicwb_report_free(nullptr);
  hsicwb_table_free(nullptr);
  hsicwb_string_free(nullptr);
}

TEST_CASE("csv round trip through the handle") {
  hsicwb_sample* x = simulate("wiener", 4, 6, 3);
  const std::string path = "capi_roundtrip.csv";
  REQUIRE(hsicwb_sample_write_csv(x, path.c_str(), 1) == HSICWB_OK);
  hsicwb_sample* back = nullptr;
  REQUIRE(hsicwb_sample_read_csv(path.c_str(), HSICWB_GRID_ROW_AUTO, 0, &back) ==
          HSICWB_OK);
  std::vector<double> a(24);
  std::vector<double> b(24);
  hsicwb_sample_values(x, a.data(), a.size());
  hsicwb_sample_values(back, b.data(), b.size());
  CHECK(a == b);
  char* text = nullptr;
  REQUIRE(hsicwb_sample_to_csv(back, 0, &text) == HSICWB_OK);
  const auto csv = take(text);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  std::remove(path.c_str());
  hsicwb_sample_free(x);
  hsicwb_sample_free(back);
}

TEST_CASE("autodependence scan") {
  hsicwb_sample* y = simulate("har1", 40, 11, 8);
  hsicwb_test_options opt;
  hsicwb_test_options_init(&opt);
  opt.n_b = 50;
  const size_t lags[] = {1, 2};
  hsicwb_report* out[2] = {nullptr, nullptr};
  REQUIRE(hsicwb_autodep(y, lags, 2, &opt, out) == HSICWB_OK);
  CHECK(hsicwb_report_replicate_count(out[0]) == 50);
  char* text = nullptr;
  REQUIRE(hsicwb_report_to_json(out[1], 0, -1, &text) == HSICWB_OK);
  const auto j = nlohmann::json::parse(take(text));
  CHECK(j.at("provenance").at("lag") == 2);
  CHECK(j.at("n") == 38);
  hsicwb_report_free(out[0]);
  hsicwb_report_free(out[1]);

  const size_t too_far[] = {40};
  hsicwb_report* none = nullptr;
  CHECK(hsicwb_autodep(y, too_far, 1, &opt, &none) == HSICWB_ERR_INSUFFICIENT);
  CHECK(none == nullptr);
  hsicwb_sample_free(y);
}

TEST_CASE("operator norm") {
  double v = 0.0;
  REQUIRE(hsicwb_min_kernel_norm(1.0, 1001, &v) == HSICWB_OK);
  CHECK(v == doctest::Approx(4.0 / (M_PI * M_PI)).epsilon(1e-3));
  CHECK(hsicwb_min_kernel_norm(1.0, 1, &v) != HSICWB_OK);
}

TEST_CASE("replicate a built-in scenario") {
  const std::string names = hsicwb_scenario_names();
  CHECK(names.find("smoke") != std::string::npos);
  hsicwb_replicate_options o;
  hsicwb_replicate_options_init(&o);
  o.workers = 1;
  hsicwb_table* t = nullptr;
  REQUIRE(hsicwb_replicate("smoke", nullptr, &o, &t) == HSICWB_OK);
  char* text = nullptr;
  REQUIRE(hsicwb_table_to_csv(t, &text) == HSICWB_OK);
  const auto csv1 = take(text);
  hsicwb_table_free(t);
  o.workers = 2;
  REQUIRE(hsicwb_replicate("smoke", nullptr, &o, &t) == HSICWB_OK);
  REQUIRE(hsicwb_table_to_csv(t, &text) == HSICWB_OK);
  CHECK(take(text) == csv1);
  REQUIRE(hsicwb_table_to_json(t, &text) == HSICWB_OK);
  CHECK(nlohmann::json::parse(take(text)).contains("cells"));
  hsicwb_table_free(t);

  REQUIRE(hsicwb_scenario_to_json("smoke", 0, &text) == HSICWB_OK);
  const auto config = take(text);
  o.mc_reps = 2;
  REQUIRE(hsicwb_replicate(nullptr, config.c_str(), &o, &t) == HSICWB_OK);
  REQUIRE(hsicwb_table_to_json(t, &text) == HSICWB_OK);
  CHECK(nlohmann::json::parse(take(text)).at("metadata").at("mc_reps") == 2);
  hsicwb_table_free(t);
  CHECK(hsicwb_replicate("nope", nullptr, &o, &t) == HSICWB_ERR_CONFIG);
  CHECK(hsicwb_replicate("smoke", nullptr, &o, nullptr) ==
        HSICWB_ERR_INVALID_ARGUMENT);
}
