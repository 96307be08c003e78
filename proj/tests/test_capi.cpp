// Exercises the shared-library boundary the way an external client would:
// only foliashadow.h, no internal headers.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "foliashadow.h"

namespace {

struct Scenario {
  fs_scenario* s = nullptr;
  ~Scenario() { fs_scenario_free(s); }
};

}  // namespace

TEST_SUITE_BEGIN("capi");

TEST_CASE("version and catalog strings") {
  REQUIRE(fs_version() != nullptr);
  CHECK(std::strcmp(fs_version(), "0.1.0") == 0);
  const char* list = fs_list_builtin_scenarios();
  REQUIRE(list != nullptr);
  std::string s(list);
  CHECK(s.find("catmap-stability") != std::string::npos);
  CHECK(s.find("single-leaf-trivial") != std::string::npos);
  CHECK(s.find("t2-vertical-noexp") != std::string::npos);
  CHECK(s.find("t3-center") != std::string::npos);
}

TEST_CASE("torus distance helper") {
  double a[2] = {0.9, 0.9};
  double b[2] = {0.1, 0.1};
  double d = -1.0;
  CHECK(fs_torus_distance(a, b, 2, &d) == FS_OK);
  CHECK(d == doctest::Approx(std::sqrt(0.08)));
  CHECK(fs_torus_distance(nullptr, b, 2, &d) == FS_ERR_INVALID_ARGUMENT);
  CHECK(fs_torus_distance(a, b, 0, &d) == FS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("builtin scenarios load and bad names report an error") {
  Scenario sc;
  CHECK(fs_scenario_builtin("single-leaf-trivial", &sc.s) == FS_OK);
  REQUIRE(sc.s != nullptr);

  fs_scenario* bad = nullptr;
  fs_status st = fs_scenario_builtin("no-such", &bad);
  CHECK(st == FS_ERR_CONFIG);
  CHECK(bad == nullptr);
  REQUIRE(fs_last_error() != nullptr);
  CHECK(std::string(fs_last_error()).find("no-such") != std::string::npos);

  CHECK(fs_scenario_builtin(nullptr, &bad) == FS_ERR_INVALID_ARGUMENT);
  CHECK(fs_scenario_builtin("t3-center", nullptr) == FS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("scenarios parse from text in both formats") {
  const char* json_text = R"({"name": "c-demo", "dim": 1, "grid_n": 16})";
  Scenario a;
  CHECK(fs_scenario_from_text(json_text, &a.s) == FS_OK);
  Scenario b;
  CHECK(fs_scenario_from_text("name = c-demo\ndim = 1\ngrid_n = 16\n", &b.s) == FS_OK);
  fs_scenario* bad = nullptr;
  CHECK(fs_scenario_from_text("dim = seven\n", &bad) == FS_ERR_CONFIG);
  CHECK(fs_scenario_from_file("/no/such/file.json", &bad) == FS_ERR_CONFIG);
}

TEST_CASE("end-to-end run through the C surface") {
  Scenario sc;
  REQUIRE(fs_scenario_builtin("single-leaf-trivial", &sc.s) == FS_OK);
  CHECK(fs_scenario_set_seed(sc.s, 42) == FS_OK);
  CHECK(fs_scenario_set_output_dir(sc.s, "capi_test_out") == FS_OK);
  CHECK(fs_scenario_run(sc.s, "shadow") == FS_OK);
  const char* report = fs_scenario_report(sc.s);
  REQUIRE(report != nullptr);
  std::string r(report);
  CHECK(r.find("\"all_passed\": true") != std::string::npos);
  CHECK(r.find("\"seed\": 42") != std::string::npos);
  CHECK(std::filesystem::exists("capi_test_out"));
  std::filesystem::remove_all("capi_test_out");

  CHECK(fs_scenario_run(sc.s, nullptr) == FS_ERR_INVALID_ARGUMENT);
  CHECK(fs_scenario_run(nullptr, "shadow") == FS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("config files load from disk") {
  std::filesystem::create_directories("capi_test_out");
  const char* path = "capi_test_out/cfg.ini";
  {
    std::ofstream out(path);
    out << "name = file-demo\ndim = 1\ngrid_n = 16\ntrials = 2\norbit_length = 6\n";
  }
  Scenario sc;
  REQUIRE(fs_scenario_from_file(path, &sc.s) == FS_OK);
  CHECK(fs_scenario_set_output_dir(sc.s, "capi_test_out") == FS_OK);
  CHECK(fs_scenario_run(sc.s, "shadow") == FS_OK);
  std::filesystem::remove_all("capi_test_out");
}

TEST_SUITE_END();
