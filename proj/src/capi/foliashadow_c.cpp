#include "foliashadow.h"

#include <string>

#include "core/scenario.hpp"
#include "core/torus.hpp"

namespace {

thread_local std::string g_last_error;

fs_status status_of(const folia::Error& e) {
  using folia::ErrorCode;
  switch (e.code()) {
    case ErrorCode::ConfigError:
      return FS_ERR_CONFIG;
    case ErrorCode::InvalidInput:
    case ErrorCode::DimMismatch:
      return FS_ERR_INVALID_ARGUMENT;
    case ErrorCode::Unsupported:
      return FS_ERR_UNSUPPORTED;
    case ErrorCode::ShadowNotFound:
    case ErrorCode::EmptySet:
      return FS_ERR_NOT_FOUND;
    case ErrorCode::VerificationFailed:
    case ErrorCode::LeafReturnFailed:
      return FS_ERR_VERIFICATION_FAILED;
    default:
      return FS_ERR_INTERNAL;
  }
}

template <typename Fn>
fs_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const folia::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return FS_ERR_INTERNAL;
  }
}

}  // namespace

struct fs_scenario {
  folia::ScenarioConfig config;
  std::string report;
  bool has_report = false;
};

extern "C" {

fs_status fs_scenario_from_file(const char* path, fs_scenario** out) {
  if (!path || !out) {
    g_last_error = "null argument";
    return FS_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    auto* s = new fs_scenario{folia::load_config_file(path)};
    *out = s;
    return FS_OK;
  });
}

fs_status fs_scenario_from_text(const char* text, fs_scenario** out) {
  if (!text || !out) {
    g_last_error = "null argument";
    return FS_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    auto* s = new fs_scenario{folia::parse_config_text(text)};
    *out = s;
    return FS_OK;
  });
}

fs_status fs_scenario_builtin(const char* name, fs_scenario** out) {
  if (!name || !out) {
    g_last_error = "null argument";
    return FS_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    auto* s = new fs_scenario{folia::builtin_scenario(name)};
    *out = s;
    return FS_OK;
  });
}

void fs_scenario_free(fs_scenario* scenario) { delete scenario; }

fs_status fs_scenario_set_seed(fs_scenario* scenario, uint64_t seed) {
  if (!scenario) {
    g_last_error = "null scenario";
    return FS_ERR_INVALID_ARGUMENT;
  }
  scenario->config.seed = seed;
  return FS_OK;
}

fs_status fs_scenario_set_output_dir(fs_scenario* scenario, const char* dir) {
  if (!scenario || !dir) {
    g_last_error = "null argument";
    return FS_ERR_INVALID_ARGUMENT;
  }
  scenario->config.out_dir = dir;
  return FS_OK;
}

fs_status fs_scenario_run(fs_scenario* scenario, const char* pipeline) {
  if (!scenario || !pipeline) {
    g_last_error = "null argument";
    return FS_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    folia::RunResult r = folia::run_scenario(scenario->config, pipeline);
    scenario->report = r.report_json;
    scenario->has_report = true;
    if (!r.all_passed) {
      g_last_error = "a verification step failed; see the report";
      return FS_ERR_VERIFICATION_FAILED;
    }
    return FS_OK;
  });
}

const char* fs_scenario_report(const fs_scenario* scenario) {
  if (!scenario || !scenario->has_report) return nullptr;
  return scenario->report.c_str();
}

const char* fs_last_error(void) { return g_last_error.c_str(); }

const char* fs_list_builtin_scenarios(void) {
  static const std::string listing = [] {
    std::string s;
    for (const auto& [name, desc] : folia::list_scenarios())
      s += name + ": " + desc + "\n";
    return s;
  }();
  return listing.c_str();
}

const char* fs_version(void) { return "0.1.0"; }

fs_status fs_torus_distance(const double* a, const double* b, int dim,
                            double* out) {
  if (!a || !b || !out || dim < 1 || dim > 3) {
    g_last_error = "bad arguments";
    return FS_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    folia::Vec va(a, a + dim), vb(b, b + dim);
    *out = folia::torus_dist(folia::wrap(va), folia::wrap(vb));
    return FS_OK;
  });
}

}  // extern "C"
