// C API shim: maps erblox::Engine onto opaque handles and status codes.
#include "erblox/erblox.h"

#include <exception>
#include <new>
#include <string>
#include <vector>

#include "core/error.h"
#include "core/pipeline.h"

struct erblox_engine {
  erblox::Engine impl;
  std::string last_error;
  std::string artifacts;
};

namespace {

erblox_status status_of(erblox::ErrorCode code) {
  switch (code) {
    case erblox::ErrorCode::Arg: return ERBLOX_ERR_ARG;
    case erblox::ErrorCode::Io: return ERBLOX_ERR_IO;
    case erblox::ErrorCode::Parse: return ERBLOX_ERR_PARSE;
    case erblox::ErrorCode::Validation: return ERBLOX_ERR_VALIDATION;
    case erblox::ErrorCode::State: return ERBLOX_ERR_STATE;
  }
  return ERBLOX_ERR_STATE;
}

// Runs fn under the engine's error capture; fn returns a status itself so
// wrappers can reject bad arguments before touching the implementation.
template <typename Fn>
erblox_status guarded(erblox_engine* engine, Fn&& fn) {
  if (!engine) return ERBLOX_ERR_ARG;
  engine->last_error.clear();
  try {
    return fn();
  } catch (const erblox::Error& e) {
    engine->last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    engine->last_error = e.what();
    return ERBLOX_ERR_STATE;
  } catch (...) {
    engine->last_error = "unknown error";
    return ERBLOX_ERR_STATE;
  }
}

erblox_status require_cstr(erblox_engine* engine, const char* value,
                           const char* what) {
  if (value) return ERBLOX_OK;
  engine->last_error = std::string(what) + " must not be null";
  return ERBLOX_ERR_ARG;
}

}  // namespace

extern "C" {

const char* erblox_version(void) { return "1.0.0"; }

erblox_engine* erblox_engine_open(void) {
  return new (std::nothrow) erblox_engine();
}

void erblox_engine_close(erblox_engine* engine) { delete engine; }

const char* erblox_last_error(const erblox_engine* engine) {
  return engine ? engine->last_error.c_str() : "";
}

erblox_status erblox_load_config(erblox_engine* engine, const char* path) {
  return guarded(engine, [&]() {
    erblox_status bad = require_cstr(engine, path, "path");
    if (bad != ERBLOX_OK) return bad;
    engine->impl.load_config(path);
    return ERBLOX_OK;
  });
}

erblox_status erblox_set_seed(erblox_engine* engine, uint64_t seed) {
  return guarded(engine, [&]() {
    engine->impl.set_seed(seed);
    return ERBLOX_OK;
  });
}

erblox_status erblox_set_out_dir(erblox_engine* engine, const char* dir) {
  return guarded(engine, [&]() {
    erblox_status bad = require_cstr(engine, dir, "dir");
    if (bad != ERBLOX_OK) return bad;
    engine->impl.set_out_dir(dir);
    return ERBLOX_OK;
  });
}

erblox_status erblox_set_blocking_mode(erblox_engine* engine,
                                       const char* mode) {
  return guarded(engine, [&]() {
    erblox_status bad = require_cstr(engine, mode, "mode");
    if (bad != ERBLOX_OK) return bad;
    engine->impl.set_blocking_mode(mode);
    return ERBLOX_OK;
  });
}

erblox_status erblox_run_stage(erblox_engine* engine, const char* stage) {
  return guarded(engine, [&]() {
    erblox_status bad = require_cstr(engine, stage, "stage");
    if (bad != ERBLOX_OK) return bad;
    std::vector<std::string> paths = engine->impl.run_stage(stage);
    std::string joined;
    for (const std::string& p : paths) {
      if (!joined.empty()) joined += '\n';
      joined += p;
    }
    engine->artifacts = joined;
    return ERBLOX_OK;
  });
}

const char* erblox_last_artifacts(const erblox_engine* engine) {
  return engine ? engine->artifacts.c_str() : "";
}

}  // extern "C"
