// Command-line driver for the entity-resolution engine; C API client only.
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "erblox/erblox.h"

namespace {

struct Options {
  std::string config;
  std::string out_dir;
  std::string blocking;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

struct EngineCloser {
  void operator()(erblox_engine* engine) const { erblox_engine_close(engine); }
};

int run_stage(const std::string& stage, const Options& opt) {
  std::unique_ptr<erblox_engine, EngineCloser> engine(erblox_engine_open());
  if (!engine) {
    std::fprintf(stderr, "error [%s]: engine allocation failed\n",
                 stage.c_str());
    return 1;
  }
  auto fail = [&](erblox_status status) {
    std::fprintf(stderr, "error [%s]: %s\n", stage.c_str(),
                 erblox_last_error(engine.get()));
    return static_cast<int>(status);
  };

  erblox_status status = erblox_load_config(engine.get(), opt.config.c_str());
  if (status != ERBLOX_OK) return fail(status);
  if (opt.seed_set) {
    status = erblox_set_seed(engine.get(), opt.seed);
    if (status != ERBLOX_OK) return fail(status);
  }
  if (!opt.out_dir.empty()) {
    status = erblox_set_out_dir(engine.get(), opt.out_dir.c_str());
    if (status != ERBLOX_OK) return fail(status);
  }
  if (!opt.blocking.empty()) {
    status = erblox_set_blocking_mode(engine.get(), opt.blocking.c_str());
    if (status != ERBLOX_OK) return fail(status);
  }
  status = erblox_run_stage(engine.get(), stage.c_str());
  if (status != ERBLOX_OK) return fail(status);

  const char* artifacts = erblox_last_artifacts(engine.get());
  if (artifacts && artifacts[0] != '\0') std::printf("%s\n", artifacts);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Entity resolution: rule-driven collective blocking, linear-SVM pair "
      "classification, and matching-function merge."};
  app.set_version_flag("--version", erblox_version());
  app.require_subcommand(1);

  struct StageSpec {
    const char* name;
    const char* help;
  };
  static const StageSpec kStages[] = {
      {"ingest", "Load schema and CSV data; write the validation report"},
      {"simcache", "Compute above-threshold similarity pairs"},
      {"block", "Run blocking rules to fixpoint; write blocks, lineage, and "
                "candidate pairs"},
      {"train", "Train the pair classifier; write model and training report"},
      {"classify", "Label candidate pairs; write duplicates and skipped pairs"},
      {"merge", "Fuse classified duplicates; write resolved relations and the "
                "survivor map"},
      {"evaluate", "Score candidate pairs against gold pairs; write metrics"},
      {"pipeline", "Run every stage in order"},
  };

  Options opt;
  std::string chosen;
  for (const StageSpec& stage : kStages) {
    CLI::App* sub = app.add_subcommand(stage.name, stage.help);
    sub->add_option("--config", opt.config, "Pipeline config file")
        ->required();
    sub->add_option("--seed", opt.seed,
                    "Override the config's RNG seed (training shuffle/split)");
    sub->add_option("--out-dir", opt.out_dir,
                    "Directory for artifacts (default \".\")");
    sub->add_option("--blocking", opt.blocking,
                    "Blocking mode, overrides the config")
        ->check(CLI::IsMember({"standard", "md", "both"}));
    std::string name = stage.name;
    sub->callback([&opt, &chosen, sub, name]() {
      chosen = name;
      opt.seed_set = sub->count("--seed") > 0;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  return run_stage(chosen, opt);
}
