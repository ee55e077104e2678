// Stage orchestration: load a pipeline config, run any stage (recomputing
// upstream results in memory), and write that stage's artifacts.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/chase.h"
#include "core/config.h"
#include "core/features.h"
#include "core/instance.h"
#include "core/mdlang.h"
#include "core/merge.h"
#include "core/metrics.h"
#include "core/schema.h"
#include "core/similarity.h"
#include "core/svm.h"

namespace erblox {

// Stage names: ingest, simcache, block, train, classify, merge, evaluate,
// pipeline (all stages in order). Each stage writes only its own artifacts
// into the output directory; upstream work is redone in memory.
class Engine {
public:
  void load_config(const std::string& path);
  void set_seed(uint64_t seed);
  void set_out_dir(const std::string& dir);
  void set_blocking_mode(const std::string& mode);

  // Returns the artifact paths written. Unknown stage is an error.
  std::vector<std::string> run_stage(const std::string& stage);

  // Read-only views for embedding and tests; valid after the relevant
  // stage has run in this engine.
  const Instance* blocked_instance(const std::string& mode) const;
  const SvmModel* model(const std::string& relation) const;

private:
  struct TrainInfo {
    SvmModel model;
    std::string report;
  };

  void reset();
  void ensure_config() const;
  void ensure_ingested();
  void ensure_simcache();
  const md::MDSet& ensure_mds();
  void ensure_blocked(const std::string& mode);
  std::vector<std::string> active_modes() const;
  std::string classify_mode() const;
  FeatureExtractor extractor_for(const std::string& relation);
  std::vector<std::string> feature_relations() const;
  TrainInfo do_train(const std::string& relation);
  const SvmModel& ensure_model(const std::string& relation);
  void ensure_classified();
  void ensure_merged();
  std::string render_evaluation();
  std::string write_artifact(const std::string& name, const std::string& content);

  // Stage runners; each returns the artifacts it wrote.
  std::vector<std::string> stage_ingest();
  std::vector<std::string> stage_simcache();
  std::vector<std::string> stage_block();
  std::vector<std::string> stage_train();
  std::vector<std::string> stage_classify();
  std::vector<std::string> stage_merge();
  std::vector<std::string> stage_evaluate();

  bool config_loaded_ = false;
  PipelineConfig cfg_;
  std::string out_dir_ = ".";

  std::optional<Schema> schema_;
  std::optional<Instance> base_;
  std::optional<ValidationReport> report_;
  std::optional<SimCache> cache_;
  std::optional<md::MDSet> mdset_;
  std::map<std::string, Instance> blocked_;  // keyed "standard" / "md"
  std::map<std::string, ChaseResult> chase_;
  std::map<std::string, std::map<std::string, std::vector<std::pair<int64_t, int64_t>>>>
      candidates_;
  std::map<std::string, TrainInfo> trained_;
  std::map<std::string, SvmModel> models_;
  bool classified_ = false;
  std::map<std::string, std::vector<std::pair<int64_t, int64_t>>> duplicates_;
  std::vector<std::string> skipped_;  // preformatted TSV lines
  std::optional<ResolvedInstance> resolved_;
};

}  // namespace erblox
