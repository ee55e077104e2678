// Pipeline configuration: one text file naming the schema, data files,
// rules, similarity specs, feature slots, training/gold data, and knobs.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/features.h"
#include "core/similarity.h"

namespace erblox {

enum class BlockingMode { Standard, MD, Both };

BlockingMode parse_blocking_mode(const std::string& name);
std::string blocking_mode_name(BlockingMode mode);

// Directives, one per line ('#' lines are comments, paths resolve relative
// to the config file):
//   schema <path>
//   data <Relation> <csv-path>
//   mds <path>
//   sim <name> <Relation>.<Attr> <kernel> <threshold>
//   feature <Relation> <path> [else <path>] using <kernel> policy <policy>
//     where <path> is Rel.Attr or Rel.Attr -> Other.Attr
//   training <Relation> <tsv-path>
//   gold <Relation> <tsv-path>
//   standard-key <Relation> <sim-name>...
//   lambda <real>        (default 0.01)
//   epochs <int>         (default 200)
//   split <real>         (default 0.8; training fraction of labeled pairs)
//   seed <int>           (default 1)
//   blocking standard|md|both   (default md)
//   simcache-filter on|off      (default off)
struct PipelineConfig {
  std::string schema_path;
  std::vector<std::pair<std::string, std::string>> data;  // (relation, path), file order
  std::string mds_path;
  std::vector<SimSpec> sims;
  std::vector<FeatureSlot> features;
  std::map<std::string, std::string> training;  // relation -> path
  std::map<std::string, std::string> gold;
  std::map<std::string, std::vector<std::string>> standard_keys;
  double lambda = 0.01;
  int epochs = 200;
  double split = 0.8;
  uint64_t seed = 1;
  BlockingMode blocking = BlockingMode::MD;
  bool simcache_filter = false;
};

PipelineConfig load_pipeline_config(const std::string& path);

}  // namespace erblox
