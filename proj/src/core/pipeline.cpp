// Engine: stage execution and artifact writing.
#include "core/pipeline.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include "core/csv.h"
#include "core/error.h"

namespace erblox {

namespace {

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string records_to_csv(const std::vector<Record>& rows) {
  std::string out;
  for (const Record& r : rows) {
    std::vector<std::string> fields;
    fields.reserve(r.values.size());
    for (const Value& v : r.values) fields.push_back(value_to_string(v));
    out += write_csv_row(fields);
  }
  return out;
}

}  // namespace

void Engine::reset() {
  schema_.reset();
  base_.reset();
  report_.reset();
  cache_.reset();
  mdset_.reset();
  blocked_.clear();
  chase_.clear();
  candidates_.clear();
  trained_.clear();
  models_.clear();
  classified_ = false;
  duplicates_.clear();
  skipped_.clear();
  resolved_.reset();
}

void Engine::load_config(const std::string& path) {
  cfg_ = load_pipeline_config(path);
  config_loaded_ = true;
  reset();
}

void Engine::ensure_config() const {
  if (!config_loaded_) fail(ErrorCode::State, "no config loaded");
}

void Engine::set_seed(uint64_t seed) {
  ensure_config();
  cfg_.seed = seed;
  reset();
}

void Engine::set_out_dir(const std::string& dir) {
  if (dir.empty()) fail(ErrorCode::Arg, "empty output directory");
  out_dir_ = dir;
  reset();
}

void Engine::set_blocking_mode(const std::string& mode) {
  ensure_config();
  cfg_.blocking = parse_blocking_mode(mode);
  reset();
}

const Instance* Engine::blocked_instance(const std::string& mode) const {
  auto it = blocked_.find(mode);
  return it == blocked_.end() ? nullptr : &it->second;
}

const SvmModel* Engine::model(const std::string& relation) const {
  auto it = models_.find(relation);
  return it == models_.end() ? nullptr : &it->second;
}

void Engine::ensure_ingested() {
  ensure_config();
  if (base_) return;
  if (cfg_.schema_path.empty()) fail(ErrorCode::Validation, "config names no schema file");
  schema_ = load_schema(read_file(cfg_.schema_path));
  Instance inst;
  for (const auto& [relation, path] : cfg_.data) {
    RelationInstance ri = ingest_csv(read_file(path), relation, *schema_);
    inst.relations.emplace(relation, std::move(ri));
  }
  report_ = validate_instance(inst, *schema_);
  base_ = std::move(inst);
}

void Engine::ensure_simcache() {
  ensure_ingested();
  if (cache_) return;
  cache_ = build_sim_cache(*base_, cfg_.sims, cfg_.simcache_filter);
}

const md::MDSet& Engine::ensure_mds() {
  ensure_ingested();
  if (!mdset_) {
    md::MDSet set;
    if (!cfg_.mds_path.empty()) set = md::parse_mds(read_file(cfg_.mds_path));
    md::validate_mds(set, *schema_, cfg_.sims);
    validate_merge_rules(set, *schema_);
    mdset_ = std::move(set);
  }
  return *mdset_;
}

void Engine::ensure_blocked(const std::string& mode) {
  ensure_simcache();
  if (blocked_.count(mode)) return;
  Instance inst = *base_;  // fresh copy: blocks start at rids
  if (mode == "md") {
    chase_[mode] = enforce_blocking(inst, ensure_mds(), *schema_, *cache_);
  } else {
    md::MDSet std_mds = synthesize_standard_mds(*schema_, cfg_.sims, cfg_.standard_keys);
    chase_[mode] = enforce_blocking(inst, std_mds, *schema_, *cache_);
  }
  candidates_[mode] = candidate_pairs(inst);
  blocked_.emplace(mode, std::move(inst));
}

std::vector<std::string> Engine::active_modes() const {
  switch (cfg_.blocking) {
    case BlockingMode::Standard: return {"standard"};
    case BlockingMode::MD: return {"md"};
    case BlockingMode::Both: return {"standard", "md"};
  }
  return {};
}

std::string Engine::classify_mode() const {
  return cfg_.blocking == BlockingMode::Standard ? "standard" : "md";
}

std::vector<std::string> Engine::feature_relations() const {
  std::vector<std::string> rels;
  for (const FeatureSlot& slot : cfg_.features)
    if (std::find(rels.begin(), rels.end(), slot.relation) == rels.end())
      rels.push_back(slot.relation);
  std::sort(rels.begin(), rels.end());
  return rels;
}

FeatureExtractor Engine::extractor_for(const std::string& relation) {
  ensure_ingested();
  std::vector<FeatureSlot> slots;
  for (const FeatureSlot& slot : cfg_.features)
    if (slot.relation == relation) slots.push_back(slot);
  if (slots.empty()) fail(ErrorCode::Validation, "no feature slots for relation " + relation);
  return FeatureExtractor(*schema_, *base_, std::move(slots), relation);
}

Engine::TrainInfo Engine::do_train(const std::string& relation) {
  ensure_ingested();
  auto it = cfg_.training.find(relation);
  if (it == cfg_.training.end())
    fail(ErrorCode::Validation, "no training data configured for " + relation);
  const RelationInstance& rel = base_->require(relation);
  auto labeled = load_labeled_pairs(read_file(it->second), rel);
  if (labeled.empty()) fail(ErrorCode::Validation, "training file for " + relation + " is empty");

  FeatureExtractor ex = extractor_for(relation);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  size_t dropped = 0;
  for (const auto& [r1, r2, label] : labeled) {
    auto vec = ex.vector_for(r1, r2);
    if (!vec) {
      ++dropped;
      continue;
    }
    x.push_back(std::move(*vec));
    y.push_back(label);
  }
  if (x.empty())
    fail(ErrorCode::Validation, "every training pair of " + relation + " was skipped");

  // Deterministic shuffle, then a fraction-`split` prefix trains the model.
  std::vector<size_t> order(x.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(cfg_.seed);
  for (size_t i = order.size() - 1; i > 0; --i) {
    size_t j = (size_t)(rng() % (uint64_t)(i + 1));
    std::swap(order[i], order[j]);
  }
  size_t n_train = (size_t)(cfg_.split * (double)x.size() + 1e-9);
  std::vector<std::vector<double>> train_x, eval_x;
  std::vector<int> train_y, eval_y;
  for (size_t k = 0; k < order.size(); ++k) {
    if (k < n_train) {
      train_x.push_back(x[order[k]]);
      train_y.push_back(y[order[k]]);
    } else {
      eval_x.push_back(x[order[k]]);
      eval_y.push_back(y[order[k]]);
    }
  }

  TrainResult tr = train_svm(train_x, train_y, cfg_.lambda, cfg_.epochs, cfg_.seed);

  std::ostringstream rep;
  rep << "degenerate=" << (tr.degenerate ? 1 : 0) << '\n';
  rep << "dropped_pairs=" << dropped << '\n';
  rep << "epochs_run=" << tr.epochs_run << '\n';
  rep << "eval_accuracy="
      << (eval_x.empty() ? "undefined" : fmt6(svm_accuracy(tr.model, eval_x, eval_y))) << '\n';
  rep << "eval_count=" << eval_x.size() << '\n';
  rep << "final_objective=" << fmt6(tr.losses.back()) << '\n';
  rep << "initial_objective=" << fmt6(tr.losses.front()) << '\n';
  rep << "labeled_pairs=" << labeled.size() << '\n';
  rep << "lambda=" << fmt6(cfg_.lambda) << '\n';
  rep << "seed=" << cfg_.seed << '\n';
  rep << "split=" << fmt6(cfg_.split) << '\n';
  rep << "train_accuracy=" << fmt6(svm_accuracy(tr.model, train_x, train_y)) << '\n';
  rep << "train_count=" << train_x.size() << '\n';
  return TrainInfo{std::move(tr.model), rep.str()};
}

const SvmModel& Engine::ensure_model(const std::string& relation) {
  auto it = models_.find(relation);
  if (it != models_.end()) return it->second;
  std::string path = out_dir_ + "/model_" + relation + ".txt";
  if (std::filesystem::exists(path)) {
    models_[relation] = load_model(read_file(path));
    return models_[relation];
  }
  if (cfg_.training.count(relation)) {
    TrainInfo info = do_train(relation);
    models_[relation] = info.model;
    trained_[relation] = std::move(info);
    return models_[relation];
  }
  fail(ErrorCode::Validation,
       "no model file and no training data for " + relation + " (looked for " + path + ")");
}

void Engine::ensure_classified() {
  if (classified_) return;
  std::string mode = classify_mode();
  ensure_blocked(mode);
  for (const std::string& relation : feature_relations()) {
    const SvmModel& m = ensure_model(relation);
    FeatureExtractor ex = extractor_for(relation);
    auto cand = candidates_[mode].find(relation);
    if (cand == candidates_[mode].end()) continue;
    for (const auto& [r1, r2] : cand->second) {
      std::string why;
      auto vec = ex.vector_for(r1, r2, &why);
      if (!vec) {
        skipped_.push_back(relation + '\t' + std::to_string(r1) + '\t' + std::to_string(r2) +
                           '\t' + why);
        continue;
      }
      if (svm_predict(m, *vec) == 1) duplicates_[relation].emplace_back(r1, r2);
    }
  }
  classified_ = true;
}

void Engine::ensure_merged() {
  if (resolved_) return;
  ensure_classified();
  resolved_ = merge_duplicates(*base_, duplicates_, ensure_mds(), *schema_);
}

std::string Engine::render_evaluation() {
  std::map<std::string, PairSet> gold;
  for (const auto& [relation, path] : cfg_.gold)
    gold[relation] = load_pair_set(read_file(path), base_->require(relation));
  std::string text;
  for (const std::string& mode : active_modes()) {
    ensure_blocked(mode);
    text += render_metrics(mode, compute_metrics(*base_, candidates_[mode], gold));
  }
  return text;
}

std::string Engine::write_artifact(const std::string& name, const std::string& content) {
  std::filesystem::create_directories(out_dir_);
  std::string path = out_dir_ + "/" + name;
  write_file(path, content);
  return path;
}

std::vector<std::string> Engine::stage_ingest() {
  ensure_ingested();
  std::ostringstream rep;
  for (const auto& [name, rel] : base_->relations)
    rep << "rows." << name << "=" << rel.rows.size() << '\n';
  for (const auto& [key, density] : report_->null_density)
    rep << "null_density." << key.first << "." << key.second << "=" << fmt6(density) << '\n';
  rep << "dangling_count=" << report_->dangling.size() << '\n';
  for (size_t i = 0; i < report_->dangling.size(); ++i) {
    const DanglingRef& d = report_->dangling[i];
    rep << "dangling." << i << "=" << d.from_relation << "." << d.from_attr << " rid=" << d.rid
        << " value=" << value_to_string(d.value) << " -> " << d.to_relation << "." << d.to_attr
        << '\n';
  }
  return {write_artifact("validation_report.txt", rep.str())};
}

std::vector<std::string> Engine::stage_simcache() {
  ensure_simcache();
  std::ostringstream rep;
  for (const auto& [name, sc] : cache_->by_spec)
    rep << "pairs." << name << "=" << sc.pairs.size() << '\n';
  rep << "tokenless_values=" << cache_->tokenless_values << '\n';
  return {write_artifact("simcache.tsv", dump_sim_cache(*cache_)),
          write_artifact("simcache_report.txt", rep.str())};
}

std::vector<std::string> Engine::stage_block() {
  std::vector<std::string> artifacts;
  for (const std::string& mode : active_modes()) {
    ensure_blocked(mode);
    artifacts.push_back(write_artifact("blocks_" + mode + ".tsv", dump_blocks(blocked_.at(mode))));
    artifacts.push_back(
        write_artifact("lineage_" + mode + ".tsv", dump_lineage(chase_.at(mode).lineage)));
    std::ostringstream cand;
    for (const auto& [name, pairs] : candidates_.at(mode))
      for (const auto& [r1, r2] : pairs) cand << name << '\t' << r1 << '\t' << r2 << '\n';
    artifacts.push_back(write_artifact("candidates_" + mode + ".tsv", cand.str()));
  }
  return artifacts;
}

std::vector<std::string> Engine::stage_train() {
  ensure_config();
  if (cfg_.training.empty()) fail(ErrorCode::Validation, "config names no training data");
  std::vector<std::string> artifacts;
  for (const auto& [relation, path] : cfg_.training) {
    (void)path;
    TrainInfo info = do_train(relation);
    models_[relation] = info.model;
    artifacts.push_back(write_artifact("model_" + relation + ".txt", save_model(info.model)));
    artifacts.push_back(write_artifact("training_report_" + relation + ".txt", info.report));
    trained_[relation] = std::move(info);
  }
  // New models invalidate anything classified or merged with the old ones.
  classified_ = false;
  duplicates_.clear();
  skipped_.clear();
  resolved_.reset();
  return artifacts;
}

std::vector<std::string> Engine::stage_classify() {
  ensure_classified();
  std::ostringstream dup;
  for (const auto& [name, pairs] : duplicates_)
    for (const auto& [r1, r2] : pairs) dup << name << '\t' << r1 << '\t' << r2 << '\n';
  std::ostringstream skip;
  for (const std::string& line : skipped_) skip << line << '\n';
  return {write_artifact("duplicates.tsv", dup.str()),
          write_artifact("skipped_pairs.tsv", skip.str())};
}

std::vector<std::string> Engine::stage_merge() {
  ensure_merged();
  std::vector<std::string> artifacts;
  for (const auto& [name, rel] : resolved_->relations) {
    artifacts.push_back(write_artifact("resolved_" + name + ".csv", records_to_csv(rel.canonical)));
    artifacts.push_back(
        write_artifact("resolved_full_" + name + ".csv", records_to_csv(rel.full)));
  }
  artifacts.push_back(write_artifact("survivors.tsv", dump_survivors(*resolved_)));
  return artifacts;
}

std::vector<std::string> Engine::stage_evaluate() {
  ensure_ingested();
  return {write_artifact("metrics.txt", render_evaluation())};
}

std::vector<std::string> Engine::run_stage(const std::string& stage) {
  ensure_config();
  if (stage == "ingest") return stage_ingest();
  if (stage == "simcache") return stage_simcache();
  if (stage == "block") return stage_block();
  if (stage == "train") return stage_train();
  if (stage == "classify") return stage_classify();
  if (stage == "merge") return stage_merge();
  if (stage == "evaluate") return stage_evaluate();
  if (stage == "pipeline") {
    std::vector<std::string> artifacts;
    auto add = [&](std::vector<std::string> v) {
      artifacts.insert(artifacts.end(), v.begin(), v.end());
    };
    add(stage_ingest());
    add(stage_simcache());
    add(stage_block());
    if (!cfg_.training.empty()) add(stage_train());
    add(stage_classify());
    add(stage_merge());
    add(stage_evaluate());
    return artifacts;
  }
  fail(ErrorCode::Arg, "unknown stage: " + stage);
}

}  // namespace erblox
