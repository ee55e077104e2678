// Blocking chase over compiled MDs.
#include "core/chase.h"

#include <algorithm>
#include <sstream>

#include "core/error.h"
#include "core/mdeval.h"

namespace erblox {

int64_t match_bl(int64_t a, int64_t b) {
  if (a <= 0 || b <= 0) fail(ErrorCode::Arg, "block numbers must be positive");
  return std::max(a, b);
}

ChaseResult enforce_blocking(Instance& instance, const md::MDSet& mds, const Schema& schema,
                             const SimCache& cache) {
  if (!mds.validated) fail(ErrorCode::State, "md set must be validated before the chase");
  std::vector<md::CompiledMD> plans;
  plans.reserve(mds.mds.size());
  for (const auto& m : mds.mds) plans.push_back(md::compile_md(m, schema));

  md::EvalContext ctx(instance);
  auto block_of = [&instance](const std::string& rel, int64_t rid) -> int64_t {
    return instance.require(rel).require(rid).block;
  };

  ChaseResult res;
  int64_t step = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    ++res.rounds;
    for (size_t i = 0; i < plans.size(); ++i) {
      auto pairs = md::evaluate_md(plans[i], ctx, cache, block_of);
      if (pairs.empty()) continue;
      RelationInstance& head = instance.require_mut(mds.mds[i].head_relation);
      for (const auto& [rid1, rid2] : pairs) {
        int64_t b1 = head.require(rid1).block;
        int64_t b2 = head.require(rid2).block;
        if (b1 == b2) continue;
        int64_t merged = match_bl(b1, b2);
        int64_t gone = std::min(b1, b2);
        res.lineage.push_back({++step, mds.mds[i].id, mds.mds[i].head_relation, rid1, rid2, b1,
                               b2, merged});
        for (Record& r : head.rows)
          if (r.block == gone) r.block = merged;
        changed = true;
      }
    }
  }
  return res;
}

md::MDSet synthesize_standard_mds(const Schema& schema, const std::vector<SimSpec>& specs,
                                  const std::map<std::string, std::vector<std::string>>& keys) {
  md::MDSet set;
  for (const auto& [relation, spec_names] : keys) {
    if (spec_names.empty()) fail(ErrorCode::Arg, "no key specs for relation " + relation);
    md::BlockingMD m;
    m.id = (int)set.mds.size() + 1;
    m.head_relation = relation;
    m.head_relation2 = relation;
    m.head_var1 = "r1";
    m.head_var2 = "r2";
    m.concl_var1 = "r1";
    m.concl_var2 = "r2";
    for (const std::string& name : spec_names) {
      const SimSpec* spec = nullptr;
      for (const SimSpec& s : specs)
        if (s.name == name) spec = &s;
      if (!spec) fail(ErrorCode::Arg, "unknown similarity spec: " + name);
      md::SimAtom atom;
      atom.left = {"r1", spec->attribute};
      atom.right = {"r2", spec->attribute};
      atom.spec = name;
      m.conds.emplace_back(atom);
    }
    set.mds.push_back(std::move(m));
  }
  md::validate_mds(set, schema, specs);
  return set;
}

std::map<std::string, std::vector<std::pair<int64_t, int64_t>>> candidate_pairs(
    const Instance& instance) {
  std::map<std::string, std::vector<std::pair<int64_t, int64_t>>> out;
  for (const auto& [name, rel] : instance.relations) {
    std::map<int64_t, std::vector<int64_t>> by_block;
    for (const Record& r : rel.rows) by_block[r.block].push_back(r.rid);
    auto& pairs = out[name];
    for (auto& [block, rids] : by_block) {
      (void)block;
      std::sort(rids.begin(), rids.end());
      for (size_t i = 0; i < rids.size(); ++i)
        for (size_t j = i + 1; j < rids.size(); ++j) pairs.emplace_back(rids[i], rids[j]);
    }
    std::sort(pairs.begin(), pairs.end());
  }
  return out;
}

std::string dump_blocks(const Instance& instance) {
  std::ostringstream out;
  for (const auto& [name, rel] : instance.relations) {
    std::vector<const Record*> rows;
    rows.reserve(rel.rows.size());
    for (const Record& r : rel.rows) rows.push_back(&r);
    std::sort(rows.begin(), rows.end(),
              [](const Record* a, const Record* b) { return a->rid < b->rid; });
    for (const Record* r : rows) out << name << '\t' << r->rid << '\t' << r->block << '\n';
  }
  return out.str();
}

std::string dump_lineage(const std::vector<LineageEntry>& lineage) {
  std::ostringstream out;
  for (const LineageEntry& e : lineage) {
    out << e.step << '\t' << e.md_id << '\t' << e.rid1 << '\t' << e.rid2 << '\t' << e.old1 << '\t'
        << e.old2 << '\t' << e.merged << '\n';
  }
  return out.str();
}

}  // namespace erblox
