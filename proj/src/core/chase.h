// Blocking chase: applies blocking-MDs to a fixpoint, merging block numbers
// with max and recording the merge lineage; derives candidate pairs.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "core/instance.h"
#include "core/mdlang.h"
#include "core/similarity.h"

namespace erblox {

// One effective block merge. old1/old2 are the blocks of rid1/rid2 just
// before the step; merged = max(old1, old2) replaces both.
struct LineageEntry {
  int64_t step = 0;
  int md_id = 0;         // 1-based position of the MD in its rule set
  std::string relation;  // head relation (not part of the dump format)
  int64_t rid1 = 0, rid2 = 0;
  int64_t old1 = 0, old2 = 0;
  int64_t merged = 0;
};

struct ChaseResult {
  std::vector<LineageEntry> lineage;
  int rounds = 0;  // full passes over the MD list, including the quiet one
};

// Matching function for block numbers: the larger of the two. Both must be
// positive (block numbers start as record ids, which are positive).
int64_t match_bl(int64_t a, int64_t b);

// Runs the chase to fixpoint, mutating record block numbers in place.
// Per round, MDs fire in file order and their pairs in ascending rid order;
// block updates are visible immediately. Requires a validated MD set.
ChaseResult enforce_blocking(Instance& instance, const md::MDSet& mds, const Schema& schema,
                             const SimCache& cache);

// Synthesizes one MD per listed relation whose body is the conjunction of the
// given similarity specs over that relation's own attributes (the standard,
// relation-at-a-time blocking baseline). Returned set is validated.
md::MDSet synthesize_standard_mds(const Schema& schema, const std::vector<SimSpec>& specs,
                                  const std::map<std::string, std::vector<std::string>>& keys);

// Unordered within-block pairs per relation, ascending.
std::map<std::string, std::vector<std::pair<int64_t, int64_t>>> candidate_pairs(
    const Instance& instance);

// TSV "relation<TAB>rid<TAB>block", relations alphabetical, rids ascending.
std::string dump_blocks(const Instance& instance);

// TSV "step<TAB>md_id<TAB>rid1<TAB>rid2<TAB>old1<TAB>old2<TAB>new".
std::string dump_lineage(const std::vector<LineageEntry>& lineage);

}  // namespace erblox
