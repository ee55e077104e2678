// Duplicate fusion: matching functions combine attribute values across each
// connected component of the duplicate set, yielding the resolved instance.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "core/instance.h"
#include "core/mdlang.h"
#include "core/schema.h"

namespace erblox {

// All shipped matching functions are idempotent, commutative, and
// associative; null is the bottom element of each induced order.
// Union is ACI on its canonical form (sorted ", "-joined distinct elements).
enum class MatchFn { Longest, Max, Union, PreferNonNull };

MatchFn parse_mf(const std::string& name);
std::string mf_name(MatchFn mf);

// Sorted ", "-join of the distinct trimmed non-empty elements of a
// comma-separated list; the canonical domain of the union function.
std::string canonical_set(const std::string& list);

Value apply_mf(MatchFn mf, const Value& a, const Value& b);

// a precedes b in the induced order iff combining them yields b.
bool precedes(MatchFn mf, const Value& a, const Value& b);

// Merge-rule semantics beyond the language checks: known function names,
// and no union/longest over numeric attributes (their results are strings).
void validate_merge_rules(const md::MDSet& set, const Schema& schema);

struct ResolvedRelation {
  std::vector<Record> full;       // every rid (ascending), component-merged values
  std::vector<Record> canonical;  // minimum rid per component, ascending
};

struct ResolvedInstance {
  std::map<std::string, ResolvedRelation> relations;
  // rid -> minimum rid of its component, for every rid (singletons included).
  std::map<std::string, std::map<int64_t, int64_t>> survivor;
};

// Folds each duplicate component's values per attribute (ascending rid
// order; order irrelevant by ACI). Unlisted non-key attributes default to
// prefer-non-null. The duplicate set is taken as fixed: components come
// from its transitive closure. Unknown rids are an error.
ResolvedInstance merge_duplicates(
    const Instance& instance,
    const std::map<std::string, std::vector<std::pair<int64_t, int64_t>>>& dups,
    const md::MDSet& rules, const Schema& schema);

// TSV "relation<TAB>rid<TAB>surviving_rid", every rid, ascending.
std::string dump_survivors(const ResolvedInstance& resolved);

}  // namespace erblox
