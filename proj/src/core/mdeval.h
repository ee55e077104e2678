// Compiles a validated blocking-MD into an executable join plan and
// enumerates the record pairs its body matches against an instance,
// a similarity cache, and the evolving block assignment.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "core/instance.h"
#include "core/mdlang.h"
#include "core/similarity.h"

namespace erblox::md {

// Current block number of a record; consulted by block-equality conditions.
using BlockFn = std::function<int64_t(const std::string& relation, int64_t rid)>;

enum class DriverKind { SimCache, HashJoin, Cross };

// Lazily built per-column value indexes shared across plans and chase rounds.
// Indexes never cover block numbers, so they stay valid while blocks change.
class EvalContext {
public:
  explicit EvalContext(const Instance& instance) : instance_(instance) {}

  const Instance& instance() const { return instance_; }

  // value -> rows holding it; null values are never indexed (nulls never join).
  const std::map<Value, std::vector<const Record*>, ValueLess>& index(
      const std::string& relation, size_t col);

  const std::vector<const Record*>& all_rows(const std::string& relation);

private:
  const Instance& instance_;
  std::map<std::pair<std::string, size_t>,
           std::map<Value, std::vector<const Record*>, ValueLess>>
      indexes_;
  std::map<std::string, std::vector<const Record*>> rows_;
};

struct PlanSim {
  int lrec, rrec;        // record slots
  size_t lattr, rattr;   // attribute indexes on each record's relation
  std::string spec;
};

struct PlanEq {
  int lrec, rrec;
  size_t lattr, rattr;
};

// Ties a hidden column-value slot to a record attribute bound elsewhere.
struct PlanValAttrEq {
  int value_slot;
  int rec_slot;
  size_t attr_idx;
};

struct PlanBlockEq {
  int lslot, rslot;  // record slots
  std::string relation;
};

using PlanCheck = std::variant<PlanSim, PlanEq, PlanValAttrEq, PlanBlockEq>;

struct PlanAtom {
  const RelationDecl* decl = nullptr;
  std::string relation;
  struct Op {
    enum class Kind { Constrained, AttrConstrained, Fresh };
    Kind kind = Kind::Fresh;
    size_t col = 0;
    int slot = -1;        // Constrained/Fresh: value slot; AttrConstrained: record slot
    size_t attr_idx = 0;  // AttrConstrained only
    bool bind_record = false;   // key position of the variable's own relation
    bool bound_before = false;  // slot bound before this atom: usable as index key
  };
  std::vector<Op> ops;  // in term order; within-row evaluation is sequential
};

struct CompiledMD {
  const BlockingMD* md = nullptr;
  const RelationDecl* head_decl = nullptr;
  DriverKind driver = DriverKind::Cross;
  std::string driver_spec;  // SimCache: spec whose cached pairs seed head pairs
  size_t driver_attr = 0;   // SimCache: head attribute index
  size_t driver_attr1 = 0;  // HashJoin: attribute on head record 1
  size_t driver_attr2 = 0;  //           attribute on head record 2
  int nslots = 0;
  int slot_hv1 = 0, slot_hv2 = 0;
  std::vector<PlanAtom> atoms;
  // checks_at[k] runs once the head pair plus atoms[0..k-1] are bound.
  std::vector<std::vector<PlanCheck>> checks_at;
};

// Requires a validated MD (record variables resolved).
CompiledMD compile_md(const BlockingMD& md, const Schema& schema);

// All unordered head-record pairs (canonical rid order) whose body holds.
// Distinctness of the two head records is implicit.
std::set<std::pair<int64_t, int64_t>> evaluate_md(const CompiledMD& plan, EvalContext& ctx,
                                                  const SimCache& cache,
                                                  const BlockFn& block_of);

}  // namespace erblox::md
