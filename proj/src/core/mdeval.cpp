// Join-plan compilation and evaluation for blocking-MDs.
#include "core/mdeval.h"

#include <algorithm>

#include "core/error.h"

namespace erblox::md {

const std::map<Value, std::vector<const Record*>, ValueLess>& EvalContext::index(
    const std::string& relation, size_t col) {
  auto key = std::make_pair(relation, col);
  auto it = indexes_.find(key);
  if (it != indexes_.end()) return it->second;
  auto& idx = indexes_[key];
  for (const Record& r : instance_.require(relation).rows) {
    const Value& v = r.values[col];
    if (is_null(v)) continue;
    idx[v].push_back(&r);
  }
  return idx;
}

const std::vector<const Record*>& EvalContext::all_rows(const std::string& relation) {
  auto it = rows_.find(relation);
  if (it != rows_.end()) return it->second;
  auto& rows = rows_[relation];
  for (const Record& r : instance_.require(relation).rows) rows.push_back(&r);
  return rows;
}

namespace {

// Bound-ness of each slot: value known / record row known.
struct BoundState {
  std::vector<char> val;
  std::vector<char> rec;
};

}  // namespace

CompiledMD compile_md(const BlockingMD& md, const Schema& schema) {
  if (md.record_vars.empty()) fail(ErrorCode::State, "md must be validated before compilation");
  CompiledMD plan;
  plan.md = &md;
  plan.head_decl = &schema.require(md.head_relation);

  // Slot assignment: every variable, plus one hidden slot per attribute term
  // inside a relation atom (used when the owning record is not yet bound).
  std::map<std::string, int> slot_id;
  int nslots = 0;
  auto slot = [&](const std::string& var) {
    auto it = slot_id.find(var);
    if (it != slot_id.end()) return it->second;
    slot_id.emplace(var, nslots);
    return nslots++;
  };
  plan.slot_hv1 = slot(md.head_var1);
  plan.slot_hv2 = slot(md.head_var2);

  std::map<std::pair<size_t, size_t>, int> hidden;  // (cond idx, term idx) -> slot
  for (size_t i = 0; i < md.conds.size(); ++i) {
    if (const auto* s = std::get_if<SimAtom>(&md.conds[i])) {
      slot(s->left.var);
      slot(s->right.var);
    } else if (const auto* e = std::get_if<EqAtom>(&md.conds[i])) {
      slot(e->left.var);
      slot(e->right.var);
    } else if (const auto* b = std::get_if<BlockEq>(&md.conds[i])) {
      slot(b->left);
      slot(b->right);
    } else if (const auto* r = std::get_if<RelAtom>(&md.conds[i])) {
      for (size_t t = 0; t < r->terms.size(); ++t) {
        const Term& term = r->terms[t];
        if (term.kind == Term::Kind::Wildcard) continue;
        slot(term.var);
        if (term.kind == Term::Kind::Attr) hidden[{i, t}] = nslots++;
      }
    }
  }
  plan.nslots = nslots;

  auto rel_of_record = [&](const std::string& var) -> const std::string& {
    auto it = md.record_vars.find(var);
    if (it == md.record_vars.end()) fail(ErrorCode::State, "unresolved record variable " + var);
    return it->second;
  };
  auto ref_attr_idx = [&](const AttrRef& ref) {
    return schema.require(rel_of_record(ref.var)).require_attr(ref.attr);
  };

  // Driver: a similarity atom over the head pair seeds candidates from the
  // cache; failing that, an equality atom over the head pair hash-joins;
  // failing both, the ordered cross product.
  size_t consumed = md.conds.size();
  for (size_t i = 0; i < md.conds.size() && consumed == md.conds.size(); ++i) {
    const auto* s = std::get_if<SimAtom>(&md.conds[i]);
    if (!s) continue;
    bool fwd = s->left.var == md.head_var1 && s->right.var == md.head_var2;
    bool rev = s->left.var == md.head_var2 && s->right.var == md.head_var1;
    if (fwd || rev) {
      plan.driver = DriverKind::SimCache;
      plan.driver_spec = s->spec;
      plan.driver_attr = ref_attr_idx(s->left);  // same attribute both sides
      consumed = i;
    }
  }
  if (consumed == md.conds.size()) {
    for (size_t i = 0; i < md.conds.size() && consumed == md.conds.size(); ++i) {
      const auto* e = std::get_if<EqAtom>(&md.conds[i]);
      if (!e) continue;
      bool fwd = e->left.var == md.head_var1 && e->right.var == md.head_var2;
      bool rev = e->left.var == md.head_var2 && e->right.var == md.head_var1;
      if (fwd || rev) {
        plan.driver = DriverKind::HashJoin;
        plan.driver_attr1 = ref_attr_idx(fwd ? e->left : e->right);
        plan.driver_attr2 = ref_attr_idx(fwd ? e->right : e->left);
        consumed = i;
      }
    }
  }

  // Greedy atom ordering: repeatedly place the relation atom with the most
  // already-bound terms (ties broken by source order).
  BoundState bound;
  bound.val.assign((size_t)nslots, 0);
  bound.rec.assign((size_t)nslots, 0);
  bound.val[(size_t)plan.slot_hv1] = bound.rec[(size_t)plan.slot_hv1] = 1;
  bound.val[(size_t)plan.slot_hv2] = bound.rec[(size_t)plan.slot_hv2] = 1;

  struct Pending {
    size_t cond_idx;
    const RelAtom* atom;
  };
  std::vector<Pending> pending;
  for (size_t i = 0; i < md.conds.size(); ++i)
    if (const auto* r = std::get_if<RelAtom>(&md.conds[i])) pending.push_back({i, r});

  std::vector<PlanValAttrEq> deferred;
  while (!pending.empty()) {
    size_t best = 0;
    int best_score = -1;
    for (size_t i = 0; i < pending.size(); ++i) {
      int score = 0;
      for (const Term& term : pending[i].atom->terms) {
        if (term.kind == Term::Kind::Var && bound.val[(size_t)slot_id.at(term.var)]) ++score;
        if (term.kind == Term::Kind::Attr && bound.rec[(size_t)slot_id.at(term.var)]) ++score;
      }
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    const RelAtom& atom = *pending[best].atom;
    size_t cond_idx = pending[best].cond_idx;
    pending.erase(pending.begin() + (long)best);

    PlanAtom pa;
    pa.relation = atom.relation;
    pa.decl = &schema.require(atom.relation);
    for (size_t t = 0; t < atom.terms.size(); ++t) {
      const Term& term = atom.terms[t];
      if (term.kind == Term::Kind::Wildcard) continue;
      PlanAtom::Op op;
      op.col = t;
      if (term.kind == Term::Kind::Var) {
        int s = slot_id.at(term.var);
        op.slot = s;
        auto rv = md.record_vars.find(term.var);
        op.bind_record =
            rv != md.record_vars.end() && rv->second == atom.relation && t == pa.decl->key_index;
        op.bound_before = bound.val[(size_t)s] != 0;
        op.kind = op.bound_before ? PlanAtom::Op::Kind::Constrained : PlanAtom::Op::Kind::Fresh;
        bound.val[(size_t)s] = 1;
        if (op.bind_record) bound.rec[(size_t)s] = 1;
      } else {  // attribute term
        int rs = slot_id.at(term.var);
        size_t aidx = schema.require(rel_of_record(term.var)).require_attr(term.attr);
        if (bound.rec[(size_t)rs]) {
          op.kind = PlanAtom::Op::Kind::AttrConstrained;
          op.slot = rs;
          op.attr_idx = aidx;
          op.bound_before = true;
        } else {
          int h = hidden.at({cond_idx, t});
          op.kind = PlanAtom::Op::Kind::Fresh;
          op.slot = h;
          bound.val[(size_t)h] = 1;
          deferred.push_back(PlanValAttrEq{h, rs, aidx});
        }
      }
      pa.ops.push_back(op);
    }
    plan.atoms.push_back(std::move(pa));
  }

  // Place residual checks at the earliest stage where their slots are bound.
  std::vector<BoundState> stage;
  {
    BoundState b;
    b.val.assign((size_t)nslots, 0);
    b.rec.assign((size_t)nslots, 0);
    b.val[(size_t)plan.slot_hv1] = b.rec[(size_t)plan.slot_hv1] = 1;
    b.val[(size_t)plan.slot_hv2] = b.rec[(size_t)plan.slot_hv2] = 1;
    stage.push_back(b);
    for (const PlanAtom& pa : plan.atoms) {
      for (const auto& op : pa.ops) {
        if (op.kind == PlanAtom::Op::Kind::Fresh) b.val[(size_t)op.slot] = 1;
        if (op.bind_record) b.rec[(size_t)op.slot] = 1;
      }
      stage.push_back(b);
    }
  }
  plan.checks_at.resize(plan.atoms.size() + 1);
  auto place = [&](const PlanCheck& check, const std::vector<int>& need_val,
                   const std::vector<int>& need_rec) {
    for (size_t k = 0; k < stage.size(); ++k) {
      bool ok = true;
      for (int s : need_val)
        if (!stage[k].val[(size_t)s]) ok = false;
      for (int s : need_rec)
        if (!stage[k].rec[(size_t)s]) ok = false;
      if (ok) {
        plan.checks_at[k].push_back(check);
        return;
      }
    }
    fail(ErrorCode::State, "internal: condition never becomes evaluable");
  };
  for (size_t i = 0; i < md.conds.size(); ++i) {
    if (i == consumed) continue;
    if (const auto* s = std::get_if<SimAtom>(&md.conds[i])) {
      PlanSim c{slot_id.at(s->left.var), slot_id.at(s->right.var), ref_attr_idx(s->left),
                ref_attr_idx(s->right), s->spec};
      place(c, {}, {c.lrec, c.rrec});
    } else if (const auto* e = std::get_if<EqAtom>(&md.conds[i])) {
      PlanEq c{slot_id.at(e->left.var), slot_id.at(e->right.var), ref_attr_idx(e->left),
               ref_attr_idx(e->right)};
      place(c, {}, {c.lrec, c.rrec});
    } else if (const auto* b = std::get_if<BlockEq>(&md.conds[i])) {
      PlanBlockEq c{slot_id.at(b->left), slot_id.at(b->right), rel_of_record(b->left)};
      place(c, {}, {c.lslot, c.rslot});
    }
  }
  for (const PlanValAttrEq& c : deferred) place(c, {c.value_slot}, {c.rec_slot});
  return plan;
}

namespace {

struct Evaluator {
  const CompiledMD& plan;
  EvalContext& ctx;
  const SimCache& cache;
  const BlockFn& block_of;
  std::vector<Value> vals;
  std::vector<char> has_val;
  std::vector<const Record*> recs;

  Evaluator(const CompiledMD& p, EvalContext& c, const SimCache& sc, const BlockFn& bf)
      : plan(p), ctx(c), cache(sc), block_of(bf) {
    vals.resize((size_t)plan.nslots);
    has_val.assign((size_t)plan.nslots, 0);
    recs.assign((size_t)plan.nslots, nullptr);
  }

  bool check_one(const PlanCheck& check) const {
    if (const auto* s = std::get_if<PlanSim>(&check)) {
      return cache.similar(s->spec, recs[(size_t)s->lrec]->values[s->lattr],
                           recs[(size_t)s->rrec]->values[s->rattr]);
    }
    if (const auto* e = std::get_if<PlanEq>(&check)) {
      const Value& a = recs[(size_t)e->lrec]->values[e->lattr];
      const Value& b = recs[(size_t)e->rrec]->values[e->rattr];
      return !is_null(a) && !is_null(b) && a == b;
    }
    if (const auto* v = std::get_if<PlanValAttrEq>(&check)) {
      const Value& a = vals[(size_t)v->value_slot];
      const Value& b = recs[(size_t)v->rec_slot]->values[v->attr_idx];
      return !is_null(a) && !is_null(b) && a == b;
    }
    const auto& b = std::get<PlanBlockEq>(check);
    return block_of(b.relation, recs[(size_t)b.lslot]->rid) ==
           block_of(b.relation, recs[(size_t)b.rslot]->rid);
  }

  bool checks(size_t stage) const {
    for (const PlanCheck& c : plan.checks_at[stage])
      if (!check_one(c)) return false;
    return true;
  }

  bool match_row(const PlanAtom& atom, const Record& row, size_t depth) {
    std::vector<int> undo_vals, undo_recs;
    bool ok = true;
    for (const auto& op : atom.ops) {
      const Value& rv = row.values[op.col];
      if (op.kind == PlanAtom::Op::Kind::Constrained) {
        const Value& bv = vals[(size_t)op.slot];
        if (!has_val[(size_t)op.slot] || is_null(bv) || !(rv == bv)) {
          ok = false;
          break;
        }
      } else if (op.kind == PlanAtom::Op::Kind::AttrConstrained) {
        const Value& exp = recs[(size_t)op.slot]->values[op.attr_idx];
        if (is_null(exp) || !(rv == exp)) {
          ok = false;
          break;
        }
      } else {  // Fresh
        vals[(size_t)op.slot] = rv;
        has_val[(size_t)op.slot] = 1;
        undo_vals.push_back(op.slot);
      }
      if (op.bind_record && recs[(size_t)op.slot] == nullptr) {
        recs[(size_t)op.slot] = &row;
        undo_recs.push_back(op.slot);
      }
    }
    if (ok && checks(depth + 1) && extend(depth + 1)) {
      // Exists semantics: the head pair is decided; unwind cleanly.
      for (int s : undo_vals) has_val[(size_t)s] = 0;
      for (int s : undo_recs) recs[(size_t)s] = nullptr;
      return true;
    }
    for (int s : undo_vals) has_val[(size_t)s] = 0;
    for (int s : undo_recs) recs[(size_t)s] = nullptr;
    return false;
  }

  bool extend(size_t depth) {
    if (depth == plan.atoms.size()) return true;
    const PlanAtom& atom = plan.atoms[depth];
    const std::vector<const Record*>* rows = nullptr;
    for (const auto& op : atom.ops) {
      if (!op.bound_before) continue;
      Value key;
      if (op.kind == PlanAtom::Op::Kind::Constrained)
        key = vals[(size_t)op.slot];
      else if (op.kind == PlanAtom::Op::Kind::AttrConstrained)
        key = recs[(size_t)op.slot]->values[op.attr_idx];
      else
        continue;
      if (is_null(key)) return false;  // nulls never join
      const auto& idx = ctx.index(atom.relation, op.col);
      auto it = idx.find(key);
      if (it == idx.end()) return false;
      rows = &it->second;
      break;
    }
    if (!rows) rows = &ctx.all_rows(atom.relation);
    for (const Record* r : *rows)
      if (match_row(atom, *r, depth)) return true;
    return false;
  }
};

}  // namespace

std::set<std::pair<int64_t, int64_t>> evaluate_md(const CompiledMD& plan, EvalContext& ctx,
                                                  const SimCache& cache,
                                                  const BlockFn& block_of) {
  Evaluator ev(plan, ctx, cache, block_of);
  std::set<std::pair<int64_t, int64_t>> out;
  size_t h1 = (size_t)plan.slot_hv1, h2 = (size_t)plan.slot_hv2;

  auto try_pair = [&](const Record* r1, const Record* r2) {
    if (r1->rid == r2->rid) return;  // implicit distinctness of head records
    std::pair<int64_t, int64_t> key{std::min(r1->rid, r2->rid), std::max(r1->rid, r2->rid)};
    if (out.count(key)) return;
    ev.vals[h1] = Value(r1->rid);
    ev.vals[h2] = Value(r2->rid);
    ev.has_val[h1] = ev.has_val[h2] = 1;
    ev.recs[h1] = r1;
    ev.recs[h2] = r2;
    if (ev.checks(0) && ev.extend(0)) out.insert(key);
    ev.has_val[h1] = ev.has_val[h2] = 0;
    ev.recs[h1] = ev.recs[h2] = nullptr;
  };

  const std::string& head_rel = plan.md->head_relation;
  const RelationInstance& head = ctx.instance().require(head_rel);
  switch (plan.driver) {
    case DriverKind::Cross:
      for (const Record& r1 : head.rows)
        for (const Record& r2 : head.rows) try_pair(&r1, &r2);
      break;
    case DriverKind::HashJoin: {
      const auto& idx2 = ctx.index(head_rel, plan.driver_attr2);
      for (const Record& r1 : head.rows) {
        const Value& v = r1.values[plan.driver_attr1];
        if (is_null(v)) continue;
        auto it = idx2.find(v);
        if (it == idx2.end()) continue;
        for (const Record* r2 : it->second) try_pair(&r1, r2);
      }
      break;
    }
    case DriverKind::SimCache: {
      const SpecCache& sc = cache.require(plan.driver_spec);
      const auto& idx = ctx.index(head_rel, plan.driver_attr);
      for (const auto& [vp, w] : sc.pairs) {
        (void)w;  // presence in the cache already means weight >= threshold
        auto it1 = idx.find(vp.first);
        auto it2 = idx.find(vp.second);
        if (it1 == idx.end() || it2 == idx.end()) continue;
        for (const Record* r1 : it1->second)
          for (const Record* r2 : it2->second) {
            try_pair(r1, r2);
            try_pair(r2, r1);
          }
      }
      // Equal non-null values are implicitly similar at weight 1.0.
      if (1.0 >= sc.spec.threshold) {
        for (const auto& [v, group] : idx) {
          (void)v;
          for (const Record* r1 : group)
            for (const Record* r2 : group) try_pair(r1, r2);
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace erblox::md
