// Feature slot resolution and per-pair vector computation.
#include "core/features.h"

#include "core/error.h"

namespace erblox {

SlotPolicy parse_slot_policy(const std::string& name) {
  if (name == "skip-pair") return SlotPolicy::SkipPair;
  if (name == "substitute") return SlotPolicy::Substitute;
  if (name == "zero") return SlotPolicy::Zero;
  fail(ErrorCode::Parse, "unknown feature policy: " + name);
}

std::string slot_policy_name(SlotPolicy policy) {
  switch (policy) {
    case SlotPolicy::SkipPair: return "skip-pair";
    case SlotPolicy::Substitute: return "substitute";
    case SlotPolicy::Zero: return "zero";
  }
  return "?";
}

std::string FeatureSlot::label() const {
  auto path_str = [this](const FeaturePath& p) {
    std::string s = relation + "." + p.attr;
    if (p.has_join()) s += "->" + p.join_relation + "." + p.join_attr;
    return s;
  };
  std::string s = path_str(primary);
  if (fallback) s += "|" + path_str(*fallback);
  return s;
}

namespace {

void merge_df(DfTable& into, const DfTable& from) {
  into.doc_count += from.doc_count;
  for (const auto& [tok, n] : from.df) into.df[tok] += n;
}

}  // namespace

FeatureExtractor::FeatureExtractor(const Schema& schema, const Instance& instance,
                                   std::vector<FeatureSlot> slots, const std::string& relation)
    : instance_(instance), relation_(relation), slots_(std::move(slots)) {
  const RelationDecl& decl = schema.require(relation);
  for (const FeatureSlot& slot : slots_) {
    if (slot.relation != relation)
      fail(ErrorCode::Arg, "feature slot " + slot.label() + " is not over " + relation);
    if (slot.policy == SlotPolicy::Substitute && !slot.fallback)
      fail(ErrorCode::Validation, "substitute policy requires a fallback path: " + slot.label());
    PreparedSlot ps;
    auto prepare = [&](const FeaturePath& path) {
      PreparedPath pp;
      pp.attr_idx = decl.require_attr(path.attr);
      const RelationDecl* target_decl = &decl;
      size_t target_idx = pp.attr_idx;
      if (path.has_join()) {
        if (decl.attrs[pp.attr_idx].tag != DomainTag::Numeric)
          fail(ErrorCode::Validation,
               "join source attribute must be numeric: " + relation + "." + path.attr);
        target_decl = &schema.require(path.join_relation);
        target_idx = target_decl->require_attr(path.join_attr);
        pp.join = &instance_.require(path.join_relation);
        pp.join_attr_idx = target_idx;
      }
      if (!kernel_matches_tag(slot.kernel, target_decl->attrs[target_idx].tag))
        fail(ErrorCode::Validation, "kernel " + kernel_name(slot.kernel) +
                                        " does not fit the resolved attribute of " + slot.label());
      if (slot.kernel == Kernel::TfIdfCosine) {
        const RelationInstance& target_rel =
            path.has_join() ? *pp.join : instance_.require(relation);
        merge_df(ps.df, build_df_table(target_rel, target_idx));
      }
      return pp;
    };
    ps.primary = prepare(slot.primary);
    if (slot.fallback) ps.fallback = prepare(*slot.fallback);
    prepared_.push_back(std::move(ps));
  }
}

std::optional<Value> FeatureExtractor::resolve(const PreparedPath& path,
                                               const Record& rec) const {
  const Value& v = rec.values[path.attr_idx];
  if (is_null(v)) return std::nullopt;
  if (!path.join) return v;
  const Record* target = path.join->find(std::get<int64_t>(v));
  if (!target) return std::nullopt;
  const Value& tv = target->values[path.join_attr_idx];
  if (is_null(tv)) return std::nullopt;
  return tv;
}

std::optional<std::vector<double>> FeatureExtractor::vector_for(int64_t rid1, int64_t rid2,
                                                                std::string* skip_reason) const {
  const RelationInstance& rel = instance_.require(relation_);
  const Record& r1 = rel.require(rid1);
  const Record& r2 = rel.require(rid2);
  std::vector<double> vec;
  vec.reserve(prepared_.size());
  for (size_t i = 0; i < prepared_.size(); ++i) {
    const PreparedSlot& ps = prepared_[i];
    auto resolve_record = [&](const Record& r) {
      std::optional<Value> v = resolve(ps.primary, r);
      if (!v && ps.fallback) v = resolve(*ps.fallback, r);
      return v;
    };
    std::optional<Value> v1 = resolve_record(r1);
    std::optional<Value> v2 = resolve_record(r2);
    if (!v1 || !v2) {
      if (slots_[i].policy == SlotPolicy::Zero) {
        vec.push_back(0.0);
        continue;
      }
      if (skip_reason) *skip_reason = slots_[i].label();
      return std::nullopt;
    }
    vec.push_back(kernel_weight(slots_[i].kernel, *v1, *v2, &ps.df));
  }
  return vec;
}

}  // namespace erblox
