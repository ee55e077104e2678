// Matching functions and component-wise duplicate fusion.
#include "core/merge.h"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "core/error.h"

namespace erblox {

MatchFn parse_mf(const std::string& name) {
  if (name == "longest") return MatchFn::Longest;
  if (name == "max") return MatchFn::Max;
  if (name == "union") return MatchFn::Union;
  if (name == "prefer-non-null") return MatchFn::PreferNonNull;
  fail(ErrorCode::Parse, "unknown matching function: " + name);
}

std::string mf_name(MatchFn mf) {
  switch (mf) {
    case MatchFn::Longest: return "longest";
    case MatchFn::Max: return "max";
    case MatchFn::Union: return "union";
    case MatchFn::PreferNonNull: return "prefer-non-null";
  }
  return "?";
}

std::string canonical_set(const std::string& list) {
  std::set<std::string> elems;
  size_t start = 0;
  while (start <= list.size()) {
    size_t comma = list.find(',', start);
    size_t end = comma == std::string::npos ? list.size() : comma;
    size_t b = start, e = end;
    while (b < e && (list[b] == ' ' || list[b] == '\t')) ++b;
    while (e > b && (list[e - 1] == ' ' || list[e - 1] == '\t')) --e;
    if (e > b) elems.insert(list.substr(b, e - b));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  std::string out;
  for (const std::string& s : elems) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

namespace {

// Longer rendering wins; ties fall to the value-order maximum so the choice
// is symmetric in its arguments.
Value longest_of(const Value& a, const Value& b) {
  std::string sa = value_to_string(a), sb = value_to_string(b);
  if (sa.size() != sb.size()) return sa.size() > sb.size() ? a : b;
  if (sa != sb) return sa > sb ? a : b;
  return value_less(a, b) ? b : a;
}

}  // namespace

Value apply_mf(MatchFn mf, const Value& a, const Value& b) {
  if (is_null(a)) return b;
  if (is_null(b)) return a;
  switch (mf) {
    case MatchFn::Longest: return longest_of(a, b);
    case MatchFn::Max: return value_less(a, b) ? b : a;
    case MatchFn::Union:
      return Value(canonical_set(value_to_string(a) + ", " + value_to_string(b)));
    case MatchFn::PreferNonNull: return longest_of(a, b);
  }
  return b;
}

bool precedes(MatchFn mf, const Value& a, const Value& b) {
  return apply_mf(mf, a, b) == b;
}

void validate_merge_rules(const md::MDSet& set, const Schema& schema) {
  for (const md::MergeRule& rule : set.merges) {
    const RelationDecl& decl = schema.require(rule.relation);
    for (const auto& [attr, name] : rule.mf_by_attr) {
      MatchFn mf = parse_mf(name);
      DomainTag tag = decl.attrs[decl.require_attr(attr)].tag;
      if ((mf == MatchFn::Union || mf == MatchFn::Longest) && tag == DomainTag::Numeric)
        fail(ErrorCode::Validation,
             name + " cannot merge numeric attribute " + rule.relation + "." + attr);
    }
  }
}

ResolvedInstance merge_duplicates(
    const Instance& instance,
    const std::map<std::string, std::vector<std::pair<int64_t, int64_t>>>& dups,
    const md::MDSet& rules, const Schema& schema) {
  validate_merge_rules(rules, schema);
  ResolvedInstance out;
  for (const auto& [name, rel] : instance.relations) {
    const RelationDecl& decl = *rel.decl;

    std::vector<MatchFn> mf(decl.attrs.size(), MatchFn::PreferNonNull);
    for (const md::MergeRule& rule : rules.merges) {
      if (rule.relation != name) continue;
      for (const auto& [attr, fn] : rule.mf_by_attr) mf[decl.require_attr(attr)] = parse_mf(fn);
    }

    // Union-find over rids; duplicates fixed up front, closure via roots.
    std::map<int64_t, int64_t> parent;
    for (const Record& r : rel.rows) parent[r.rid] = r.rid;
    std::function<int64_t(int64_t)> find = [&](int64_t x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
      }
      return x;
    };
    auto it = dups.find(name);
    if (it != dups.end()) {
      for (const auto& [a, b] : it->second) {
        if (!rel.find(a) || !rel.find(b))
          fail(ErrorCode::Validation, "duplicate pair references unknown rid in " + name);
        int64_t ra = find(a), rb = find(b);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
    }

    std::map<int64_t, std::vector<int64_t>> components;  // min rid -> members
    for (const Record& r : rel.rows) components[find(r.rid)].push_back(r.rid);

    ResolvedRelation res;
    auto& survivor = out.survivor[name];
    for (auto& [root, members] : components) {
      std::sort(members.begin(), members.end());
      std::vector<Value> folded = rel.require(members[0]).values;
      for (size_t i = 1; i < members.size(); ++i) {
        const Record& r = rel.require(members[i]);
        for (size_t a = 0; a < folded.size(); ++a) {
          if (a == decl.key_index) continue;
          folded[a] = apply_mf(mf[a], folded[a], r.values[a]);
        }
      }
      for (int64_t rid : members) {
        survivor[rid] = root;
        Record merged{rid, folded, rid};
        merged.values[decl.key_index] = Value(rid);
        res.full.push_back(std::move(merged));
        if (rid == root) res.canonical.push_back(res.full.back());
      }
    }
    std::sort(res.full.begin(), res.full.end(),
              [](const Record& a, const Record& b) { return a.rid < b.rid; });
    std::sort(res.canonical.begin(), res.canonical.end(),
              [](const Record& a, const Record& b) { return a.rid < b.rid; });
    out.relations[name] = std::move(res);
  }
  return out;
}

std::string dump_survivors(const ResolvedInstance& resolved) {
  std::ostringstream out;
  for (const auto& [name, m] : resolved.survivor)
    for (const auto& [rid, root] : m) out << name << '\t' << rid << '\t' << root << '\n';
  return out.str();
}

}  // namespace erblox
