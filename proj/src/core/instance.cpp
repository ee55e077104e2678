#include "core/instance.h"

#include <set>

#include "core/csv.h"
#include "core/error.h"

namespace erblox {

const Record* RelationInstance::find(int64_t rid) const {
  auto it = by_rid.find(rid);
  return it == by_rid.end() ? nullptr : &rows[it->second];
}

const Record& RelationInstance::require(int64_t rid) const {
  const Record* r = find(rid);
  if (!r) {
    fail(ErrorCode::Validation,
         "unknown rid " + std::to_string(rid) + " in relation " + decl->name);
  }
  return *r;
}

const RelationInstance* Instance::find(const std::string& relation) const {
  auto it = relations.find(relation);
  return it == relations.end() ? nullptr : &it->second;
}

const RelationInstance& Instance::require(const std::string& relation) const {
  const RelationInstance* r = find(relation);
  if (!r) fail(ErrorCode::Validation, "unknown relation: " + relation);
  return *r;
}

RelationInstance& Instance::require_mut(const std::string& relation) {
  auto it = relations.find(relation);
  if (it == relations.end()) fail(ErrorCode::Validation, "unknown relation: " + relation);
  return it->second;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

Value typed_value(const std::string& raw, const AttrDecl& attr, const std::string& where) {
  std::string token = trim(raw);
  if (token.empty()) return Value{};
  if (attr.tag == DomainTag::Numeric) {
    return parse_int(token, where + "." + attr.name);
  }
  return token;
}

}  // namespace

RelationInstance ingest_csv(const std::string& csv_text, const std::string& relation,
                            const Schema& schema) {
  const RelationDecl& decl = schema.require(relation);
  RelationInstance out;
  out.decl = &decl;
  auto rows = parse_csv(csv_text);
  for (size_t row_no = 0; row_no < rows.size(); ++row_no) {
    const auto& fields = rows[row_no];
    std::string where = relation + " row " + std::to_string(row_no + 1);
    if (fields.size() > decl.attrs.size()) {
      fail(ErrorCode::Validation, where + ": has " + std::to_string(fields.size()) +
                                      " fields, relation declares " +
                                      std::to_string(decl.attrs.size()));
    }
    Record rec;
    rec.values.resize(decl.attrs.size());
    for (size_t i = 0; i < decl.attrs.size(); ++i) {
      // Missing trailing fields stay null.
      if (i < fields.size()) rec.values[i] = typed_value(fields[i], decl.attrs[i], where);
    }
    const Value& key = rec.values[decl.key_index];
    if (is_null(key)) fail(ErrorCode::Validation, where + ": empty key field");
    rec.rid = std::get<int64_t>(key);
    if (rec.rid <= 0) fail(ErrorCode::Validation, where + ": rid must be positive");
    rec.block = rec.rid;
    if (!out.by_rid.emplace(rec.rid, out.rows.size()).second) {
      fail(ErrorCode::Validation, relation + ": duplicate rid " + std::to_string(rec.rid));
    }
    out.rows.push_back(std::move(rec));
  }
  return out;
}

std::string export_csv(const RelationInstance& rel) {
  std::string out;
  for (const Record& rec : rel.rows) {
    std::vector<std::string> fields;
    fields.reserve(rec.values.size());
    for (const Value& v : rec.values) fields.push_back(value_to_string(v));
    out += write_csv_row(fields);
  }
  return out;
}

ValidationReport validate_instance(const Instance& instance, const Schema& schema) {
  ValidationReport report;
  for (const auto& [name, rel] : instance.relations) {
    for (size_t i = 0; i < rel.decl->attrs.size(); ++i) {
      size_t nulls = 0;
      for (const Record& rec : rel.rows) {
        if (is_null(rec.values[i])) ++nulls;
      }
      double density = rel.rows.empty() ? 0.0 : double(nulls) / double(rel.rows.size());
      report.null_density[{name, rel.decl->attrs[i].name}] = density;
    }
  }
  for (const auto& fk : schema.foreign_keys) {
    const RelationInstance* from = instance.find(fk.from_relation);
    const RelationInstance* to = instance.find(fk.to_relation);
    if (!from || !to) continue;
    size_t from_idx = *from->decl->attr_index(fk.from_attr);
    size_t to_idx = *to->decl->attr_index(fk.to_attr);
    std::set<Value, bool (*)(const Value&, const Value&)> target(value_less);
    for (const Record& rec : to->rows) {
      if (!is_null(rec.values[to_idx])) target.insert(rec.values[to_idx]);
    }
    for (const Record& rec : from->rows) {
      const Value& v = rec.values[from_idx];
      if (is_null(v)) continue;
      if (!target.count(v)) {
        report.dangling.push_back(
            {fk.from_relation, fk.from_attr, rec.rid, v, fk.to_relation, fk.to_attr});
      }
    }
  }
  return report;
}

}  // namespace erblox
