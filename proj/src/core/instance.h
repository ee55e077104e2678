// Relation instances: identified records with attribute values and an
// initial block number equal to the record id.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/schema.h"
#include "core/value.h"

namespace erblox {

struct Record {
  int64_t rid = 0;
  std::vector<Value> values;  // aligned with RelationDecl::attrs, key column included
  int64_t block = 0;          // always rid at ingestion time
};

struct RelationInstance {
  const RelationDecl* decl = nullptr;
  std::vector<Record> rows;  // file order
  std::unordered_map<int64_t, size_t> by_rid;

  const Record* find(int64_t rid) const;
  const Record& require(int64_t rid) const;
};

struct Instance {
  std::map<std::string, RelationInstance> relations;  // ordered for deterministic iteration

  const RelationInstance* find(const std::string& relation) const;
  const RelationInstance& require(const std::string& relation) const;
  RelationInstance& require_mut(const std::string& relation);
};

// Loads one CSV (no header) into `relation`. The key column provides the rid;
// fields are trimmed, empty fields become null, numeric columns parse as
// integers, and short rows are padded with nulls.
RelationInstance ingest_csv(const std::string& csv_text, const std::string& relation,
                            const Schema& schema);

std::string export_csv(const RelationInstance& rel);

struct DanglingRef {
  std::string from_relation, from_attr;
  int64_t rid;
  Value value;
  std::string to_relation, to_attr;
};

struct ValidationReport {
  std::vector<DanglingRef> dangling;
  // (relation, attribute) -> fraction of null values, keyed for deterministic output.
  std::map<std::pair<std::string, std::string>, double> null_density;
};

ValidationReport validate_instance(const Instance& instance, const Schema& schema);

}  // namespace erblox
