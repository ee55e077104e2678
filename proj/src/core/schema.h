// Schema declarations: relations with tagged attributes, one key attribute
// each, plus declared foreign keys for referential validation.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace erblox {

enum class DomainTag { Text, ShortString, Numeric };

std::string domain_tag_name(DomainTag tag);

struct AttrDecl {
  std::string name;
  DomainTag tag;
  bool is_key = false;
};

struct RelationDecl {
  std::string name;
  std::vector<AttrDecl> attrs;
  size_t key_index = 0;

  std::optional<size_t> attr_index(const std::string& attr) const;
  size_t require_attr(const std::string& attr) const;  // fails on unknown attribute
};

struct ForeignKey {
  std::string from_relation, from_attr;
  std::string to_relation, to_attr;
};

struct Schema {
  std::vector<RelationDecl> relations;
  std::vector<ForeignKey> foreign_keys;

  const RelationDecl* find(const std::string& relation) const;
  const RelationDecl& require(const std::string& relation) const;
};

// Config grammar, one declaration per line, '#' comments:
//   relation Author(aid: key, name: short-string, affiliation: text)
//   foreign PaperAuthor.pid -> Paper.pid
Schema load_schema(const std::string& config_text);

}  // namespace erblox
