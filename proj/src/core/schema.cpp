#include "core/schema.h"

#include <set>
#include <sstream>

#include "core/error.h"

namespace erblox {

std::string domain_tag_name(DomainTag tag) {
  switch (tag) {
    case DomainTag::Text: return "text";
    case DomainTag::ShortString: return "short-string";
    case DomainTag::Numeric: return "numeric";
  }
  return "?";
}

std::optional<size_t> RelationDecl::attr_index(const std::string& attr) const {
  for (size_t i = 0; i < attrs.size(); ++i) {
    if (attrs[i].name == attr) return i;
  }
  return std::nullopt;
}

size_t RelationDecl::require_attr(const std::string& attr) const {
  std::optional<size_t> i = attr_index(attr);
  if (!i) fail(ErrorCode::Validation, "unknown attribute: " + name + "." + attr);
  return *i;
}

const RelationDecl* Schema::find(const std::string& relation) const {
  for (const auto& r : relations) {
    if (r.name == relation) return &r;
  }
  return nullptr;
}

const RelationDecl& Schema::require(const std::string& relation) const {
  const RelationDecl* r = find(relation);
  if (!r) fail(ErrorCode::Validation, "unknown relation: " + relation);
  return *r;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Splits "Rel.attr" into its two parts.
std::pair<std::string, std::string> split_attr_ref(const std::string& token, int line_no) {
  size_t dot = token.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == token.size()) {
    fail(ErrorCode::Parse, "schema line " + std::to_string(line_no) +
                               ": expected Relation.attribute, got '" + token + "'");
  }
  return {token.substr(0, dot), token.substr(dot + 1)};
}

RelationDecl parse_relation_line(const std::string& body, int line_no) {
  size_t open = body.find('(');
  size_t close = body.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    fail(ErrorCode::Parse,
         "schema line " + std::to_string(line_no) + ": expected relation Name(attr: tag, ...)");
  }
  RelationDecl decl;
  decl.name = trim(body.substr(0, open));
  if (decl.name.empty()) {
    fail(ErrorCode::Parse, "schema line " + std::to_string(line_no) + ": missing relation name");
  }
  std::string attr_list = body.substr(open + 1, close - open - 1);
  std::stringstream ss(attr_list);
  std::string item;
  std::set<std::string> seen;
  bool have_key = false;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    size_t colon = item.find(':');
    if (colon == std::string::npos) {
      fail(ErrorCode::Parse,
           "schema line " + std::to_string(line_no) + ": expected attr: tag in '" + item + "'");
    }
    AttrDecl attr;
    attr.name = trim(item.substr(0, colon));
    std::string tag = trim(item.substr(colon + 1));
    if (attr.name.empty()) {
      fail(ErrorCode::Parse, "schema line " + std::to_string(line_no) + ": missing attribute name");
    }
    if (!seen.insert(attr.name).second) {
      fail(ErrorCode::Validation, "duplicate attribute '" + attr.name + "' in relation " + decl.name);
    }
    if (tag == "key") {
      if (have_key) {
        fail(ErrorCode::Validation, "relation " + decl.name + " declares more than one key attribute");
      }
      have_key = true;
      attr.tag = DomainTag::Numeric;
      attr.is_key = true;
      decl.key_index = decl.attrs.size();
    } else if (tag == "text") {
      attr.tag = DomainTag::Text;
    } else if (tag == "short-string") {
      attr.tag = DomainTag::ShortString;
    } else if (tag == "numeric") {
      attr.tag = DomainTag::Numeric;
    } else {
      fail(ErrorCode::Validation,
           "unknown domain tag '" + tag + "' for " + decl.name + "." + attr.name);
    }
    decl.attrs.push_back(attr);
  }
  if (decl.attrs.empty()) {
    fail(ErrorCode::Validation, "relation " + decl.name + " declares no attributes");
  }
  if (!have_key) {
    fail(ErrorCode::Validation, "relation " + decl.name + " has no key attribute");
  }
  return decl;
}

}  // namespace

Schema load_schema(const std::string& config_text) {
  Schema schema;
  std::stringstream ss(config_text);
  std::string line;
  int line_no = 0;
  std::set<std::string> names;
  while (std::getline(ss, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.rfind("relation ", 0) == 0) {
      RelationDecl decl = parse_relation_line(trim(line.substr(9)), line_no);
      if (!names.insert(decl.name).second) {
        fail(ErrorCode::Validation, "duplicate relation: " + decl.name);
      }
      schema.relations.push_back(std::move(decl));
    } else if (line.rfind("foreign ", 0) == 0) {
      std::string body = trim(line.substr(8));
      size_t arrow = body.find("->");
      if (arrow == std::string::npos) {
        fail(ErrorCode::Parse, "schema line " + std::to_string(line_no) +
                                   ": expected foreign A.x -> B.y");
      }
      ForeignKey fk;
      auto from = split_attr_ref(trim(body.substr(0, arrow)), line_no);
      auto to = split_attr_ref(trim(body.substr(arrow + 2)), line_no);
      fk.from_relation = from.first;
      fk.from_attr = from.second;
      fk.to_relation = to.first;
      fk.to_attr = to.second;
      schema.foreign_keys.push_back(fk);
    } else {
      fail(ErrorCode::Parse,
           "schema line " + std::to_string(line_no) + ": unknown declaration '" + line + "'");
    }
  }
  // Foreign keys may be declared before their relations, so resolve at the end.
  for (const auto& fk : schema.foreign_keys) {
    const RelationDecl& from = schema.require(fk.from_relation);
    const RelationDecl& to = schema.require(fk.to_relation);
    if (!from.attr_index(fk.from_attr)) {
      fail(ErrorCode::Validation, "foreign key references unknown attribute " +
                                      fk.from_relation + "." + fk.from_attr);
    }
    if (!to.attr_index(fk.to_attr)) {
      fail(ErrorCode::Validation, "foreign key references unknown attribute " +
                                      fk.to_relation + "." + fk.to_attr);
    }
  }
  return schema;
}

}  // namespace erblox
