// The blocking-MD rule language: AST, parser, printer, and static
// validation including the interaction-freeness check.
//
// Grammar (EBNF):
//   md      := "block" headatom "," headatom "when" cond ("and" cond)* "then"
//              "block(" var ")" "=" "block(" var ")" ";"
//   headatom:= relname var
//   cond    := simatom | eqatom | relatom | blockeq
//   simatom := "sim(" var "." attr "," var "." attr "," simspec ")"
//   eqatom  := var "." attr "=" var "." attr
//   relatom := relname "(" term ("," term)* ")"
//   blockeq := "block(" var ")" "=" "block(" var ")"
//   term    := var | var "." attr | "_"
//   merge   := "merge" relname "using" "match(" attr ")" "=" mfname
//              ("," "match(" attr ")" "=" mfname)* ";"
//
// A variable names a record when it appears in the key position of a
// relation atom (head atoms bind implicitly); every other occurrence joins
// on its value. Shared variables join positionally; nulls never join.
#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "core/schema.h"
#include "core/similarity.h"

namespace erblox::md {

// Reserved pseudo-attribute naming the block column. The grammar cannot
// produce it; it exists so hand-built ASTs that touch block numbers with a
// similarity atom can be detected and rejected.
inline constexpr const char* kBlockAttr = "Bl#";

struct AttrRef {
  std::string var;
  std::string attr;
};

struct SimAtom {
  AttrRef left, right;
  std::string spec;
};

struct EqAtom {
  AttrRef left, right;
};

struct Term {
  enum class Kind { Var, Attr, Wildcard };
  Kind kind = Kind::Var;
  std::string var;   // Var and Attr
  std::string attr;  // Attr only
};

struct RelAtom {
  std::string relation;
  std::vector<Term> terms;
};

struct BlockEq {
  std::string left, right;  // record variables
};

using Cond = std::variant<SimAtom, EqAtom, RelAtom, BlockEq>;

struct BlockingMD {
  int id = 0;  // 1-based position in the rule file
  std::string head_relation;
  std::string head_relation2;  // second head atom's relation; must equal the first
  std::string head_var1, head_var2;
  std::vector<Cond> conds;
  std::string concl_var1, concl_var2;

  // Filled by validation: record variable -> relation.
  std::map<std::string, std::string> record_vars;
};

struct MergeRule {
  std::string relation;
  std::vector<std::pair<std::string, std::string>> mf_by_attr;  // (attribute, mf name)
};

struct MDSet {
  std::vector<BlockingMD> mds;
  std::vector<MergeRule> merges;
  bool validated = false;
};

MDSet parse_mds(const std::string& source);

std::string print_mds(const MDSet& set);

// Resolves record variables, checks binding and arity rules, verifies the
// conclusion covers exactly the head records, and requires body atoms to
// mention a head variable. Throws on the first violation; marks the set
// validated on success.
void validate_mds(MDSet& set, const Schema& schema, const std::vector<SimSpec>& specs);

struct InteractionReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Blocking-MDs modify only block numbers, so interaction can only arise from
// a similarity atom over the block pseudo-attribute. Merge rules trigger on
// the fixed duplicate relation, never on merged attributes, so the merge
// layer is interaction-free by construction.
InteractionReport check_interaction_free(const MDSet& set);

}  // namespace erblox::md
