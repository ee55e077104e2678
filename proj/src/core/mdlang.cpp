#include "core/mdlang.h"

#include <cctype>
#include <set>
#include <sstream>

#include "core/error.h"

namespace erblox::md {

namespace {

struct Token {
  enum class Kind { Ident, LParen, RParen, Comma, Semi, Eq, Dot, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 0, col = 0;
};

class Lexer {
public:
  explicit Lexer(const std::string& src) : src_(src) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= src_.size()) {
      t.kind = Token::Kind::End;
      return t;
    }
    char c = src_[pos_];
    if (std::isalpha(unsigned(c)) || c == '_') {
      t.kind = Token::Kind::Ident;
      while (pos_ < src_.size()) {
        char d = src_[pos_];
        if (std::isalnum(unsigned(d)) || d == '_' || d == '-') {
          t.text += d;
          advance();
        } else {
          break;
        }
      }
      return t;
    }
    switch (c) {
      case '(': t.kind = Token::Kind::LParen; break;
      case ')': t.kind = Token::Kind::RParen; break;
      case ',': t.kind = Token::Kind::Comma; break;
      case ';': t.kind = Token::Kind::Semi; break;
      case '=': t.kind = Token::Kind::Eq; break;
      case '.': t.kind = Token::Kind::Dot; break;
      default:
        fail(ErrorCode::Parse, err_pos() + ": unexpected character '" + std::string(1, c) + "'");
    }
    t.text = std::string(1, c);
    advance();
    return t;
  }

private:
  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string err_pos() const {
    return "mds line " + std::to_string(line_) + " col " + std::to_string(col_);
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
public:
  explicit Parser(const std::string& src) : lexer_(src) { shift(); }

  MDSet parse() {
    MDSet set;
    while (cur_.kind != Token::Kind::End) {
      if (is_ident("block")) {
        set.mds.push_back(parse_md(int(set.mds.size()) + 1));
      } else if (is_ident("merge")) {
        set.merges.push_back(parse_merge());
      } else {
        syntax_error("expected 'block' or 'merge'");
      }
    }
    return set;
  }

private:
  [[noreturn]] void syntax_error(const std::string& what) {
    fail(ErrorCode::Parse, "mds line " + std::to_string(cur_.line) + " col " +
                               std::to_string(cur_.col) + ": " + what + " (got '" +
                               (cur_.kind == Token::Kind::End ? "<end>" : cur_.text) + "')");
  }

  void shift() { cur_ = lexer_.next(); }

  bool is_ident(const std::string& text) const {
    return cur_.kind == Token::Kind::Ident && cur_.text == text;
  }

  void expect(Token::Kind kind, const std::string& what) {
    if (cur_.kind != kind) syntax_error("expected " + what);
    shift();
  }

  std::string expect_ident(const std::string& what) {
    if (cur_.kind != Token::Kind::Ident || cur_.text == "_") syntax_error("expected " + what);
    std::string text = cur_.text;
    shift();
    return text;
  }

  void expect_keyword(const std::string& kw) {
    if (!is_ident(kw)) syntax_error("expected '" + kw + "'");
    shift();
  }

  AttrRef parse_attr_ref() {
    AttrRef ref;
    ref.var = expect_ident("a variable");
    expect(Token::Kind::Dot, "'.'");
    ref.attr = expect_ident("an attribute name");
    return ref;
  }

  std::string parse_block_of() {
    expect_keyword("block");
    expect(Token::Kind::LParen, "'('");
    std::string var = expect_ident("a record variable");
    expect(Token::Kind::RParen, "')'");
    return var;
  }

  Cond parse_cond() {
    if (is_ident("sim")) {
      shift();
      expect(Token::Kind::LParen, "'('");
      SimAtom atom;
      atom.left = parse_attr_ref();
      expect(Token::Kind::Comma, "','");
      atom.right = parse_attr_ref();
      expect(Token::Kind::Comma, "','");
      atom.spec = expect_ident("a similarity spec name");
      expect(Token::Kind::RParen, "')'");
      return atom;
    }
    if (is_ident("block")) {
      BlockEq eq;
      eq.left = parse_block_of();
      expect(Token::Kind::Eq, "'='");
      eq.right = parse_block_of();
      return eq;
    }
    std::string first = expect_ident("a relation name or variable");
    if (cur_.kind == Token::Kind::LParen) {
      shift();
      RelAtom atom;
      atom.relation = first;
      while (true) {
        atom.terms.push_back(parse_term());
        if (cur_.kind == Token::Kind::Comma) {
          shift();
          continue;
        }
        break;
      }
      expect(Token::Kind::RParen, "')'");
      return atom;
    }
    EqAtom eq;
    eq.left.var = first;
    expect(Token::Kind::Dot, "'.'");
    eq.left.attr = expect_ident("an attribute name");
    expect(Token::Kind::Eq, "'='");
    eq.right = parse_attr_ref();
    return eq;
  }

  Term parse_term() {
    Term term;
    if (cur_.kind == Token::Kind::Ident && cur_.text == "_") {
      term.kind = Term::Kind::Wildcard;
      shift();
      return term;
    }
    term.var = expect_ident("a term");
    if (cur_.kind == Token::Kind::Dot) {
      shift();
      term.kind = Term::Kind::Attr;
      term.attr = expect_ident("an attribute name");
    } else {
      term.kind = Term::Kind::Var;
    }
    return term;
  }

  BlockingMD parse_md(int id) {
    BlockingMD md;
    md.id = id;
    expect_keyword("block");
    md.head_relation = expect_ident("a relation name");
    md.head_var1 = expect_ident("a record variable");
    expect(Token::Kind::Comma, "','");
    md.head_relation2 = expect_ident("a relation name");
    md.head_var2 = expect_ident("a record variable");
    expect_keyword("when");
    md.conds.push_back(parse_cond());
    while (is_ident("and")) {
      shift();
      md.conds.push_back(parse_cond());
    }
    expect_keyword("then");
    md.concl_var1 = parse_block_of();
    expect(Token::Kind::Eq, "'='");
    md.concl_var2 = parse_block_of();
    expect(Token::Kind::Semi, "';'");
    return md;
  }

  MergeRule parse_merge() {
    MergeRule rule;
    expect_keyword("merge");
    rule.relation = expect_ident("a relation name");
    expect_keyword("using");
    while (true) {
      expect_keyword("match");
      expect(Token::Kind::LParen, "'('");
      std::string attr = expect_ident("an attribute name");
      expect(Token::Kind::RParen, "')'");
      expect(Token::Kind::Eq, "'='");
      std::string mf = expect_ident("a matching function name");
      rule.mf_by_attr.emplace_back(attr, mf);
      if (cur_.kind == Token::Kind::Comma) {
        shift();
        continue;
      }
      break;
    }
    expect(Token::Kind::Semi, "';'");
    return rule;
  }

  Lexer lexer_;
  Token cur_;
};

std::string print_term(const Term& term) {
  switch (term.kind) {
    case Term::Kind::Wildcard: return "_";
    case Term::Kind::Var: return term.var;
    case Term::Kind::Attr: return term.var + "." + term.attr;
  }
  return "?";
}

std::string print_cond(const Cond& cond) {
  if (const auto* sim = std::get_if<SimAtom>(&cond)) {
    return "sim(" + sim->left.var + "." + sim->left.attr + ", " + sim->right.var + "." +
           sim->right.attr + ", " + sim->spec + ")";
  }
  if (const auto* eq = std::get_if<EqAtom>(&cond)) {
    return eq->left.var + "." + eq->left.attr + " = " + eq->right.var + "." + eq->right.attr;
  }
  if (const auto* rel = std::get_if<RelAtom>(&cond)) {
    std::string out = rel->relation + "(";
    for (size_t i = 0; i < rel->terms.size(); ++i) {
      if (i) out += ", ";
      out += print_term(rel->terms[i]);
    }
    return out + ")";
  }
  const auto& beq = std::get<BlockEq>(cond);
  return "block(" + beq.left + ") = block(" + beq.right + ")";
}

}  // namespace

MDSet parse_mds(const std::string& source) { return Parser(source).parse(); }

std::string print_mds(const MDSet& set) {
  std::ostringstream out;
  for (const BlockingMD& md : set.mds) {
    out << "block " << md.head_relation << " " << md.head_var1 << ", " << md.head_relation2
        << " " << md.head_var2 << "\n  when ";
    for (size_t i = 0; i < md.conds.size(); ++i) {
      if (i) out << "\n   and ";
      out << print_cond(md.conds[i]);
    }
    out << "\n  then block(" << md.concl_var1 << ") = block(" << md.concl_var2 << ");\n";
  }
  for (const MergeRule& rule : set.merges) {
    out << "merge " << rule.relation << " using ";
    for (size_t i = 0; i < rule.mf_by_attr.size(); ++i) {
      if (i) out << ", ";
      out << "match(" << rule.mf_by_attr[i].first << ")=" << rule.mf_by_attr[i].second;
    }
    out << ";\n";
  }
  return out.str();
}

namespace {

[[noreturn]] void md_fail(const BlockingMD& md, const std::string& what) {
  fail(ErrorCode::Validation, "md " + std::to_string(md.id) + ": " + what);
}

void check_attr_ref(const BlockingMD& md, const AttrRef& ref, const Schema& schema,
                    const char* where) {
  auto it = md.record_vars.find(ref.var);
  if (it == md.record_vars.end()) {
    md_fail(md, std::string(where) + " references unbound variable '" + ref.var + "'");
  }
  if (ref.attr == kBlockAttr) {
    md_fail(md, std::string(where) + " references the block number of '" + ref.var +
                    "'; block numbers carry no data conditions besides block equality");
  }
  const RelationDecl& rel = schema.require(it->second);
  if (!rel.attr_index(ref.attr)) {
    md_fail(md, std::string(where) + " references unknown attribute " + it->second + "." +
                    ref.attr);
  }
}

void collect_cond_vars(const Cond& cond, std::set<std::string>& vars) {
  if (const auto* sim = std::get_if<SimAtom>(&cond)) {
    vars.insert(sim->left.var);
    vars.insert(sim->right.var);
  } else if (const auto* eq = std::get_if<EqAtom>(&cond)) {
    vars.insert(eq->left.var);
    vars.insert(eq->right.var);
  } else if (const auto* rel = std::get_if<RelAtom>(&cond)) {
    for (const Term& t : rel->terms) {
      if (t.kind != Term::Kind::Wildcard) vars.insert(t.var);
    }
  } else {
    const auto& beq = std::get<BlockEq>(cond);
    vars.insert(beq.left);
    vars.insert(beq.right);
  }
}

void validate_md(BlockingMD& md, const Schema& schema,
                 const std::map<std::string, const SimSpec*>& specs) {
  schema.require(md.head_relation);
  if (md.head_relation != md.head_relation2) {
    md_fail(md, "head relations differ: " + md.head_relation + " vs " + md.head_relation2);
  }
  if (md.head_var1 == md.head_var2) {
    md_fail(md, "head records must use distinct variables");
  }
  md.record_vars.clear();
  md.record_vars[md.head_var1] = md.head_relation;
  md.record_vars[md.head_var2] = md.head_relation;

  // Binding pass: a fresh variable in the key position of a relation atom
  // names a record of that relation.
  for (const Cond& cond : md.conds) {
    const auto* rel = std::get_if<RelAtom>(&cond);
    if (!rel) continue;
    const RelationDecl& decl = schema.require(rel->relation);
    if (rel->terms.size() != decl.attrs.size()) {
      md_fail(md, rel->relation + " atom has " + std::to_string(rel->terms.size()) +
                      " terms, relation declares " + std::to_string(decl.attrs.size()));
    }
    const Term& key_term = rel->terms[decl.key_index];
    if (key_term.kind == Term::Kind::Var && !md.record_vars.count(key_term.var)) {
      md.record_vars[key_term.var] = rel->relation;
    }
  }

  // Use pass.
  for (const Cond& cond : md.conds) {
    if (const auto* sim = std::get_if<SimAtom>(&cond)) {
      check_attr_ref(md, sim->left, schema, "sim atom");
      check_attr_ref(md, sim->right, schema, "sim atom");
      auto spec_it = specs.find(sim->spec);
      if (spec_it == specs.end()) {
        md_fail(md, "unknown similarity spec '" + sim->spec + "'");
      }
      const SimSpec& spec = *spec_it->second;
      for (const AttrRef* ref : {&sim->left, &sim->right}) {
        if (md.record_vars.at(ref->var) != spec.relation || ref->attr != spec.attribute) {
          md_fail(md, "sim atom argument " + ref->var + "." + ref->attr +
                          " does not match spec " + spec.name + " over " + spec.relation + "." +
                          spec.attribute);
        }
      }
    } else if (const auto* eq = std::get_if<EqAtom>(&cond)) {
      check_attr_ref(md, eq->left, schema, "equality atom");
      check_attr_ref(md, eq->right, schema, "equality atom");
    } else if (const auto* rel = std::get_if<RelAtom>(&cond)) {
      for (const Term& term : rel->terms) {
        if (term.kind == Term::Kind::Var && !md.record_vars.count(term.var)) {
          // A non-key bare variable is a join variable; it binds here if it
          // appears nowhere else, which is harmless (existential).
          continue;
        }
        if (term.kind == Term::Kind::Attr) {
          AttrRef ref{term.var, term.attr};
          check_attr_ref(md, ref, schema, "relation atom term");
        }
      }
    } else {
      const auto& beq = std::get<BlockEq>(cond);
      for (const std::string* var : {&beq.left, &beq.right}) {
        if (!md.record_vars.count(*var)) {
          md_fail(md, "block equality references non-record variable '" + *var + "'");
        }
      }
      if (md.record_vars.at(beq.left) != md.record_vars.at(beq.right)) {
        md_fail(md, "block equality must relate two records of one relation, got " +
                        md.record_vars.at(beq.left) + " and " + md.record_vars.at(beq.right));
      }
    }
  }

  // Conclusion covers exactly the two head records.
  std::set<std::string> concl{md.concl_var1, md.concl_var2};
  if (concl != std::set<std::string>{md.head_var1, md.head_var2}) {
    md_fail(md, "conclusion variables must be the two head record variables");
  }

  // Join connectivity: the body must mention a head record.
  std::set<std::string> body_vars;
  for (const Cond& cond : md.conds) collect_cond_vars(cond, body_vars);
  if (!body_vars.count(md.head_var1) && !body_vars.count(md.head_var2)) {
    md_fail(md, "body shares no variable with the head records");
  }
}

}  // namespace

void validate_mds(MDSet& set, const Schema& schema, const std::vector<SimSpec>& specs) {
  std::map<std::string, const SimSpec*> by_name;
  for (const SimSpec& s : specs) by_name[s.name] = &s;
  for (BlockingMD& md : set.mds) validate_md(md, schema, by_name);
  for (const MergeRule& rule : set.merges) {
    const RelationDecl& decl = schema.require(rule.relation);
    std::set<std::string> seen;
    for (const auto& [attr, mf] : rule.mf_by_attr) {
      auto idx = decl.attr_index(attr);
      if (!idx) {
        fail(ErrorCode::Validation,
             "merge rule references unknown attribute " + rule.relation + "." + attr);
      }
      if (decl.attrs[*idx].is_key) {
        fail(ErrorCode::Validation,
             "merge rule cannot match the key attribute " + rule.relation + "." + attr);
      }
      if (!seen.insert(attr).second) {
        fail(ErrorCode::Validation,
             "merge rule lists attribute " + rule.relation + "." + attr + " twice");
      }
    }
  }
  InteractionReport report = check_interaction_free(set);
  if (!report.ok()) {
    fail(ErrorCode::Validation, "md set is not interaction-free: " + report.violations.front());
  }
  set.validated = true;
}

InteractionReport check_interaction_free(const MDSet& set) {
  InteractionReport report;
  for (const BlockingMD& md : set.mds) {
    for (const Cond& cond : md.conds) {
      const auto* sim = std::get_if<SimAtom>(&cond);
      if (!sim) continue;
      if (sim->left.attr == kBlockAttr || sim->right.attr == kBlockAttr) {
        report.violations.push_back(
            "md " + std::to_string(md.id) +
            ": similarity over block numbers feeds an attribute the rules modify");
      }
    }
  }
  return report;
}

}  // namespace erblox::md
