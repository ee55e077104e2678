// Pipeline config parsing.
#include "core/config.h"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "core/csv.h"
#include "core/error.h"
#include "core/value.h"

namespace erblox {

BlockingMode parse_blocking_mode(const std::string& name) {
  if (name == "standard") return BlockingMode::Standard;
  if (name == "md") return BlockingMode::MD;
  if (name == "both") return BlockingMode::Both;
  fail(ErrorCode::Parse, "unknown blocking mode: " + name);
}

std::string blocking_mode_name(BlockingMode mode) {
  switch (mode) {
    case BlockingMode::Standard: return "standard";
    case BlockingMode::MD: return "md";
    case BlockingMode::Both: return "both";
  }
  return "?";
}

namespace {

[[noreturn]] void bad(size_t lineno, const std::string& msg) {
  fail(ErrorCode::Parse, "config line " + std::to_string(lineno) + ": " + msg);
}

double parse_real(const std::string& s, size_t lineno) {
  const char* c = s.c_str();
  char* end = nullptr;
  double v = std::strtod(c, &end);
  if (end == c || *end != '\0') bad(lineno, "bad number: " + s);
  return v;
}

std::pair<std::string, std::string> split_attr(const std::string& s, size_t lineno) {
  size_t dot = s.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == s.size())
    bad(lineno, "expected Relation.Attribute, got: " + s);
  return {s.substr(0, dot), s.substr(dot + 1)};
}

// Consumes "Rel.Attr" or "Rel.Attr -> Other.Attr" starting at tokens[i].
FeaturePath parse_path(const std::vector<std::string>& tokens, size_t& i, size_t lineno) {
  if (i >= tokens.size()) bad(lineno, "feature path missing");
  FeaturePath p;
  auto [rel, attr] = split_attr(tokens[i++], lineno);
  (void)rel;  // the slot's relation is checked against the declared one later
  p.attr = attr;
  if (i < tokens.size() && tokens[i] == "->") {
    ++i;
    if (i >= tokens.size()) bad(lineno, "feature path join target missing");
    auto [jrel, jattr] = split_attr(tokens[i++], lineno);
    p.join_relation = jrel;
    p.join_attr = jattr;
  }
  return p;
}

}  // namespace

PipelineConfig load_pipeline_config(const std::string& path) {
  PipelineConfig cfg;
  std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return (fp.is_absolute() ? fp : base / fp).lexically_normal().string();
  };

  std::istringstream in(read_file(path));
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty() || tok[0][0] == '#') continue;
    const std::string& d = tok[0];
    auto need = [&](size_t n) {
      if (tok.size() != n + 1) bad(lineno, d + " takes " + std::to_string(n) + " arguments");
    };
    if (d == "schema") {
      need(1);
      cfg.schema_path = resolve(tok[1]);
    } else if (d == "data") {
      need(2);
      for (const auto& [rel, p] : cfg.data) {
        (void)p;
        if (rel == tok[1]) bad(lineno, "duplicate data file for " + tok[1]);
      }
      cfg.data.emplace_back(tok[1], resolve(tok[2]));
    } else if (d == "mds") {
      need(1);
      cfg.mds_path = resolve(tok[1]);
    } else if (d == "sim") {
      need(4);
      SimSpec spec;
      spec.name = tok[1];
      std::tie(spec.relation, spec.attribute) = split_attr(tok[2], lineno);
      spec.kernel = parse_kernel(tok[3]);
      spec.threshold = parse_real(tok[4], lineno);
      if (spec.threshold < 0.0 || spec.threshold > 1.0)
        bad(lineno, "threshold must be in [0,1]");
      for (const SimSpec& s : cfg.sims)
        if (s.name == spec.name) bad(lineno, "duplicate sim name: " + spec.name);
      cfg.sims.push_back(std::move(spec));
    } else if (d == "feature") {
      if (tok.size() < 2) bad(lineno, "feature needs a relation");
      FeatureSlot slot;
      slot.relation = tok[1];
      size_t i = 2;
      slot.primary = parse_path(tok, i, lineno);
      if (i < tok.size() && tok[i] == "else") {
        ++i;
        slot.fallback = parse_path(tok, i, lineno);
      }
      if (i >= tok.size() || tok[i] != "using") bad(lineno, "feature expects 'using <kernel>'");
      ++i;
      if (i >= tok.size()) bad(lineno, "feature kernel missing");
      slot.kernel = parse_kernel(tok[i++]);
      if (i >= tok.size() || tok[i] != "policy") bad(lineno, "feature expects 'policy <name>'");
      ++i;
      if (i >= tok.size()) bad(lineno, "feature policy missing");
      slot.policy = parse_slot_policy(tok[i++]);
      if (i != tok.size()) bad(lineno, "trailing tokens after feature policy");
      cfg.features.push_back(std::move(slot));
    } else if (d == "training" || d == "gold") {
      need(2);
      auto& m = d == "training" ? cfg.training : cfg.gold;
      if (!m.emplace(tok[1], resolve(tok[2])).second)
        bad(lineno, "duplicate " + d + " file for " + tok[1]);
    } else if (d == "standard-key") {
      if (tok.size() < 3) bad(lineno, "standard-key needs a relation and at least one sim name");
      std::vector<std::string> names(tok.begin() + 2, tok.end());
      if (!cfg.standard_keys.emplace(tok[1], std::move(names)).second)
        bad(lineno, "duplicate standard-key for " + tok[1]);
    } else if (d == "lambda") {
      need(1);
      cfg.lambda = parse_real(tok[1], lineno);
      if (cfg.lambda < 0.0) bad(lineno, "lambda must be non-negative");
    } else if (d == "epochs") {
      need(1);
      int64_t v = parse_int(tok[1], "epochs");
      if (v < 0) bad(lineno, "epochs must be non-negative");
      cfg.epochs = (int)v;
    } else if (d == "split") {
      need(1);
      cfg.split = parse_real(tok[1], lineno);
      if (cfg.split < 0.0 || cfg.split > 1.0) bad(lineno, "split must be in [0,1]");
    } else if (d == "seed") {
      need(1);
      int64_t v = parse_int(tok[1], "seed");
      if (v < 0) bad(lineno, "seed must be non-negative");
      cfg.seed = (uint64_t)v;
    } else if (d == "blocking") {
      need(1);
      cfg.blocking = parse_blocking_mode(tok[1]);
    } else if (d == "simcache-filter") {
      need(1);
      if (tok[1] == "on") cfg.simcache_filter = true;
      else if (tok[1] == "off") cfg.simcache_filter = false;
      else bad(lineno, "simcache-filter expects on or off");
    } else {
      bad(lineno, "unknown directive: " + d);
    }
  }
  return cfg;
}

}  // namespace erblox
