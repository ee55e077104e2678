// Metric computation, rendering, and pair-file parsing.
#include "core/metrics.h"

#include <cstdio>
#include <sstream>
#include <tuple>

#include "core/error.h"

namespace erblox {

double reduction_ratio(size_t candidates, size_t n) {
  if (n < 2) fail(ErrorCode::Arg, "reduction ratio needs at least two records");
  double total = (double)n * (double)(n - 1) / 2.0;
  return 1.0 - (double)candidates / total;
}

Quality blocking_quality(const PairSet& candidates, const PairSet& gold) {
  Quality q;
  for (const auto& p : candidates)
    if (gold.count(p)) ++q.true_positives;
  if (!gold.empty()) q.recall = (double)q.true_positives / (double)gold.size();
  if (!candidates.empty()) q.precision = (double)q.true_positives / (double)candidates.size();
  return q;
}

std::map<std::string, RelationMetrics> compute_metrics(
    const Instance& instance,
    const std::map<std::string, std::vector<std::pair<int64_t, int64_t>>>& candidates,
    const std::map<std::string, PairSet>& gold) {
  std::map<std::string, RelationMetrics> out;
  RelationMetrics total;
  for (const auto& [name, gold_pairs] : gold) {
    const RelationInstance& rel = instance.require(name);
    RelationMetrics m;
    m.records = rel.rows.size();
    m.total_pairs = m.records * (m.records - 1) / 2;
    PairSet cand;
    auto it = candidates.find(name);
    if (it != candidates.end()) cand.insert(it->second.begin(), it->second.end());
    m.candidates = cand.size();
    m.gold = gold_pairs.size();
    Quality q = blocking_quality(cand, gold_pairs);
    m.true_positives = q.true_positives;
    m.recall = q.recall;
    m.precision = q.precision;
    if (m.records >= 2) m.reduction = reduction_ratio(m.candidates, m.records);
    out[name] = m;

    total.records += m.records;
    total.total_pairs += m.total_pairs;
    total.candidates += m.candidates;
    total.gold += m.gold;
    total.true_positives += m.true_positives;
  }
  // Aggregate ratios pool the counts, not the per-relation ratios.
  if (total.total_pairs > 0)
    total.reduction = 1.0 - (double)total.candidates / (double)total.total_pairs;
  if (total.gold > 0) total.recall = (double)total.true_positives / (double)total.gold;
  if (total.candidates > 0)
    total.precision = (double)total.true_positives / (double)total.candidates;
  out["total"] = total;
  return out;
}

std::string render_metrics(const std::string& prefix,
                           const std::map<std::string, RelationMetrics>& metrics) {
  std::ostringstream out;
  auto ratio = [](const std::optional<double>& v) -> std::string {
    if (!v) return "undefined";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
  };
  for (const auto& [name, m] : metrics) {
    std::string k = prefix + "." + name + ".";
    out << k << "candidates=" << m.candidates << '\n';
    out << k << "gold=" << m.gold << '\n';
    out << k << "precision=" << ratio(m.precision) << '\n';
    out << k << "recall=" << ratio(m.recall) << '\n';
    out << k << "records=" << m.records << '\n';
    out << k << "reduction_ratio=" << ratio(m.reduction) << '\n';
    out << k << "total_pairs=" << m.total_pairs << '\n';
    out << k << "true_positives=" << m.true_positives << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::vector<std::string>> tsv_rows(const std::string& text, size_t min_cols,
                                               size_t max_cols, const char* what) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<std::string> cols;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab == std::string::npos ? std::string::npos
                                                                 : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() < min_cols || cols.size() > max_cols)
      fail(ErrorCode::Parse,
           std::string(what) + " line " + std::to_string(lineno) + ": wrong column count");
    rows.push_back(std::move(cols));
  }
  return rows;
}

int64_t known_rid(const std::string& s, const RelationInstance& rel, const char* what) {
  int64_t rid = parse_int(s, what);
  if (!rel.find(rid))
    fail(ErrorCode::Validation,
         std::string(what) + " references unknown rid " + s + " in " + rel.decl->name);
  return rid;
}

}  // namespace

PairSet load_pair_set(const std::string& text, const RelationInstance& rel) {
  PairSet out;
  for (const auto& cols : tsv_rows(text, 2, 2, "pair file")) {
    int64_t a = known_rid(cols[0], rel, "pair file");
    int64_t b = known_rid(cols[1], rel, "pair file");
    if (a == b) fail(ErrorCode::Validation, "pair file lists a record with itself");
    out.emplace(std::min(a, b), std::max(a, b));
  }
  return out;
}

std::vector<std::tuple<int64_t, int64_t, int>> load_labeled_pairs(const std::string& text,
                                                                  const RelationInstance& rel) {
  std::vector<std::tuple<int64_t, int64_t, int>> out;
  for (const auto& cols : tsv_rows(text, 3, 3, "training file")) {
    int64_t a = known_rid(cols[0], rel, "training file");
    int64_t b = known_rid(cols[1], rel, "training file");
    int64_t label = parse_int(cols[2], "training label");
    if (label != 0 && label != 1)
      fail(ErrorCode::Validation, "training labels must be 0 or 1");
    out.emplace_back(a, b, (int)label);
  }
  return out;
}

}  // namespace erblox
