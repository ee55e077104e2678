// Blocking-quality metrics: reduction ratio, recall, precision over
// candidate pairs versus a gold standard, evaluated before merging.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "core/instance.h"

namespace erblox {

using PairSet = std::set<std::pair<int64_t, int64_t>>;  // canonical: rid1 < rid2

// 1 - candidates / (n(n-1)/2); requires n >= 2.
double reduction_ratio(size_t candidates, size_t n);

struct Quality {
  std::optional<double> recall;     // |candidates ∩ gold| / |gold|; 0/0 undefined
  std::optional<double> precision;  // |candidates ∩ gold| / |candidates|
  size_t true_positives = 0;
};

Quality blocking_quality(const PairSet& candidates, const PairSet& gold);

struct RelationMetrics {
  size_t records = 0;
  size_t total_pairs = 0;  // n(n-1)/2
  size_t candidates = 0;
  size_t gold = 0;
  size_t true_positives = 0;
  std::optional<double> reduction;  // undefined when records < 2
  std::optional<double> recall;
  std::optional<double> precision;
};

// Metrics per relation with gold pairs, plus a "total" aggregate over them.
std::map<std::string, RelationMetrics> compute_metrics(
    const Instance& instance,
    const std::map<std::string, std::vector<std::pair<int64_t, int64_t>>>& candidates,
    const std::map<std::string, PairSet>& gold);

// "<prefix>.<relation>.<field>=<value>" lines, sorted; ratios %.6f,
// undefined ratios render as "undefined".
std::string render_metrics(const std::string& prefix,
                           const std::map<std::string, RelationMetrics>& metrics);

// Parses TSV "rid1<TAB>rid2" lines ('#' comments allowed) into canonical
// pairs; every rid must exist in the relation.
PairSet load_pair_set(const std::string& text, const RelationInstance& rel);

// Parses TSV "rid1<TAB>rid2<TAB>label" with labels 0/1; rids must exist.
std::vector<std::tuple<int64_t, int64_t, int>> load_labeled_pairs(const std::string& text,
                                                                  const RelationInstance& rel);

}  // namespace erblox
