// Similarity kernels keyed by domain tag, and the materialized cache of
// above-threshold value pairs consulted by blocking and classification.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/instance.h"
#include "core/schema.h"
#include "core/value.h"

namespace erblox {

enum class Kernel { TfIdfCosine, JaroWinkler, NumericEdit };

Kernel parse_kernel(const std::string& name);
std::string kernel_name(Kernel kernel);
bool kernel_matches_tag(Kernel kernel, DomainTag tag);

// Lowercased runs of ASCII alphanumerics.
std::vector<std::string> tokenize(const std::string& text);

struct DfTable {
  size_t doc_count = 0;                // non-null rows in the column
  std::map<std::string, size_t> df;    // rows containing each token
};

DfTable build_df_table(const RelationInstance& rel, size_t attr_idx);

// Cosine of tf-idf vectors, tf = raw count, idf = 1 + ln(N/df).
// Both inputs tokenless is defined as 0.0.
double tfidf_cosine(const std::string& a, const std::string& b, const DfTable& df);

// Standard Jaro similarity with the Winkler prefix boost (prefix <= 4,
// scale 0.1, boost applied when the base similarity exceeds 0.7).
// Either input empty scores 0.0.
double jaro_winkler(const std::string& a, const std::string& b);

size_t levenshtein(const std::string& a, const std::string& b);

// 1 - L(d(a), d(b)) / max(|d(a)|, |d(b)|) over decimal renderings.
double numeric_edit(int64_t a, int64_t b);

struct SimSpec {
  std::string name;
  std::string relation;
  std::string attribute;
  Kernel kernel = Kernel::TfIdfCosine;
  double threshold = 0.0;
};

struct ValueLess {
  bool operator()(const Value& a, const Value& b) const { return value_less(a, b); }
};

struct ValuePairLess {
  bool operator()(const std::pair<Value, Value>& a, const std::pair<Value, Value>& b) const {
    if (value_less(a.first, b.first)) return true;
    if (value_less(b.first, a.first)) return false;
    return value_less(a.second, b.second);
  }
};

using ValuePairMap = std::map<std::pair<Value, Value>, double, ValuePairLess>;

struct SpecCache {
  SimSpec spec;
  ValuePairMap pairs;  // canonical order: first < second; distinct values only
};

struct SimCache {
  std::map<std::string, SpecCache> by_spec;
  size_t tokenless_values = 0;  // text values with no tokens seen during the build

  bool has(const std::string& spec) const { return by_spec.count(spec) != 0; }
  const SpecCache& require(const std::string& spec) const;

  // Equal non-null values are implied similar at weight 1.0 and never stored.
  bool similar(const std::string& spec, const Value& a, const Value& b) const;
  std::optional<double> weight(const std::string& spec, const Value& a, const Value& b) const;
};

// Materializes, per spec, every unordered pair of distinct non-null column
// values with weight >= threshold. With pair_filter set, cheap exact
// prefilters skip pairs that cannot reach the threshold.
SimCache build_sim_cache(const Instance& instance, const std::vector<SimSpec>& specs,
                         bool pair_filter = false);

// TSV: relation attribute value1 value2 weight, deduplicated across specs.
std::string dump_sim_cache(const SimCache& cache);

// Kernel dispatch on typed values; df required for the tf-idf kernel.
double kernel_weight(Kernel kernel, const Value& a, const Value& b, const DfTable* df);

}  // namespace erblox
