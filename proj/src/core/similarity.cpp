#include "core/similarity.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "core/error.h"

namespace erblox {

Kernel parse_kernel(const std::string& name) {
  if (name == "tfidf-cosine") return Kernel::TfIdfCosine;
  if (name == "jaro-winkler") return Kernel::JaroWinkler;
  if (name == "numeric-edit") return Kernel::NumericEdit;
  fail(ErrorCode::Validation, "unknown similarity kernel: " + name);
}

std::string kernel_name(Kernel kernel) {
  switch (kernel) {
    case Kernel::TfIdfCosine: return "tfidf-cosine";
    case Kernel::JaroWinkler: return "jaro-winkler";
    case Kernel::NumericEdit: return "numeric-edit";
  }
  return "?";
}

bool kernel_matches_tag(Kernel kernel, DomainTag tag) {
  switch (kernel) {
    case Kernel::TfIdfCosine: return tag == DomainTag::Text;
    case Kernel::JaroWinkler: return tag == DomainTag::ShortString;
    case Kernel::NumericEdit: return tag == DomainTag::Numeric;
  }
  return false;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current += char(std::tolower(c));
    } else if (!current.empty()) {
      tokens.push_back(current);
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(current);
  return tokens;
}

DfTable build_df_table(const RelationInstance& rel, size_t attr_idx) {
  DfTable table;
  for (const Record& rec : rel.rows) {
    const Value& v = rec.values[attr_idx];
    if (is_null(v)) continue;
    ++table.doc_count;
    std::set<std::string> seen;
    for (const std::string& tok : tokenize(value_to_string(v))) {
      if (seen.insert(tok).second) ++table.df[tok];
    }
  }
  return table;
}

namespace {

std::map<std::string, double> tfidf_vector(const std::string& text, const DfTable& df) {
  std::map<std::string, size_t> tf;
  for (const std::string& tok : tokenize(text)) ++tf[tok];
  std::map<std::string, double> out;
  double n = double(std::max<size_t>(df.doc_count, 1));
  for (const auto& [tok, count] : tf) {
    auto it = df.df.find(tok);
    double d = it == df.df.end() ? 1.0 : double(it->second);
    out[tok] = double(count) * (1.0 + std::log(n / d));
  }
  return out;
}

}  // namespace

double tfidf_cosine(const std::string& a, const std::string& b, const DfTable& df) {
  auto va = tfidf_vector(a, df);
  auto vb = tfidf_vector(b, df);
  if (va.empty() || vb.empty()) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [tok, w] : va) {
    na += w * w;
    auto it = vb.find(tok);
    if (it != vb.end()) dot += w * it->second;
  }
  for (const auto& [tok, w] : vb) nb += w * w;
  if (dot == 0.0) return 0.0;
  double sim = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::min(1.0, sim);  // clamp rounding noise on token-identical inputs
}

namespace {

double jaro(const std::string& a, const std::string& b) {
  if (a.empty() || b.empty()) return 0.0;
  if (a == b) return 1.0;
  const int la = int(a.size()), lb = int(b.size());
  int window = std::max(la, lb) / 2 - 1;
  if (window < 0) window = 0;
  std::vector<bool> amatch(la, false), bmatch(lb, false);
  int m = 0;
  for (int i = 0; i < la; ++i) {
    int lo = std::max(0, i - window);
    int hi = std::min(lb - 1, i + window);
    for (int j = lo; j <= hi; ++j) {
      if (!bmatch[j] && a[i] == b[j]) {
        amatch[i] = true;
        bmatch[j] = true;
        ++m;
        break;
      }
    }
  }
  if (m == 0) return 0.0;
  int transpositions = 0, k = 0;
  for (int i = 0; i < la; ++i) {
    if (!amatch[i]) continue;
    while (!bmatch[k]) ++k;
    if (a[i] != b[k]) ++transpositions;
    ++k;
  }
  transpositions /= 2;
  return (double(m) / la + double(m) / lb + double(m - transpositions) / m) / 3.0;
}

}  // namespace

double jaro_winkler(const std::string& a, const std::string& b) {
  double sim = jaro(a, b);
  if (sim > 0.7) {
    size_t limit = std::min({size_t(4), a.size(), b.size()});
    size_t prefix = 0;
    while (prefix < limit && a[prefix] == b[prefix]) ++prefix;
    sim += double(prefix) * 0.1 * (1.0 - sim);
  }
  return sim;
}

size_t levenshtein(const std::string& a, const std::string& b) {
  const size_t la = a.size(), lb = b.size();
  std::vector<size_t> prev(lb + 1), cur(lb + 1);
  for (size_t j = 0; j <= lb; ++j) prev[j] = j;
  for (size_t i = 1; i <= la; ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= lb; ++j) {
      size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[lb];
}

double numeric_edit(int64_t a, int64_t b) {
  if (a == b) return 1.0;
  std::string da = std::to_string(a), db = std::to_string(b);
  double dist = double(levenshtein(da, db));
  return 1.0 - dist / double(std::max(da.size(), db.size()));
}

const SpecCache& SimCache::require(const std::string& spec) const {
  auto it = by_spec.find(spec);
  if (it == by_spec.end()) fail(ErrorCode::State, "similarity cache missing spec: " + spec);
  return it->second;
}

std::optional<double> SimCache::weight(const std::string& spec, const Value& a,
                                       const Value& b) const {
  if (is_null(a) || is_null(b)) return std::nullopt;
  const SpecCache& sc = require(spec);
  if (a == b) {
    if (1.0 >= sc.spec.threshold) return 1.0;
    return std::nullopt;
  }
  std::pair<Value, Value> key = value_less(a, b) ? std::make_pair(a, b) : std::make_pair(b, a);
  auto it = sc.pairs.find(key);
  if (it == sc.pairs.end()) return std::nullopt;
  return it->second;
}

bool SimCache::similar(const std::string& spec, const Value& a, const Value& b) const {
  return weight(spec, a, b).has_value();
}

namespace {

// Winkler boost is capped, so jw <= 0.4 + 0.6 * jaro and jaro cannot exceed
// (2 + shorter/longer) / 3. Pairs whose bound falls below the threshold are skipped.
bool jw_length_bound_below(size_t la, size_t lb, double threshold) {
  double shorter = double(std::min(la, lb));
  double longer = double(std::max(la, lb));
  if (longer == 0.0) return true;
  double jaro_max = (2.0 + shorter / longer) / 3.0;
  return 0.4 + 0.6 * jaro_max < threshold;
}

}  // namespace

SimCache build_sim_cache(const Instance& instance, const std::vector<SimSpec>& specs,
                         bool pair_filter) {
  SimCache cache;
  for (const SimSpec& spec : specs) {
    if (cache.by_spec.count(spec.name)) {
      fail(ErrorCode::Validation, "duplicate similarity spec name: " + spec.name);
    }
    const RelationInstance& rel = instance.require(spec.relation);
    auto idx = rel.decl->attr_index(spec.attribute);
    if (!idx) {
      fail(ErrorCode::Validation,
           "similarity spec " + spec.name + " references unknown attribute " + spec.relation +
               "." + spec.attribute);
    }
    SpecCache sc;
    sc.spec = spec;
    std::set<Value, ValueLess> distinct;
    for (const Record& rec : rel.rows) {
      const Value& v = rec.values[*idx];
      if (!is_null(v)) distinct.insert(v);
    }
    std::vector<Value> values(distinct.begin(), distinct.end());
    DfTable df;
    if (spec.kernel == Kernel::TfIdfCosine) {
      df = build_df_table(rel, *idx);
      for (const Value& v : values) {
        if (tokenize(value_to_string(v)).empty()) ++cache.tokenless_values;
      }
    }
    if (pair_filter && spec.kernel == Kernel::TfIdfCosine && spec.threshold > 0.0) {
      // Inverted index: only pairs sharing a token can score above zero.
      std::map<std::string, std::vector<size_t>> by_token;
      for (size_t i = 0; i < values.size(); ++i) {
        std::set<std::string> seen;
        for (const std::string& tok : tokenize(value_to_string(values[i]))) {
          if (seen.insert(tok).second) by_token[tok].push_back(i);
        }
      }
      std::set<std::pair<size_t, size_t>> candidates;
      for (const auto& [tok, ids] : by_token) {
        for (size_t x = 0; x < ids.size(); ++x) {
          for (size_t y = x + 1; y < ids.size(); ++y) {
            candidates.insert({ids[x], ids[y]});
          }
        }
      }
      for (const auto& [x, y] : candidates) {
        double w = tfidf_cosine(value_to_string(values[x]), value_to_string(values[y]), df);
        if (w >= spec.threshold) sc.pairs[{values[x], values[y]}] = w;
      }
    } else {
      for (size_t x = 0; x < values.size(); ++x) {
        for (size_t y = x + 1; y < values.size(); ++y) {
          if (pair_filter && spec.kernel == Kernel::JaroWinkler && spec.threshold > 0.0) {
            if (jw_length_bound_below(value_to_string(values[x]).size(),
                                      value_to_string(values[y]).size(), spec.threshold)) {
              continue;
            }
          }
          double w = kernel_weight(spec.kernel, values[x], values[y],
                                   spec.kernel == Kernel::TfIdfCosine ? &df : nullptr);
          if (w >= spec.threshold) sc.pairs[{values[x], values[y]}] = w;
        }
      }
    }
    cache.by_spec.emplace(spec.name, std::move(sc));
  }
  return cache;
}

std::string dump_sim_cache(const SimCache& cache) {
  // Dedupe across specs sharing a column; weights agree by construction.
  std::map<std::tuple<std::string, std::string, std::string, std::string>, double> rows;
  for (const auto& [name, sc] : cache.by_spec) {
    for (const auto& [pair, w] : sc.pairs) {
      rows[{sc.spec.relation, sc.spec.attribute, value_to_string(pair.first),
            value_to_string(pair.second)}] = w;
    }
  }
  std::ostringstream out;
  for (const auto& [key, w] : rows) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", w);
    out << std::get<0>(key) << '\t' << std::get<1>(key) << '\t' << std::get<2>(key) << '\t'
        << std::get<3>(key) << '\t' << buf << '\n';
  }
  return out.str();
}

double kernel_weight(Kernel kernel, const Value& a, const Value& b, const DfTable* df) {
  switch (kernel) {
    case Kernel::TfIdfCosine: {
      static const DfTable empty;
      return tfidf_cosine(value_to_string(a), value_to_string(b), df ? *df : empty);
    }
    case Kernel::JaroWinkler:
      return jaro_winkler(value_to_string(a), value_to_string(b));
    case Kernel::NumericEdit:
      if (!std::holds_alternative<int64_t>(a) || !std::holds_alternative<int64_t>(b)) {
        fail(ErrorCode::Validation, "numeric-edit kernel applied to non-numeric values");
      }
      return numeric_edit(std::get<int64_t>(a), std::get<int64_t>(b));
  }
  return 0.0;
}

}  // namespace erblox
