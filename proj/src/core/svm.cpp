// Seeded subgradient training, prediction, and model serialization.
#include "core/svm.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <random>
#include <sstream>

#include "core/error.h"

namespace erblox {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_shapes(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                  size_t dim) {
  if (x.empty()) fail(ErrorCode::Validation, "empty training set");
  if (x.size() != y.size()) fail(ErrorCode::Arg, "sample/label count mismatch");
  for (const auto& row : x)
    if (row.size() != dim) fail(ErrorCode::Arg, "inconsistent feature dimension");
  for (int label : y)
    if (label != 0 && label != 1) fail(ErrorCode::Validation, "labels must be 0 or 1");
}

}  // namespace

double svm_objective(const SvmModel& model, const std::vector<std::vector<double>>& x,
                     const std::vector<int>& y) {
  check_shapes(x, y, model.weights.size());
  double hinge = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double yi = y[i] ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - yi * (dot(model.weights, x[i]) + model.bias));
  }
  return 0.5 * model.lambda * dot(model.weights, model.weights) + hinge / (double)x.size();
}

double svm_decision(const SvmModel& model, const std::vector<double>& x) {
  if (x.size() != model.weights.size()) fail(ErrorCode::Arg, "feature dimension mismatch");
  return dot(model.weights, x) + model.bias;
}

int svm_predict(const SvmModel& model, const std::vector<double>& x) {
  return svm_decision(model, x) > 0.0 ? 1 : 0;
}

double svm_accuracy(const SvmModel& model, const std::vector<std::vector<double>>& x,
                    const std::vector<int>& y) {
  check_shapes(x, y, model.weights.size());
  size_t hits = 0;
  for (size_t i = 0; i < x.size(); ++i)
    if (svm_predict(model, x[i]) == y[i]) ++hits;
  return (double)hits / (double)x.size();
}

TrainResult train_svm(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                      double lambda, int epochs, uint64_t seed) {
  if (x.empty()) fail(ErrorCode::Validation, "empty training set");
  size_t dim = x[0].size();
  check_shapes(x, y, dim);
  if (lambda < 0.0) fail(ErrorCode::Arg, "lambda must be non-negative");
  if (epochs < 0) fail(ErrorCode::Arg, "epochs must be non-negative");

  bool has_pos = false, has_neg = false;
  for (int label : y) (label ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) fail(ErrorCode::Validation, "training data has a single class");

  TrainResult res;
  res.model.lambda = lambda;
  res.model.weights.assign(dim, 0.0);

  // Contradictory labels on identical vectors make the hinge loss floor
  // positive; flag it rather than chase a separation that cannot exist.
  {
    std::vector<size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), (size_t)0);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
      if (x[a] != x[b]) return x[a] < x[b];
      return y[a] < y[b];
    });
    for (size_t i = 1; i < idx.size(); ++i)
      if (x[idx[i - 1]] == x[idx[i]] && y[idx[i - 1]] != y[idx[i]]) res.degenerate = true;
  }

  std::mt19937_64 rng(seed);
  std::vector<size_t> order(x.size());
  std::iota(order.begin(), order.end(), (size_t)0);

  SvmModel cur = res.model;
  double best = svm_objective(cur, x, y);
  res.losses.push_back(best);

  // Step size 1/(1 + lambda*t) keeps the first steps near unit size (a raw
  // 1/(lambda*t) start catapults the unregularized bias) while retaining the
  // 1/t decay that settles the weights. The optimum's weights must satisfy
  // (lambda/2)||w||^2 <= objective(0) <= 1, so projecting back onto the
  // sqrt(2/lambda) ball bounds excursions without ever excluding it.
  uint64_t step = 0;
  double radius2 = lambda > 0.0 ? 2.0 / lambda : 0.0;
  for (int e = 0; e < epochs; ++e) {
    // Explicit Fisher-Yates: std::shuffle's draw sequence is not pinned.
    for (size_t i = order.size() - 1; i > 0; --i) {
      size_t j = (size_t)(rng() % (uint64_t)(i + 1));
      std::swap(order[i], order[j]);
    }
    for (size_t k : order) {
      double eta = 1.0 / (1.0 + lambda * (double)++step);
      double yi = y[k] ? 1.0 : -1.0;
      double margin = yi * (dot(cur.weights, x[k]) + cur.bias);
      double decay = 1.0 - eta * lambda;
      for (double& w : cur.weights) w *= decay;
      if (margin < 1.0) {
        for (size_t d = 0; d < dim; ++d) cur.weights[d] += eta * yi * x[k][d];
        cur.bias += eta * yi;
      }
      if (lambda > 0.0) {
        double norm2 = dot(cur.weights, cur.weights);
        if (norm2 > radius2) {
          double f = std::sqrt(radius2 / norm2);
          for (double& w : cur.weights) w *= f;
        }
      }
    }
    // The retained model only ever changes for a strictly better objective,
    // so the recorded per-epoch losses are non-increasing.
    double obj = svm_objective(cur, x, y);
    if (obj < best) {
      best = obj;
      res.model = cur;
    }
    res.losses.push_back(best);
    ++res.epochs_run;
  }
  return res;
}

std::string save_model(const SvmModel& model) {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", model.lambda);
  out << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", model.bias);
  out << buf << '\n';
  for (double w : model.weights) {
    std::snprintf(buf, sizeof buf, "%.17g", w);
    out << buf << '\n';
  }
  return out.str();
}

SvmModel load_model(const std::string& text) {
  std::istringstream in(text);
  std::vector<double> nums;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const char* s = line.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end == s) fail(ErrorCode::Parse, "bad model line: " + line);
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    if (*end != '\0') fail(ErrorCode::Parse, "bad model line: " + line);
    nums.push_back(v);
  }
  if (nums.size() < 2) fail(ErrorCode::Parse, "model file needs lambda, bias, and weights");
  SvmModel m;
  m.lambda = nums[0];
  m.bias = nums[1];
  m.weights.assign(nums.begin() + 2, nums.end());
  return m;
}

}  // namespace erblox
