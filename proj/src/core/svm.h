// Linear SVM trained by seeded stochastic subgradient descent; the best
// iterate by exact objective is retained, so recorded losses never increase.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace erblox {

struct SvmModel {
  double lambda = 0.01;
  double bias = 0.0;
  std::vector<double> weights;
};

// (lambda/2)||w||^2 + mean hinge loss; labels are 0/1.
double svm_objective(const SvmModel& model, const std::vector<std::vector<double>>& x,
                     const std::vector<int>& y);

double svm_decision(const SvmModel& model, const std::vector<double>& x);

// 1 iff the decision value is strictly positive; a tie scores 0.
int svm_predict(const SvmModel& model, const std::vector<double>& x);

double svm_accuracy(const SvmModel& model, const std::vector<std::vector<double>>& x,
                    const std::vector<int>& y);

struct TrainResult {
  SvmModel model;  // best iterate seen, by exact objective
  // losses[0] is the zero-model objective; losses[e+1] the objective of the
  // best iterate retained through epoch e. Non-increasing by construction.
  std::vector<double> losses;
  int epochs_run = 0;
  // True when identical feature vectors carry contradictory labels; the
  // returned model is then whatever the descent settled on.
  bool degenerate = false;
};

TrainResult train_svm(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                      double lambda, int epochs, uint64_t seed);

// Text round-trip: lambda, bias, then one weight per line, %.17g each.
std::string save_model(const SvmModel& model);
SvmModel load_model(const std::string& text);

}  // namespace erblox
