// Exhaustive hard-margin separator for small point sets: tries every
// candidate support set, solves the KKT equalities, and keeps the feasible
// hyperplane of least weight norm.
#pragma once

#include <vector>

namespace erblox::testing {

struct MaxMarginResult {
  bool found = false;
  std::vector<double> w;
  double b = 0.0;
};

// Labels are 0/1. Exact on separable sets small enough to enumerate
// (intended for n <= 20); found is false when no separator exists.
MaxMarginResult max_margin(const std::vector<std::vector<double>>& x,
                           const std::vector<int>& y);

}  // namespace erblox::testing
