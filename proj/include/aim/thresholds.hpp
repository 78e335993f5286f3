#pragma once

#include <cmath>

#include "aim/errors.hpp"

namespace aim {

// Approximation guarantees and gap ceilings, in their per-budget (finite-k)
// forms. Each function's k -> infinity limit is exposed alongside it; the
// per-k form is the binding one at any finite budget.

// Non-adaptive greedy vs the adaptive optimum: (1/2)(1 - (1 - 1/k)^k).
inline double nonadaptive_greedy_factor(int k) {
  if (k < 1) throw Error("budget k must be positive");
  return 0.5 * (1.0 - std::pow(1.0 - 1.0 / k, k));
}

// Limit (1/2)(1 - 1/e) ~= 0.3160.
inline double nonadaptive_greedy_factor_limit() { return 0.5 * (1.0 - std::exp(-1.0)); }

// Adaptive greedy vs the adaptive optimum: 1 - (1 - 1/(2k))^k.
inline double adaptive_greedy_factor(int k) {
  if (k < 1) throw Error("budget k must be positive");
  return 1.0 - std::pow(1.0 - 1.0 / (2.0 * k), k);
}

// Limit 1 - 1/sqrt(e) ~= 0.3934.
inline double adaptive_greedy_factor_limit() { return 1.0 - std::exp(-0.5); }

// Non-adaptive greedy vs the non-adaptive optimum: 1 - 1/e, from monotone
// submodularity of the spread function.
inline double submodular_greedy_factor() { return 1.0 - std::exp(-1.0); }

// Adaptivity-gap ceiling per budget: 2 / (1 - (1 - 1/k)^k), increasing in k.
inline double gap_ceiling(int k) {
  if (k < 1) throw Error("budget k must be positive");
  return 2.0 / (1.0 - std::pow(1.0 - 1.0 / k, k));
}

// Global ceiling 2e/(e-1) ~= 3.164.
inline double gap_ceiling_limit() { return 2.0 * std::exp(1.0) / (std::exp(1.0) - 1.0); }

// Stochastic submodular greedy vs the adaptive optimum: (1/2)(1 - (1 - 2/k)^k)
// for k >= 2.
inline double smsm_greedy_factor(int k) {
  if (k < 2) throw Error("budget k must be at least 2");
  return 0.5 * (1.0 - std::pow(1.0 - 2.0 / k, k));
}

// Limit (1/2)(1 - 1/e^2) ~= 0.4323.
inline double smsm_greedy_factor_limit() { return 0.5 * (1.0 - std::exp(-2.0)); }

}  // namespace aim
