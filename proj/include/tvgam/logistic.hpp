#pragma once

#include <cmath>

namespace tvgam {

inline double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Negative log-likelihood of a single binary outcome under logit z.
inline double logistic_loss(double y, double z) { return softplus(z) - y * z; }

// Negative gradient of logistic_loss with respect to z.
inline double logistic_residual(double y, double z) { return y - sigmoid(z); }

inline double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace tvgam
