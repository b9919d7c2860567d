#pragma once

#include <cmath>
#include <limits>
#include <span>

#include <Eigen/Dense>

namespace projgraph {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Logistic function 1 / (1 + exp(-x)), evaluated without overflow.
template <typename Scalar>
Scalar logistic(Scalar x) {
  using std::exp;
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-x));
  const Scalar e = exp(x);
  return e / (Scalar(1) + e);
}

template <typename Scalar>
Scalar logit(Scalar p) {
  using std::log;
  return log(p) - std::log1p(-p);
}

/// log(1 + exp(x)).
template <typename Scalar>
Scalar softplus(Scalar x) {
  using std::exp;
  using std::log1p;
  if (x > Scalar(0)) return x + log1p(exp(-x));
  return log1p(exp(x));
}

/// log(logistic(x)) = -softplus(-x).
template <typename Scalar>
Scalar log_logistic(Scalar x) {
  return -softplus(-x);
}

/// Max-shifted log-sum-exp, summed in index order.
template <typename Scalar>
Scalar logsumexp(std::span<const Scalar> values) {
  using std::exp;
  using std::log;
  Scalar hi = -std::numeric_limits<Scalar>::infinity();
  for (Scalar v : values) hi = v > hi ? v : hi;
  if (!std::isfinite(hi)) return hi;
  Scalar acc(0);
  for (Scalar v : values) acc += exp(v - hi);
  return hi + log(acc);
}

template <typename Derived>
typename Derived::Scalar logsumexp(const Eigen::DenseBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  const Scalar hi = values.maxCoeff();
  if (!std::isfinite(hi)) return hi;
  return hi + std::log((values.derived().array() - hi).exp().sum());
}

}  // namespace projgraph
