#pragma once

// High-precision reference evaluations of the closed-form bounds.

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include "fbasin/bounds.hpp"

namespace oracle {

using High = boost::multiprecision::cpp_dec_float_50;

inline High q_count(int n, int m) {
  return boost::math::binomial_coefficient<High>(static_cast<unsigned>(m + n - 1), static_cast<unsigned>(n - 1));
}

inline High c_high(const fbasin::AttractionParams& prm, int p) {
  const High base = sqrt(High(prm.n)) / std::min(1.0, prm.delta);
  High total = 0;
  for (int m = 2; m <= p - 1; ++m) total += High(prm.n) * prm.n * q_count(prm.n, m) * q_count(prm.n, m) * pow(base, m);
  return High(prm.r) * total;
}

// Direct high-precision evaluation of gamma.
inline High gamma_high(const fbasin::AttractionParams& prm, int p) {
  const int n = prm.n;
  High fact = 1;
  for (int k = 2; k <= n - 1; ++k) fact *= k;
  const High k = sqrt(High(n)) * fact * pow(1 + c_high(prm, p), n - 1) / pow(High(prm.s), n);
  const long terms = static_cast<long>(std::pow(p - 1, (n - 1) * (n - 1)));
  High total = 0;
  for (long i = 1; i <= terms; ++i) total += pow(q_count(n, static_cast<int>(i)) * sqrt(High(n)) * k, static_cast<int>(i));
  return total;
}

inline High dim2_high(const fbasin::AttractionParams& prm, int p) {
  const High base = sqrt(High(2)) / std::min(1.0, prm.delta);
  const High x = High(2) / (High(prm.s) * prm.s) * (1 + 2 * High(prm.r) * p * pow(base, p - 1));
  High total = 0;
  for (int i = 1; i <= p - 1; ++i) total += High(i + 1) * pow(x, i);
  return log(total) / log(1 / High(prm.r)) + 1;
}

}  // namespace oracle
