#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace nfg {

// Dense d-dimensional iterate / gradient storage.
using ParamVector = std::vector<double>;

inline ParamVector zeros(std::size_t d) { return ParamVector(d, 0.0); }

inline bool all_finite(const ParamVector& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline double dot(const ParamVector& a, const ParamVector& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double norm_sq(const ParamVector& v) { return dot(v, v); }

inline double norm(const ParamVector& v) { return std::sqrt(norm_sq(v)); }

inline double inf_norm(const ParamVector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// y += a * x
inline void axpy(ParamVector& y, double a, const ParamVector& x) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

inline ParamVector sub(const ParamVector& a, const ParamVector& b) {
  ParamVector r(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] - b[k];
  return r;
}

}  // namespace nfg
