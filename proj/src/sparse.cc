#include "crossres/sparse.h"

#include <algorithm>
#include <cmath>

namespace crossres {

SparseVector to_sparse(const std::map<uint32_t, double>& values) {
  SparseVector out;
  out.reserve(values.size());
  for (const auto& [index, value] : values)
    if (value != 0.0) out.push_back({index, value});
  return out;
}

double dot(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->index < j->index) {
      ++i;
    } else if (j->index < i->index) {
      ++j;
    } else {
      sum += i->value * j->value;
      ++i, ++j;
    }
  }
  return sum;
}

double squared_norm(const SparseVector& v) {
  double sum = 0.0;
  for (const auto& e : v) sum += e.value * e.value;
  return sum;
}

SparseVector l2_normalized(SparseVector v) {
  const double norm = std::sqrt(squared_norm(v));
  if (norm == 0.0) return v;
  for (auto& e : v) e.value /= norm;
  return v;
}

SparseVector hadamard(const SparseVector& a, const SparseVector& b) {
  SparseVector out;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->index < j->index) {
      ++i;
    } else if (j->index < i->index) {
      ++j;
    } else {
      const double p = i->value * j->value;
      if (p != 0.0) out.push_back({i->index, p});
      ++i, ++j;
    }
  }
  return out;
}

double cosine(const SparseVector& a, const SparseVector& b) {
  const double aa = squared_norm(a);
  const double bb = squared_norm(b);
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return std::clamp(dot(a, b) / std::sqrt(aa * bb), 0.0, 1.0);
}

}  // namespace crossres
