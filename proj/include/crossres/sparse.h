#ifndef CROSSRES_SPARSE_H_
#define CROSSRES_SPARSE_H_

#include <cstdint>
#include <map>
#include <vector>

namespace crossres {

struct SparseEntry {
  uint32_t index;
  double value;
  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// Entries sorted by strictly increasing index; zero values are not stored.
using SparseVector = std::vector<SparseEntry>;

SparseVector to_sparse(const std::map<uint32_t, double>& values);

double dot(const SparseVector& a, const SparseVector& b);
double squared_norm(const SparseVector& v);

// Returns v / ||v||; the zero vector is returned unchanged.
SparseVector l2_normalized(SparseVector v);

// Elementwise product, nonzero only on the shared support.
SparseVector hadamard(const SparseVector& a, const SparseVector& b);

// Cosine of two non-negative vectors, clamped to [0, 1]. A vector compared
// with itself gives exactly 1. Zero vectors give 0.
double cosine(const SparseVector& a, const SparseVector& b);

}  // namespace crossres

#endif  // CROSSRES_SPARSE_H_
