#pragma once

#include <span>
#include <vector>

#include "chase/core/autodiff.hpp"

namespace chase {

/// Block layout over the trailing (T, J, E) axes: the number of segments
/// along each axis. Each must divide the corresponding extent.
struct SegmentSpec {
  Index t = 1;
  Index j = 1;
  Index e = 1;

  Index count() const { return t * j * e; }
  friend bool operator==(const SegmentSpec&, const SegmentSpec&) = default;
};

// Elementwise ops broadcast numpy-style: shapes are aligned at their trailing
// axes, and missing leading axes or size-1 axes stretch to the other extent.
Value add(const Value& a, const Value& b);
Value sub(const Value& a, const Value& b);
Value mul(const Value& a, const Value& b);
Value scale(const Value& x, double factor);
/// Subgradient 0 at x == 0.
Value relu(const Value& x);
Value exp(const Value& x);

inline Value operator+(const Value& a, const Value& b) { return add(a, b); }
inline Value operator-(const Value& a, const Value& b) { return sub(a, b); }
inline Value operator*(const Value& a, const Value& b) { return mul(a, b); }
inline Value operator*(double s, const Value& x) { return scale(x, s); }

/// [m,k]x[k,n] or batched [B,m,k]x[B,k,n].
Value matmul(const Value& a, const Value& b);
/// Swaps the last two axes.
Value transpose(const Value& x);
Value reshape(const Value& x, Shape shape);
Value permute(const Value& x, const std::vector<Index>& axes);

Value sum(const Value& x);
Value sum(const Value& x, Index axis);
Value mean(const Value& x);
Value mean(const Value& x, Index axis);
/// Mean along `axis` whose value does not depend on the order of the slices:
/// each slice is summed in sorted order.
Value symmetric_mean(const Value& x, Index axis);

Value softmax(const Value& x, Index axis);

/// Mean over contiguous blocks of the last three axes (T, J, E) -> (t, j, e)
/// segments. Leading axes are batch-like and kept.
Value segment_mean_pool(const Value& x, const SegmentSpec& seg);
/// Repeats every cell of the last three axes over a (bt, bj, be) block; the
/// layout inverse of segment_mean_pool.
Value segment_broadcast(const Value& x, Index bt, Index bj, Index be);

/// Mean negative log-likelihood of `labels` under softmax(logits), logits [N,K].
Value cross_entropy(const Value& logits, std::span<const int> labels);

/// Drops `axis`, keeping slice `index`.
Value select(const Value& x, Index axis, Index index);
/// Gathers slices along `axis` (repeats allowed).
Value index_select(const Value& x, Index axis, std::span<const Index> indices);

/// Pairwise squared Euclidean distances between rows: [n,d], [m,d] -> [n,m].
Value sqdist(const Value& a, const Value& b);

/// Identity forward; backward multiplies the incoming gradient by `factor`.
/// Used only to fabricate a broken backward rule in gradient-check fixtures.
Value gradient_fault(const Value& x, double factor);

}  // namespace chase
