#include "chase/core/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chase/core/kernels.hpp"

namespace chase {

namespace {

// Strides of `shape` aligned to an output of rank `rank`; broadcast axes get 0.
Shape aligned_strides(const Shape& shape, const Shape& out) {
  Shape s(out.size(), 0);
  const Shape own = strides_of(shape);
  const std::size_t lead = out.size() - shape.size();
  for (std::size_t i = 0; i < shape.size(); ++i) {
    s[lead + i] = shape[i] == 1 && out[lead + i] != 1 ? 0 : own[i];
  }
  return s;
}

struct BroadcastPlan {
  Shape out;
  Shape sa;
  Shape sb;
  bool same = false;
};

BroadcastPlan plan_broadcast(const Shape& a, const Shape& b, const char* op) {
  BroadcastPlan plan;
  if (a == b) {
    plan.out = a;
    plan.same = true;
    return plan;
  }
  const std::size_t rank = std::max(a.size(), b.size());
  plan.out.assign(rank, 1);
  for (std::size_t i = 0; i < rank; ++i) {
    const Index da = i < rank - a.size() ? 1 : a[i - (rank - a.size())];
    const Index db = i < rank - b.size() ? 1 : b[i - (rank - b.size())];
    if (da != db && da != 1 && db != 1) {
      throw DimensionError(std::string(op) + ": shapes " + to_string(a) + " and " + to_string(b) +
                           " are not broadcastable");
    }
    plan.out[i] = std::max(da, db);
  }
  plan.sa = aligned_strides(a, plan.out);
  plan.sb = aligned_strides(b, plan.out);
  return plan;
}

// Calls f(out_index, a_index, b_index) for every output element.
template <typename F>
void broadcast_each(const BroadcastPlan& plan, F&& f) {
  const Index n = numel(plan.out);
  if (plan.same) {
    for (Index i = 0; i < n; ++i) f(i, i, i);
    return;
  }
  const std::size_t rank = plan.out.size();
  std::vector<Index> idx(rank, 0);
  Index ia = 0;
  Index ib = 0;
  for (Index i = 0; i < n; ++i) {
    f(i, ia, ib);
    for (std::size_t ax = rank; ax-- > 0;) {
      ia += plan.sa[ax];
      ib += plan.sb[ax];
      if (++idx[ax] < plan.out[ax]) break;
      ia -= plan.sa[ax] * plan.out[ax];
      ib -= plan.sb[ax] * plan.out[ax];
      idx[ax] = 0;
    }
  }
}

template <typename Fwd, typename DA, typename DB>
Value binary(const Value& a, const Value& b, const char* op, Fwd fwd, DA da, DB db) {
  const BroadcastPlan plan = plan_broadcast(a.shape(), b.shape(), op);
  TensorXd out(plan.out);
  const auto& av = a.tensor().data();
  const auto& bv = b.tensor().data();
  auto& ov = out.data();
  broadcast_each(plan, [&](Index i, Index ia, Index ib) { ov[i] = fwd(av[ia], bv[ib]); });
  return Value::make(std::move(out), op, {a, b}, [plan, da, db](Node& self) {
    Node* pa = self.parents[0].get();
    Node* pb = self.parents[1].get();
    const auto& av = pa->value.data();
    const auto& bv = pb->value.data();
    const auto& g = self.grad.data();
    TensorXd* ga = pa->requires_grad ? &pa->grad_buffer() : nullptr;
    TensorXd* gb = pb->requires_grad ? &pb->grad_buffer() : nullptr;
    broadcast_each(plan, [&](Index i, Index ia, Index ib) {
      if (ga) ga->data()[ia] += g[i] * da(av[ia], bv[ib]);
      if (gb) gb->data()[ib] += g[i] * db(av[ia], bv[ib]);
    });
  });
}

template <typename Fwd, typename Deriv>
Value unary(const Value& x, const char* op, Fwd fwd, Deriv deriv) {
  TensorXd out(x.shape());
  out.data() = x.tensor().data().unaryExpr(fwd);
  return Value::make(std::move(out), op, {x}, [deriv](Node& self) {
    Node& p = *self.parents[0];
    auto& gx = p.grad_buffer().data();
    const auto& xv = p.value.data();
    const auto& yv = self.value.data();
    const auto& g = self.grad.data();
    for (Index i = 0; i < g.size(); ++i) gx[i] += g[i] * deriv(xv[i], yv[i]);
  });
}

void check_axis(const Value& x, Index axis, const char* op) {
  if (axis < 0 || axis >= static_cast<Index>(x.shape().size())) {
    throw DimensionError(std::string(op) + ": axis " + std::to_string(axis) +
                         " invalid for shape " + to_string(x.shape()));
  }
}

// Splits a shape around `axis` into (outer, n, inner).
struct AxisSplit {
  Index outer = 1;
  Index n = 1;
  Index inner = 1;
};

AxisSplit split_at(const Shape& shape, Index axis) {
  AxisSplit s;
  for (Index i = 0; i < axis; ++i) s.outer *= shape[i];
  s.n = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

struct Trailing3 {
  Index lead = 1;
  Index t = 1;
  Index j = 1;
  Index e = 1;
};

Trailing3 trailing3(const Shape& shape, const char* op) {
  if (shape.size() < 3) {
    throw DimensionError(std::string(op) + ": need at least 3 axes, got " + to_string(shape));
  }
  Trailing3 d;
  const std::size_t r = shape.size();
  for (std::size_t i = 0; i + 3 < r; ++i) d.lead *= shape[i];
  d.t = shape[r - 3];
  d.j = shape[r - 2];
  d.e = shape[r - 1];
  return d;
}

}  // namespace

Value add(const Value& a, const Value& b) {
  return binary(
      a, b, "add", [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
      [](double, double) { return 1.0; });
}

Value sub(const Value& a, const Value& b) {
  return binary(
      a, b, "sub", [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
      [](double, double) { return -1.0; });
}

Value mul(const Value& a, const Value& b) {
  return binary(
      a, b, "mul", [](double x, double y) { return x * y; }, [](double, double y) { return y; },
      [](double x, double) { return x; });
}

Value scale(const Value& x, double factor) {
  return unary(
      x, "scale", [factor](double v) { return factor * v; },
      [factor](double, double) { return factor; });
}

Value relu(const Value& x) {
  return unary(
      x, "relu", [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Value exp(const Value& x) {
  return unary(
      x, "exp", [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Value gradient_fault(const Value& x, double factor) {
  return unary(
      x, "gradient_fault", [](double v) { return v; }, [factor](double, double) { return factor; });
}

Value matmul(const Value& a, const Value& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  const bool batched = sa.size() == 3 && sb.size() == 3 && sa[0] == sb[0];
  const bool plain = sa.size() == 2 && sb.size() == 2;
  if (!(batched || plain) || sa[sa.size() - 1] != sb[sb.size() - 2]) {
    throw DimensionError("matmul: incompatible shapes " + to_string(sa) + " and " + to_string(sb));
  }
  const Index batch = batched ? sa[0] : 1;
  const Index m = sa[sa.size() - 2];
  const Index k = sa[sa.size() - 1];
  const Index n = sb[sb.size() - 1];
  TensorXd out(batched ? Shape{batch, m, n} : Shape{m, n});
  for (Index i = 0; i < batch; ++i) {
    Eigen::Map<const RowMatrix<double>> am(a.tensor().data().data() + i * m * k, m, k);
    Eigen::Map<const RowMatrix<double>> bm(b.tensor().data().data() + i * k * n, k, n);
    Eigen::Map<RowMatrix<double>>(out.data().data() + i * m * n, m, n) = kernels::product<double>(am, bm);
  }
  return Value::make(std::move(out), "matmul", {a, b}, [a, b, batch, m, k, n](Node& self) {
    Node& na = a.node();
    Node& nb = b.node();
    for (Index i = 0; i < batch; ++i) {
      Eigen::Map<const RowMatrix<double>> g(self.grad.data().data() + i * m * n, m, n);
      Eigen::Map<const RowMatrix<double>> am(na.value.data().data() + i * m * k, m, k);
      Eigen::Map<const RowMatrix<double>> bm(nb.value.data().data() + i * k * n, k, n);
      if (na.requires_grad) {
        Eigen::Map<RowMatrix<double>>(na.grad_buffer().data().data() + i * m * k, m, k).noalias() +=
            g * bm.transpose();
      }
      if (nb.requires_grad) {
        Eigen::Map<RowMatrix<double>>(nb.grad_buffer().data().data() + i * k * n, k, n).noalias() +=
            am.transpose() * g;
      }
    }
  });
}

Value permute(const Value& x, const std::vector<Index>& axes) {
  const Shape& in = x.shape();
  const std::size_t rank = in.size();
  std::vector<bool> seen(rank, false);
  if (axes.size() != rank) throw DimensionError("permute: axes do not match rank of " + to_string(in));
  for (Index a : axes) {
    if (a < 0 || a >= static_cast<Index>(rank) || seen[a]) {
      throw DimensionError("permute: invalid axis list for shape " + to_string(in));
    }
    seen[a] = true;
  }
  Shape out_shape(rank);
  const Shape in_strides = strides_of(in);
  Shape src_strides(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    out_shape[i] = in[axes[i]];
    src_strides[i] = in_strides[axes[i]];
  }
  // Source offset for every output element, reused by backward.
  auto gather = std::make_shared<std::vector<Index>>(numel(out_shape));
  {
    std::vector<Index> idx(rank, 0);
    Index off = 0;
    for (Index i = 0; i < static_cast<Index>(gather->size()); ++i) {
      (*gather)[i] = off;
      for (std::size_t ax = rank; ax-- > 0;) {
        off += src_strides[ax];
        if (++idx[ax] < out_shape[ax]) break;
        off -= src_strides[ax] * out_shape[ax];
        idx[ax] = 0;
      }
    }
  }
  TensorXd out(out_shape);
  const auto& xv = x.tensor().data();
  for (Index i = 0; i < out.size(); ++i) out[i] = xv[(*gather)[i]];
  return Value::make(std::move(out), "permute", {x}, [gather](Node& self) {
    auto& gx = self.parents[0]->grad_buffer().data();
    const auto& g = self.grad.data();
    for (Index i = 0; i < g.size(); ++i) gx[(*gather)[i]] += g[i];
  });
}

Value transpose(const Value& x) {
  const std::size_t r = x.shape().size();
  if (r < 2) throw DimensionError("transpose: need rank >= 2, got " + to_string(x.shape()));
  std::vector<Index> axes(r);
  std::iota(axes.begin(), axes.end(), 0);
  std::swap(axes[r - 1], axes[r - 2]);
  return permute(x, axes);
}

Value reshape(const Value& x, Shape shape) {
  if (numel(shape) != x.size()) {
    throw DimensionError("reshape: cannot view " + to_string(x.shape()) + " as " + to_string(shape));
  }
  return Value::make(x.tensor().reshaped(std::move(shape)), "reshape", {x}, [](Node& self) {
    self.parents[0]->grad_buffer().data() += self.grad.data();
  });
}

Value sum(const Value& x) {
  return Value::make(TensorXd::scalar(x.tensor().data().sum()), "sum", {x}, [](Node& self) {
    self.parents[0]->grad_buffer().data() += self.grad[0];
  });
}

Value mean(const Value& x) { return scale(sum(x), 1.0 / static_cast<double>(x.size())); }

Value sum(const Value& x, Index axis) {
  check_axis(x, axis, "sum");
  const AxisSplit s = split_at(x.shape(), axis);
  Shape out_shape = x.shape();
  out_shape.erase(out_shape.begin() + axis);
  TensorXd out(out_shape);
  const auto& xv = x.tensor().data();
  for (Index o = 0; o < s.outer; ++o)
    for (Index k = 0; k < s.n; ++k)
      for (Index i = 0; i < s.inner; ++i) out[o * s.inner + i] += xv[(o * s.n + k) * s.inner + i];
  return Value::make(std::move(out), "sum_axis", {x}, [s](Node& self) {
    auto& gx = self.parents[0]->grad_buffer().data();
    const auto& g = self.grad.data();
    for (Index o = 0; o < s.outer; ++o)
      for (Index k = 0; k < s.n; ++k)
        for (Index i = 0; i < s.inner; ++i) gx[(o * s.n + k) * s.inner + i] += g[o * s.inner + i];
  });
}

Value mean(const Value& x, Index axis) {
  check_axis(x, axis, "mean");
  return scale(sum(x, axis), 1.0 / static_cast<double>(x.shape()[axis]));
}

Value symmetric_mean(const Value& x, Index axis) {
  check_axis(x, axis, "symmetric_mean");
  const AxisSplit s = split_at(x.shape(), axis);
  Shape out_shape = x.shape();
  out_shape.erase(out_shape.begin() + axis);
  TensorXd out(out_shape);
  const auto& xv = x.tensor().data();
  std::vector<double> slice(static_cast<std::size_t>(s.n));
  for (Index o = 0; o < s.outer; ++o) {
    for (Index i = 0; i < s.inner; ++i) {
      for (Index k = 0; k < s.n; ++k) slice[static_cast<std::size_t>(k)] = xv[(o * s.n + k) * s.inner + i];
      std::sort(slice.begin(), slice.end());
      double acc = 0.0;
      for (double v : slice) acc += v;
      out[o * s.inner + i] = acc / static_cast<double>(s.n);
    }
  }
  return Value::make(std::move(out), "symmetric_mean", {x}, [s](Node& self) {
    auto& gx = self.parents[0]->grad_buffer().data();
    const auto& g = self.grad.data();
    const double w = 1.0 / static_cast<double>(s.n);
    for (Index o = 0; o < s.outer; ++o)
      for (Index k = 0; k < s.n; ++k)
        for (Index i = 0; i < s.inner; ++i) gx[(o * s.n + k) * s.inner + i] += w * g[o * s.inner + i];
  });
}

Value softmax(const Value& x, Index axis) {
  check_axis(x, axis, "softmax");
  const AxisSplit s = split_at(x.shape(), axis);
  TensorXd out(x.shape());
  const auto& xv = x.tensor().data();
  ColVector<double> slice(s.n);
  for (Index o = 0; o < s.outer; ++o) {
    for (Index i = 0; i < s.inner; ++i) {
      for (Index k = 0; k < s.n; ++k) slice[k] = xv[(o * s.n + k) * s.inner + i];
      const ColVector<double> y = kernels::softmax(slice);
      for (Index k = 0; k < s.n; ++k) out[(o * s.n + k) * s.inner + i] = y[k];
    }
  }
  return Value::make(std::move(out), "softmax", {x}, [s](Node& self) {
    auto& gx = self.parents[0]->grad_buffer().data();
    const auto& y = self.value.data();
    const auto& g = self.grad.data();
    for (Index o = 0; o < s.outer; ++o) {
      for (Index i = 0; i < s.inner; ++i) {
        double dot = 0.0;
        for (Index k = 0; k < s.n; ++k) {
          const Index at = (o * s.n + k) * s.inner + i;
          dot += g[at] * y[at];
        }
        for (Index k = 0; k < s.n; ++k) {
          const Index at = (o * s.n + k) * s.inner + i;
          gx[at] += y[at] * (g[at] - dot);
        }
      }
    }
  });
}

Value segment_mean_pool(const Value& x, const SegmentSpec& seg) {
  const Trailing3 d = trailing3(x.shape(), "segment_mean_pool");
  if (seg.t <= 0 || seg.j <= 0 || seg.e <= 0 || d.t % seg.t || d.j % seg.j || d.e % seg.e) {
    throw ConfigError("segment spec (" + std::to_string(seg.t) + ", " + std::to_string(seg.j) + ", " +
                      std::to_string(seg.e) + ") does not divide trailing extents of " +
                      to_string(x.shape()));
  }
  const Index bt = d.t / seg.t, bj = d.j / seg.j, be = d.e / seg.e;
  const double inv = 1.0 / static_cast<double>(bt * bj * be);
  Shape out_shape = x.shape();
  const std::size_t r = out_shape.size();
  out_shape[r - 3] = seg.t;
  out_shape[r - 2] = seg.j;
  out_shape[r - 1] = seg.e;
  TensorXd out(out_shape);
  const auto& xv = x.tensor().data();
  const Index in_block = d.t * d.j * d.e;
  const Index out_block = seg.count();
  auto cell = [=](Index t, Index j, Index e) { return ((t / bt) * seg.j + j / bj) * seg.e + e / be; };
  for (Index l = 0; l < d.lead; ++l)
    for (Index t = 0; t < d.t; ++t)
      for (Index j = 0; j < d.j; ++j)
        for (Index e = 0; e < d.e; ++e)
          out[l * out_block + cell(t, j, e)] += inv * xv[l * in_block + (t * d.j + j) * d.e + e];
  return Value::make(std::move(out), "segment_mean_pool", {x}, [=](Node& self) {
    auto& gx = self.parents[0]->grad_buffer().data();
    const auto& g = self.grad.data();
    for (Index l = 0; l < d.lead; ++l)
      for (Index t = 0; t < d.t; ++t)
        for (Index j = 0; j < d.j; ++j)
          for (Index e = 0; e < d.e; ++e)
            gx[l * in_block + (t * d.j + j) * d.e + e] += inv * g[l * out_block + cell(t, j, e)];
  });
}

Value segment_broadcast(const Value& x, Index bt, Index bj, Index be) {
  const Trailing3 d = trailing3(x.shape(), "segment_broadcast");
  if (bt <= 0 || bj <= 0 || be <= 0) throw ConfigError("segment_broadcast: block sizes must be positive");
  Shape out_shape = x.shape();
  const std::size_t r = out_shape.size();
  out_shape[r - 3] = d.t * bt;
  out_shape[r - 2] = d.j * bj;
  out_shape[r - 1] = d.e * be;
  const Index T = d.t * bt, J = d.j * bj, E = d.e * be;
  const Index in_block = d.t * d.j * d.e;
  const Index out_block = T * J * E;
  auto cell = [=](Index t, Index j, Index e) { return ((t / bt) * d.j + j / bj) * d.e + e / be; };
  TensorXd out(out_shape);
  const auto& xv = x.tensor().data();
  for (Index l = 0; l < d.lead; ++l)
    for (Index t = 0; t < T; ++t)
      for (Index j = 0; j < J; ++j)
        for (Index e = 0; e < E; ++e) out[l * out_block + (t * J + j) * E + e] = xv[l * in_block + cell(t, j, e)];
  return Value::make(std::move(out), "segment_broadcast", {x}, [=](Node& self) {
    auto& gx = self.parents[0]->grad_buffer().data();
    const auto& g = self.grad.data();
    for (Index l = 0; l < d.lead; ++l)
      for (Index t = 0; t < T; ++t)
        for (Index j = 0; j < J; ++j)
          for (Index e = 0; e < E; ++e) gx[l * in_block + cell(t, j, e)] += g[l * out_block + (t * J + j) * E + e];
  });
}

Value cross_entropy(const Value& logits, std::span<const int> labels) {
  if (logits.shape().size() != 2 || logits.dim(0) != static_cast<Index>(labels.size())) {
    throw DimensionError("cross_entropy: logits " + to_string(logits.shape()) + " vs " +
                         std::to_string(labels.size()) + " labels");
  }
  const Index n = logits.dim(0);
  const Index k = logits.dim(1);
  for (int y : labels) {
    if (y < 0 || y >= k) {
      throw IndexError("cross_entropy: label " + std::to_string(y) + " outside [0, " + std::to_string(k) + ")");
    }
  }
  auto lm = logits.tensor().matrix();
  auto probs = std::make_shared<RowMatrix<double>>(n, k);
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double m = lm.row(i).maxCoeff();
    const double lse = m + std::log((lm.row(i).array() - m).exp().sum());
    total += lse - lm(i, labels[i]);
    probs->row(i) = (lm.row(i).array() - lse).exp().matrix();
  }
  std::vector<int> y(labels.begin(), labels.end());
  return Value::make(TensorXd::scalar(total / static_cast<double>(n)), "cross_entropy", {logits},
                     [probs, y = std::move(y), n, k](Node& self) {
                       auto gx = self.parents[0]->grad_buffer().matrix(n, k);
                       const double g = self.grad[0] / static_cast<double>(n);
                       gx += g * *probs;
                       for (Index i = 0; i < n; ++i) gx(i, y[i]) -= g;
                     });
}

Value select(const Value& x, Index axis, Index index) {
  check_axis(x, axis, "select");
  if (index < 0 || index >= x.shape()[axis]) {
    throw IndexError("select: index " + std::to_string(index) + " out of range for axis " +
                     std::to_string(axis) + " of " + to_string(x.shape()));
  }
  const AxisSplit s = split_at(x.shape(), axis);
  Shape out_shape = x.shape();
  out_shape.erase(out_shape.begin() + axis);
  TensorXd out(out_shape);
  const auto& xv = x.tensor().data();
  for (Index o = 0; o < s.outer; ++o)
    for (Index i = 0; i < s.inner; ++i) out[o * s.inner + i] = xv[(o * s.n + index) * s.inner + i];
  return Value::make(std::move(out), "select", {x}, [s, index](Node& self) {
    auto& gx = self.parents[0]->grad_buffer().data();
    const auto& g = self.grad.data();
    for (Index o = 0; o < s.outer; ++o)
      for (Index i = 0; i < s.inner; ++i) gx[(o * s.n + index) * s.inner + i] += g[o * s.inner + i];
  });
}

Value index_select(const Value& x, Index axis, std::span<const Index> indices) {
  check_axis(x, axis, "index_select");
  const AxisSplit s = split_at(x.shape(), axis);
  for (Index k : indices) {
    if (k < 0 || k >= s.n) throw IndexError("index_select: index " + std::to_string(k) + " out of range");
  }
  if (indices.empty()) throw DimensionError("index_select: empty index list");
  const Index m = static_cast<Index>(indices.size());
  Shape out_shape = x.shape();
  out_shape[axis] = m;
  TensorXd out(out_shape);
  const auto& xv = x.tensor().data();
  std::vector<Index> idx(indices.begin(), indices.end());
  for (Index o = 0; o < s.outer; ++o)
    for (Index r = 0; r < m; ++r)
      for (Index i = 0; i < s.inner; ++i) out[(o * m + r) * s.inner + i] = xv[(o * s.n + idx[r]) * s.inner + i];
  return Value::make(std::move(out), "index_select", {x}, [s, m, idx = std::move(idx)](Node& self) {
    auto& gx = self.parents[0]->grad_buffer().data();
    const auto& g = self.grad.data();
    for (Index o = 0; o < s.outer; ++o)
      for (Index r = 0; r < m; ++r)
        for (Index i = 0; i < s.inner; ++i) gx[(o * s.n + idx[r]) * s.inner + i] += g[(o * m + r) * s.inner + i];
  });
}

Value sqdist(const Value& a, const Value& b) {
  if (a.shape().size() != 2 || b.shape().size() != 2 || a.dim(1) != b.dim(1)) {
    throw DimensionError("sqdist: incompatible shapes " + to_string(a.shape()) + " and " +
                         to_string(b.shape()));
  }
  const Index n = a.dim(0), m = b.dim(0), d = a.dim(1);
  TensorXd out(Shape{n, m});
  auto am = a.tensor().matrix();
  auto bm = b.tensor().matrix();
  auto om = out.matrix();
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) om(i, j) = (am.row(i) - bm.row(j)).squaredNorm();
  return Value::make(std::move(out), "sqdist", {a, b}, [a, b, n, m, d](Node& self) {
    Node& na = a.node();
    Node& nb = b.node();
    auto g = self.grad.matrix(n, m);
    auto am = na.value.matrix(n, d);
    auto bm = nb.value.matrix(m, d);
    // dD_ij/da_i = 2(a_i - b_j), dD_ij/db_j = -2(a_i - b_j)
    if (na.requires_grad) {
      auto ga = na.grad_buffer().matrix(n, d);
      ga += 2.0 * (g.rowwise().sum().asDiagonal() * am - g * bm);
    }
    if (nb.requires_grad) {
      auto gb = nb.grad_buffer().matrix(m, d);
      gb += 2.0 * (g.colwise().sum().transpose().asDiagonal() * bm - g.transpose() * am);
    }
  });
}

}  // namespace chase
