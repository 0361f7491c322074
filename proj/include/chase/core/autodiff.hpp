#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "chase/core/tensor.hpp"

namespace chase {

struct Node;
using NodePtr = std::shared_ptr<Node>;
using BackwardFn = std::function<void(Node&)>;

/// One vertex of the reverse-mode graph. Children hold their parents; the
/// graph is released when the last Value referencing the root goes away.
struct Node {
  TensorXd value;
  TensorXd grad;
  bool has_grad = false;
  bool requires_grad = false;
  std::string op = "leaf";
  std::vector<NodePtr> parents;
  BackwardFn backward;

  /// Zero-initialised on first access.
  TensorXd& grad_buffer();
  bool is_leaf() const noexcept { return !backward; }
};

/// Handle to a graph node. Copies alias the same node.
class Value {
 public:
  Value();
  explicit Value(TensorXd tensor, bool requires_grad = false);

  /// Records an op result. When no parent requires grad the result is a
  /// constant with no graph attached. Throws NumericalError if the result
  /// contains NaN/Inf.
  static Value make(TensorXd tensor, std::string op, std::vector<Value> parents, BackwardFn backward);

  const TensorXd& tensor() const { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }
  Index size() const { return node_->value.size(); }
  Index dim(Index axis) const { return node_->value.dim(axis); }
  double item() const { return node_->value.item(); }

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return node_->has_grad; }
  /// Throws UsageError if no gradient has been accumulated.
  const TensorXd& grad() const;
  void zero_grad();

  /// Replaces the stored tensor of a leaf (parameter updates). Shape must match.
  void assign(TensorXd tensor);

  const std::string& op() const { return node_->op; }
  Node& node() const { return *node_; }
  const NodePtr& node_ptr() const { return node_; }

 private:
  explicit Value(NodePtr node) : node_(std::move(node)) {}
  NodePtr node_;
};

/// Reverse sweep from a scalar root. Leaf gradients accumulate across calls;
/// intermediate gradients are recomputed from zero on every call.
void backward(const Value& root);

}  // namespace chase
