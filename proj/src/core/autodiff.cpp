#include "chase/core/autodiff.hpp"

#include <unordered_set>

namespace chase {

TensorXd& Node::grad_buffer() {
  if (!has_grad) {
    grad = TensorXd::zeros(value.shape());
    has_grad = true;
  }
  return grad;
}

Value::Value() : node_(std::make_shared<Node>()) {}

Value::Value(TensorXd tensor, bool requires_grad) : node_(std::make_shared<Node>()) {
  node_->value = std::move(tensor);
  node_->requires_grad = requires_grad;
}

Value Value::make(TensorXd tensor, std::string op, std::vector<Value> parents, BackwardFn backward) {
  if (!tensor.all_finite()) throw NumericalError("non-finite result in op '" + op + "'");
  auto node = std::make_shared<Node>();
  node->value = std::move(tensor);
  node->op = std::move(op);
  for (const Value& p : parents) {
    if (p.requires_grad()) node->requires_grad = true;
  }
  if (node->requires_grad) {
    node->parents.reserve(parents.size());
    for (Value& p : parents) node->parents.push_back(p.node_);
    node->backward = std::move(backward);
  }
  return Value(std::move(node));
}

const TensorXd& Value::grad() const {
  if (!node_->has_grad) throw UsageError("no gradient accumulated for '" + node_->op + "' node");
  return node_->grad;
}

void Value::zero_grad() {
  node_->grad = TensorXd();
  node_->has_grad = false;
}

void Value::assign(TensorXd tensor) {
  if (tensor.shape() != shape()) {
    throw DimensionError("assign: shape " + to_string(tensor.shape()) + " does not match " +
                         to_string(shape()));
  }
  node_->value = std::move(tensor);
}

namespace {

std::vector<Node*> topological_order(Node* root) {
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  // (node, next parent index) frames; iterative to survive deep graphs.
  std::vector<std::pair<Node*, std::size_t>> stack{{root, 0}};
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;  // parents before children
}

}  // namespace

void backward(const Value& root) {
  if (root.size() != 1) {
    throw UsageError("backward() needs a scalar root, got shape " + to_string(root.shape()));
  }
  if (!root.requires_grad()) return;

  std::vector<Node*> order = topological_order(&root.node());
  for (Node* n : order) {
    if (!n->is_leaf()) {
      n->grad = TensorXd::zeros(n->value.shape());
      n->has_grad = true;
    }
  }
  root.node().grad_buffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (!n->is_leaf()) n->backward(*n);
  }
}

}  // namespace chase
