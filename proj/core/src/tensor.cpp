#include "liclab/tensor.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

namespace liclab {

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
  os << "]";
  return os.str();
}

std::int64_t shape_numel(const Shape& s) {
  std::int64_t n = 1;
  for (int d : s) n *= d;
  return n;
}

void Node::ensure_grad() {
  if (grad.empty()) grad.assign(value.size(), 0.0f);
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0f, requires_grad);
}

Tensor Tensor::full(Shape shape, float v, bool requires_grad) {
  auto n = std::make_shared<Node>();
  n->value.assign(static_cast<size_t>(shape_numel(shape)), v);
  n->shape = std::move(shape);
  n->requires_grad = requires_grad;
  return Tensor(std::move(n));
}

Tensor Tensor::from_data(Shape shape, std::vector<float> data,
                         bool requires_grad) {
  if (shape_numel(shape) != static_cast<std::int64_t>(data.size()))
    throw Error("Tensor::from_data: shape " + shape_str(shape) +
                " does not match data length " + std::to_string(data.size()));
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(data);
  n->requires_grad = requires_grad;
  return Tensor(std::move(n));
}

Tensor Tensor::scalar(float v, bool requires_grad) {
  return from_data({1}, {v}, requires_grad);
}

float Tensor::item() const {
  if (!is_scalar())
    throw Error("Tensor::item: tensor is not scalar, shape " +
                shape_str(shape()));
  return node_->value[0];
}

double Tensor::item_precise() const {
  if (!is_scalar())
    throw Error("Tensor::item_precise: tensor is not scalar, shape " +
                shape_str(shape()));
  return node_->precise ? *node_->precise
                        : static_cast<double>(node_->value[0]);
}

const std::vector<float>& Tensor::grad() const {
  if (!node_ || node_->grad.empty())
    throw Error("Tensor::grad: no gradient; run backward() first");
  return node_->grad;
}

void Tensor::set_requires_grad(bool b) {
  if (!node_->is_leaf)
    throw Error("set_requires_grad: only leaves may change requires_grad");
  node_->requires_grad = b;
}

void Tensor::zero_grad() {
  if (node_ && !node_->grad.empty())
    std::fill(node_->grad.begin(), node_->grad.end(), 0.0f);
}

Tensor Tensor::detach(bool requires_grad) const {
  return Tensor::from_data(node_->shape, node_->value, requires_grad);
}

void backward(const Tensor& output) {
  Node* out = output.node().get();
  if (!out) throw Error("backward: undefined tensor");
  if (output.size() != 1)
    throw Error("backward: output must be scalar, got shape " +
                shape_str(out->shape));
  if (!out->requires_grad)
    throw Error("backward: output does not depend on any requires_grad leaf");
  if (out->backward_done)
    throw Error("backward: second backward pass without a new forward");
  out->backward_done = true;

  // Iterative post-order DFS over parents.
  std::vector<Node*> topo;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(out, 0);
  visited.insert(out);
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->parents.size()) {
      Node* p = node->parents[idx++].get();
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      topo.push_back(node);
      stack.pop_back();
    }
  }

  out->ensure_grad();
  out->grad[0] = 1.0f;
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    Node* n = *it;
    if (n->backprop) n->backprop(*n);
  }
}

bool all_finite(const Tensor& t) {
  for (float v : t.data())
    if (!std::isfinite(v)) return false;
  return true;
}

void ensure_finite(const Tensor& t, const std::string& context) {
  if (!all_finite(t))
    throw Error("non-finite value detected in " + context);
}

float max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape())
    throw Error("max_abs_diff: shape mismatch " + shape_str(a.shape()) +
                " vs " + shape_str(b.shape()));
  float m = 0.0f;
  for (size_t i = 0; i < a.data().size(); ++i)
    m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace liclab
