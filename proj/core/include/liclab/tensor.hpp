#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace liclab {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

using Shape = std::vector<int>;

std::string shape_str(const Shape& s);
std::int64_t shape_numel(const Shape& s);

/// One record in the computation graph. Holds the forward value, the
/// (lazily allocated) gradient buffer, and a closure that scatters this
/// node's gradient into its parents.
struct Node {
  Shape shape;
  std::vector<float> value;
  std::vector<float> grad;
  bool requires_grad = false;
  bool is_leaf = true;
  // Set when any upstream primitive uses a surrogate gradient (round_ste,
  // sign, clamp saturation, ...). finite_difference_check reports it.
  bool nonsmooth = false;
  // Reductions accumulate in double and keep the full-precision result here
  // so the finite-difference oracle is not limited by float32 cancellation.
  std::optional<double> precise;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backprop;
  bool backward_done = false;

  void ensure_grad();
};

/// Dense float32 tensor, a value-semantic handle onto a graph node.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> n) : node_(std::move(n)) {}

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, float v, bool requires_grad = false);
  static Tensor from_data(Shape shape, std::vector<float> data,
                          bool requires_grad = false);
  static Tensor scalar(float v, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::int64_t size() const {
    return static_cast<std::int64_t>(node_->value.size());
  }
  bool is_scalar() const { return size() == 1; }
  float item() const;
  /// Double-accumulated value for scalar reduction outputs; falls back to
  /// the float32 value when no reduction produced this node.
  double item_precise() const;

  std::vector<float>& data() { return node_->value; }
  const std::vector<float>& data() const { return node_->value; }
  const std::vector<float>& grad() const;
  bool has_grad() const { return node_ && !node_->grad.empty(); }
  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool b);
  void zero_grad();

  /// Deep copy of the values into a fresh leaf (no graph history).
  Tensor detach(bool requires_grad = false) const;

  std::shared_ptr<Node> node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

/// Reverse-mode sweep from a scalar output. Populates .grad on every
/// requires_grad leaf reachable from `output`. Calling it twice on the same
/// forward result is an error, as is calling it on a non-scalar.
void backward(const Tensor& output);

bool all_finite(const Tensor& t);
void ensure_finite(const Tensor& t, const std::string& context);
float max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace liclab
