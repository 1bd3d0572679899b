#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

#include "ldg/errors.hpp"
#include "ldg/rng.hpp"

namespace ldg {

using Shape = std::vector<int>;

namespace detail {

struct TensorData {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // allocated on first touch
  bool requires_grad = false;
  bool on_tape = false;  // produced by a recorded op in the active tape
};

}  // namespace detail

/// Dense f64 tensor with shared-value semantics. Arithmetic on tensors is
/// recorded on the active Tape (when one is installed and an input is
/// differentiable), enabling reverse-mode gradients; without an active tape
/// the same calls are plain numerics.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, double v);
  static Tensor from(Shape shape, std::vector<double> values);
  static Tensor scalar(double v) { return from({1}, {v}); }
  /// Trainable leaf: participates in backward() and receives a gradient.
  static Tensor leaf(Shape shape, std::vector<double> values);

  bool defined() const { return d_ != nullptr; }
  const Shape& shape() const { return d_->shape; }
  int size() const { return static_cast<int>(d_->value.size()); }
  int dim(int i) const { return d_->shape[static_cast<size_t>(i)]; }

  double* data() { return d_->value.data(); }
  const double* data() const { return d_->value.data(); }
  std::vector<double>& values() { return d_->value; }
  const std::vector<double>& values() const { return d_->value; }

  double item() const {
    require(size() == 1, "Tensor::item on non-scalar");
    return d_->value[0];
  }

  bool requires_grad() const { return d_->requires_grad; }
  bool tracked() const { return d_ && (d_->requires_grad || d_->on_tape); }

  /// Gradient buffer, allocated as zeros on first access.
  std::vector<double>& grad();
  void zero_grad();

  /// Value copy detached from any tape.
  Tensor detach() const;

  std::shared_ptr<detail::TensorData> node() const { return d_; }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorData> d) : d_(std::move(d)) {}
  std::shared_ptr<detail::TensorData> d_;
  friend class Tape;
  friend Tensor make_op_output_tracked(Shape, std::vector<double>, bool);
};

/// Internal: constructs an op output, flagging it for the active tape.
Tensor make_op_output_tracked(Shape shape, std::vector<double> values,
                              bool input_tracked);

/// Reverse-mode tape: an ordered record of primitive applications. backward()
/// replays the record once, in reverse, accumulating into leaf gradients.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Installs this tape as the active recording target for the current
  /// thread while in scope.
  class Scope {
   public:
    explicit Scope(Tape& t);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Tape* prev_;
  };

  static Tape* active();

  /// Seeds d(loss)/d(loss) = 1 and replays the tape backward. `loss` must be
  /// a scalar produced by recorded primitives.
  void backward(const Tensor& loss);

  void clear() { ops_.clear(); }
  size_t size() const { return ops_.size(); }

  void record(std::function<void()> bw) { ops_.push_back(std::move(bw)); }

 private:
  std::vector<std::function<void()>> ops_;
};

// ---------------------------------------------------------------------------
// Primitives. Unless noted, shapes must match exactly.
// ---------------------------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor neg(const Tensor& a);

/// A: m x k, B: k x n -> m x n.
Tensor matmul(const Tensor& a, const Tensor& b);
/// A: m x n, b: n -> m x n, row-broadcast add.
Tensor add_rowvec(const Tensor& a, const Tensor& b);

Tensor tanh_t(const Tensor& a);
Tensor sigmoid_t(const Tensor& a);
Tensor relu_t(const Tensor& a);
Tensor log_t(const Tensor& a);
/// Elementwise x*log(x) with the 0*log(0) = 0 convention.
Tensor xlogx(const Tensor& a);

/// Numerically stable softplus, elementwise.
Tensor softplus(const Tensor& a);
/// psi * log(1 + exp(x / psi)) with scalar tensor psi > 0; stable for
/// |x/psi| up to ~700. Gradients flow to both x and psi.
Tensor softplus_scaled(const Tensor& x, const Tensor& psi);

Tensor sum(const Tensor& a);
Tensor dot(const Tensor& a, const Tensor& b);
/// Elementwise max; gradient follows the winning side (ties -> a).
Tensor emax(const Tensor& a, const Tensor& b);

Tensor concat_vec(const std::vector<Tensor>& parts);
/// Same values, new shape (element count preserved).
Tensor reshape(const Tensor& a, Shape shape);
/// 1-D slice [begin, begin+len).
Tensor slice_vec(const Tensor& a, int begin, int len);
/// A: N x d, idx -> K x d.
Tensor gather_rows(const Tensor& a, const std::vector<int>& idx);
/// Functional write of rows u and v (u != v) of Z.
Tensor row_update2(const Tensor& z, int u, int v, const Tensor& row_u,
                   const Tensor& row_v);
/// S: {N,N,r}; writes `fiber` at (u,v) and (v,u), returns the new tensor.
Tensor set_pair_fiber(const Tensor& s, int u, int v, const Tensor& fiber);
/// S: {N,N,r}; out[k] = S[u, idx[k], c].
Tensor gather_attn(const Tensor& s, int u, const std::vector<int>& idx, int c);

/// 1-D softmax.
Tensor softmax_vec(const Tensor& a);

/// H: N x d, W: {d,d,m} -> out {N,N,m}, out[i,j,c] = sum_ab H[i,a] W[a,b,c] H[j,b].
Tensor pairwise_bilinear(const Tensor& h, const Tensor& w);
/// x: d, W: {d,d,m}, y: d -> m-vector, out[c] = sum_ij x_i W[i,j,c] y_j.
Tensor bilinear_form(const Tensor& x, const Tensor& w, const Tensor& y);

/// Elementwise multiply by a constant mask (no gradient into the mask).
Tensor mask_mul(const Tensor& a, const std::vector<double>& mask);
/// E: {N,N,m} -> {N,m}, out[j,c] = sum_i E[i,j,c].
Tensor sum_axis0_3d(const Tensor& e);

/// Forward takes the given hard values; backward passes gradients to `soft`
/// unchanged (straight-through).
Tensor straight_through(const Tensor& soft, std::vector<double> hard);

/// Gumbel-softmax over `logits` at the given temperature. Soft mode returns a
/// simplex point; hard mode returns the one-hot argmax with straight-through
/// gradients. Deterministic for a fixed rng state.
Tensor gumbel_softmax_sample(const Tensor& logits, double temperature,
                             bool hard, Rng& rng);

}  // namespace ldg
