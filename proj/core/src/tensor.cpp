#include "ldg/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ldg {

namespace {

thread_local Tape* g_active_tape = nullptr;

int shape_numel(const Shape& s) {
  int n = 1;
  for (int d : s) n *= d;
  return n;
}

using Node = std::shared_ptr<detail::TensorData>;

// Accumulate g into the node's gradient buffer if the node participates in
// differentiation.
void accum(const Node& n, const double* g, size_t len) {
  if (!n->requires_grad && !n->on_tape) return;
  if (n->grad.empty()) n->grad.assign(n->value.size(), 0.0);
  for (size_t i = 0; i < len; ++i) n->grad[i] += g[i];
}

std::vector<double>& grad_of(const Node& n) {
  if (n->grad.empty()) n->grad.assign(n->value.size(), 0.0);
  return n->grad;
}

bool any_tracked(std::initializer_list<const Tensor*> ins) {
  for (const Tensor* t : ins)
    if (t->tracked()) return true;
  return false;
}

}  // namespace

Tensor make_op_output_tracked(Shape shape, std::vector<double> values,
                              bool input_tracked) {
  auto d = std::make_shared<detail::TensorData>();
  d->shape = std::move(shape);
  d->value = std::move(values);
  d->on_tape = g_active_tape != nullptr && input_tracked;
  return Tensor(std::move(d));
}

namespace {

Tensor make_op_output(Shape shape, std::vector<double> values,
                      std::initializer_list<const Tensor*> ins) {
  return make_op_output_tracked(std::move(shape), std::move(values),
                                any_tracked(ins));
}

// Records `bw` when the output landed on the tape.
void record_if_tracked(const Tensor& out, std::function<void()> bw) {
  if (out.tracked() && !out.requires_grad()) g_active_tape->record(std::move(bw));
}

}  // namespace

Tensor Tensor::zeros(Shape shape) {
  int n = shape_numel(shape);
  return from(std::move(shape), std::vector<double>(static_cast<size_t>(n), 0.0));
}

Tensor Tensor::full(Shape shape, double v) {
  int n = shape_numel(shape);
  return from(std::move(shape), std::vector<double>(static_cast<size_t>(n), v));
}

Tensor Tensor::from(Shape shape, std::vector<double> values) {
  require(static_cast<size_t>(shape_numel(shape)) == values.size(),
          "Tensor::from: value count does not match shape");
  auto d = std::make_shared<detail::TensorData>();
  d->shape = std::move(shape);
  d->value = std::move(values);
  return Tensor(std::move(d));
}

Tensor Tensor::leaf(Shape shape, std::vector<double> values) {
  Tensor t = from(std::move(shape), std::move(values));
  t.d_->requires_grad = true;
  return t;
}

std::vector<double>& Tensor::grad() { return grad_of(d_); }

void Tensor::zero_grad() {
  if (!d_->grad.empty()) std::fill(d_->grad.begin(), d_->grad.end(), 0.0);
}

Tensor Tensor::detach() const {
  auto d = std::make_shared<detail::TensorData>();
  d->shape = d_->shape;
  d->value = d_->value;
  return Tensor(std::move(d));
}

Tape::Scope::Scope(Tape& t) {
  prev_ = g_active_tape;
  g_active_tape = &t;
}

Tape::Scope::~Scope() { g_active_tape = prev_; }

Tape* Tape::active() { return g_active_tape; }

void Tape::backward(const Tensor& loss) {
  require(loss.size() == 1, "backward: loss must be scalar");
  require(loss.tracked(), "backward: loss was not produced by recorded primitives");
  auto node = loss.node();
  grad_of(node)[0] = 1.0;
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
}

// ---------------------------------------------------------------------------
// elementwise
// ---------------------------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "add: shape mismatch");
  std::vector<double> v(a.values());
  const double* pb = b.data();
  for (size_t i = 0; i < v.size(); ++i) v[i] += pb[i];
  Tensor out = make_op_output(a.shape(), std::move(v), {&a, &b});
  record_if_tracked(out, [an = a.node(), bn = b.node(), on = out.node()]() {
    const auto& g = grad_of(on);
    accum(an, g.data(), g.size());
    accum(bn, g.data(), g.size());
  });
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "sub: shape mismatch");
  std::vector<double> v(a.values());
  const double* pb = b.data();
  for (size_t i = 0; i < v.size(); ++i) v[i] -= pb[i];
  Tensor out = make_op_output(a.shape(), std::move(v), {&a, &b});
  record_if_tracked(out, [an = a.node(), bn = b.node(), on = out.node()]() {
    const auto& g = grad_of(on);
    accum(an, g.data(), g.size());
    if (bn->requires_grad || bn->on_tape) {
      auto& gb = grad_of(bn);
      for (size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "mul: shape mismatch");
  std::vector<double> v(a.values());
  const double* pb = b.data();
  for (size_t i = 0; i < v.size(); ++i) v[i] *= pb[i];
  Tensor out = make_op_output(a.shape(), std::move(v), {&a, &b});
  record_if_tracked(out, [an = a.node(), bn = b.node(), on = out.node()]() {
    const auto& g = grad_of(on);
    if (an->requires_grad || an->on_tape) {
      auto& ga = grad_of(an);
      for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bn->value[i];
    }
    if (bn->requires_grad || bn->on_tape) {
      auto& gb = grad_of(bn);
      for (size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * an->value[i];
    }
  });
  return out;
}

Tensor scale(const Tensor& a, double c) {
  std::vector<double> v(a.values());
  for (double& x : v) x *= c;
  Tensor out = make_op_output(a.shape(), std::move(v), {&a});
  record_if_tracked(out, [an = a.node(), on = out.node(), c]() {
    const auto& g = grad_of(on);
    if (an->requires_grad || an->on_tape) {
      auto& ga = grad_of(an);
      for (size_t i = 0; i < g.size(); ++i) ga[i] += c * g[i];
    }
  });
  return out;
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

namespace {

template <typename FwdFn, typename DerivFn>
Tensor unary_ew(const Tensor& a, FwdFn f, DerivFn df) {
  std::vector<double> v(a.values());
  for (double& x : v) x = f(x);
  Tensor out = make_op_output(a.shape(), std::move(v), {&a});
  if (out.tracked()) {
    Tape::active()->record([an = a.node(), on = out.node(), df]() {
      const auto& g = grad_of(on);
      if (!an->requires_grad && !an->on_tape) return;
      auto& ga = grad_of(an);
      for (size_t i = 0; i < g.size(); ++i)
        ga[i] += g[i] * df(an->value[i], on->value[i]);
    });
  }
  return out;
}

double stable_softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Tensor tanh_t(const Tensor& a) {
  return unary_ew(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid_t(const Tensor& a) {
  return unary_ew(a, sigmoid, [](double, double y) { return y * (1.0 - y); });
}

Tensor relu_t(const Tensor& a) {
  return unary_ew(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor log_t(const Tensor& a) {
  return unary_ew(
      a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Tensor xlogx(const Tensor& a) {
  constexpr double kTiny = 1e-300;
  return unary_ew(
      a, [](double x) { return x > kTiny ? x * std::log(x) : 0.0; },
      [](double x, double) { return x > kTiny ? std::log(x) + 1.0 : 0.0; });
}

Tensor softplus(const Tensor& a) {
  return unary_ew(a, stable_softplus,
                  [](double x, double) { return sigmoid(x); });
}

Tensor softplus_scaled(const Tensor& x, const Tensor& psi) {
  require(psi.size() == 1, "softplus_scaled: psi must be scalar");
  const double p = psi.item();
  require(p > 0.0, "softplus_scaled: psi must be positive");
  std::vector<double> v(x.values());
  for (double& xv : v) xv = p * stable_softplus(xv / p);
  Tensor out = make_op_output(x.shape(), std::move(v), {&x, &psi});
  record_if_tracked(out, [xn = x.node(), pn = psi.node(), on = out.node(), p]() {
    const auto& g = grad_of(on);
    const bool gx = xn->requires_grad || xn->on_tape;
    const bool gp = pn->requires_grad || pn->on_tape;
    double psum = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
      const double u = xn->value[i] / p;
      const double s = sigmoid(u);
      if (gx) grad_of(xn)[i] += g[i] * s;
      if (gp) psum += g[i] * (stable_softplus(u) - u * s);
    }
    if (gp) grad_of(pn)[0] += psum;
  });
  return out;
}

// ---------------------------------------------------------------------------
// reductions / contractions
// ---------------------------------------------------------------------------

Tensor sum(const Tensor& a) {
  double s = std::accumulate(a.values().begin(), a.values().end(), 0.0);
  Tensor out = make_op_output({1}, {s}, {&a});
  record_if_tracked(out, [an = a.node(), on = out.node()]() {
    const double g = grad_of(on)[0];
    if (!an->requires_grad && !an->on_tape) return;
    auto& ga = grad_of(an);
    for (double& x : ga) x += g;
  });
  return out;
}

Tensor dot(const Tensor& a, const Tensor& b) {
  require(a.size() == b.size(), "dot: length mismatch");
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  Tensor out = make_op_output({1}, {s}, {&a, &b});
  record_if_tracked(out, [an = a.node(), bn = b.node(), on = out.node()]() {
    const double g = grad_of(on)[0];
    if (an->requires_grad || an->on_tape) {
      auto& ga = grad_of(an);
      for (size_t i = 0; i < ga.size(); ++i) ga[i] += g * bn->value[i];
    }
    if (bn->requires_grad || bn->on_tape) {
      auto& gb = grad_of(bn);
      for (size_t i = 0; i < gb.size(); ++i) gb[i] += g * an->value[i];
    }
  });
  return out;
}

Tensor emax(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "emax: shape mismatch");
  std::vector<double> v(a.values());
  const double* pb = b.data();
  for (size_t i = 0; i < v.size(); ++i) v[i] = std::max(v[i], pb[i]);
  Tensor out = make_op_output(a.shape(), std::move(v), {&a, &b});
  record_if_tracked(out, [an = a.node(), bn = b.node(), on = out.node()]() {
    const auto& g = grad_of(on);
    for (size_t i = 0; i < g.size(); ++i) {
      const bool a_wins = an->value[i] >= bn->value[i];
      const Node& w = a_wins ? an : bn;
      if (w->requires_grad || w->on_tape) grad_of(w)[i] += g[i];
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// linear algebra
// ---------------------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.shape().size() == 2 && b.shape().size() == 2, "matmul: rank-2 only");
  const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
  require(b.dim(0) == k, "matmul: inner dimension mismatch");
  std::vector<double> v(static_cast<size_t>(m) * n, 0.0);
  const double* pa = a.data();
  const double* pb = b.data();
  for (int i = 0; i < m; ++i)
    for (int kk = 0; kk < k; ++kk) {
      const double aik = pa[i * k + kk];
      if (aik == 0.0) continue;
      const double* brow = pb + kk * n;
      double* orow = v.data() + i * n;
      for (int j = 0; j < n; ++j) orow[j] += aik * brow[j];
    }
  Tensor out = make_op_output({m, n}, std::move(v), {&a, &b});
  record_if_tracked(out, [an = a.node(), bn = b.node(), on = out.node(), m, k, n]() {
    const auto& g = grad_of(on);
    if (an->requires_grad || an->on_tape) {
      auto& ga = grad_of(an);  // dA = G * B^T
      for (int i = 0; i < m; ++i)
        for (int kk = 0; kk < k; ++kk) {
          double s = 0.0;
          const double* grow = g.data() + i * n;
          const double* brow = bn->value.data() + kk * n;
          for (int j = 0; j < n; ++j) s += grow[j] * brow[j];
          ga[i * k + kk] += s;
        }
    }
    if (bn->requires_grad || bn->on_tape) {
      auto& gb = grad_of(bn);  // dB = A^T * G
      for (int kk = 0; kk < k; ++kk)
        for (int i = 0; i < m; ++i) {
          const double aik = an->value[i * k + kk];
          if (aik == 0.0) continue;
          const double* grow = g.data() + i * n;
          double* brow = gb.data() + kk * n;
          for (int j = 0; j < n; ++j) brow[j] += aik * grow[j];
        }
    }
  });
  return out;
}

Tensor add_rowvec(const Tensor& a, const Tensor& b) {
  require(a.shape().size() == 2, "add_rowvec: matrix expected");
  const int m = a.dim(0), n = a.dim(1);
  require(b.size() == n, "add_rowvec: row length mismatch");
  std::vector<double> v(a.values());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) v[static_cast<size_t>(i) * n + j] += b.data()[j];
  Tensor out = make_op_output(a.shape(), std::move(v), {&a, &b});
  record_if_tracked(out, [an = a.node(), bn = b.node(), on = out.node(), m, n]() {
    const auto& g = grad_of(on);
    accum(an, g.data(), g.size());
    if (bn->requires_grad || bn->on_tape) {
      auto& gb = grad_of(bn);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) gb[j] += g[static_cast<size_t>(i) * n + j];
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// structural ops
// ---------------------------------------------------------------------------

Tensor concat_vec(const std::vector<Tensor>& parts) {
  int total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<double> v;
  v.reserve(static_cast<size_t>(total));
  for (const auto& p : parts) v.insert(v.end(), p.values().begin(), p.values().end());
  bool tracked = false;
  for (const auto& p : parts) tracked |= p.tracked();
  Tensor out = make_op_output_tracked({total}, std::move(v), tracked);
  if (out.tracked()) {
    std::vector<Node> nodes;
    nodes.reserve(parts.size());
    for (const auto& p : parts) nodes.push_back(p.node());
    Tape::active()->record([nodes, on = out.node()]() {
      const auto& g = grad_of(on);
      size_t off = 0;
      for (const auto& nptr : nodes) {
        accum(nptr, g.data() + off, nptr->value.size());
        off += nptr->value.size();
      }
    });
  }
  return out;
}

Tensor reshape(const Tensor& a, Shape shape) {
  require(shape_numel(shape) == a.size(), "reshape: element count mismatch");
  Tensor out = make_op_output(std::move(shape), a.values(), {&a});
  record_if_tracked(out, [an = a.node(), on = out.node()]() {
    const auto& g = grad_of(on);
    accum(an, g.data(), g.size());
  });
  return out;
}

Tensor slice_vec(const Tensor& a, int begin, int len) {
  require(a.shape().size() == 1, "slice_vec: 1-D expected");
  require(begin >= 0 && begin + len <= a.size(), "slice_vec: range out of bounds");
  std::vector<double> v(a.values().begin() + begin, a.values().begin() + begin + len);
  Tensor out = make_op_output({len}, std::move(v), {&a});
  record_if_tracked(out, [an = a.node(), on = out.node(), begin, len]() {
    if (!an->requires_grad && !an->on_tape) return;
    const auto& g = grad_of(on);
    auto& ga = grad_of(an);
    for (int i = 0; i < len; ++i) ga[static_cast<size_t>(begin + i)] += g[static_cast<size_t>(i)];
  });
  return out;
}

Tensor gather_rows(const Tensor& a, const std::vector<int>& idx) {
  require(a.shape().size() == 2, "gather_rows: matrix expected");
  const int n = a.dim(1);
  std::vector<double> v(idx.size() * static_cast<size_t>(n));
  for (size_t k = 0; k < idx.size(); ++k)
    std::copy_n(a.data() + static_cast<size_t>(idx[k]) * n, n, v.data() + k * n);
  Tensor out = make_op_output({static_cast<int>(idx.size()), n}, std::move(v), {&a});
  record_if_tracked(out, [an = a.node(), on = out.node(), idx, n]() {
    if (!an->requires_grad && !an->on_tape) return;
    const auto& g = grad_of(on);
    auto& ga = grad_of(an);
    for (size_t k = 0; k < idx.size(); ++k)
      for (int j = 0; j < n; ++j)
        ga[static_cast<size_t>(idx[k]) * n + j] += g[k * static_cast<size_t>(n) + j];
  });
  return out;
}

Tensor row_update2(const Tensor& z, int u, int v, const Tensor& row_u,
                   const Tensor& row_v) {
  require(z.shape().size() == 2, "row_update2: matrix expected");
  require(u != v, "row_update2: u == v");
  const int n = z.dim(1);
  require(row_u.size() == n && row_v.size() == n, "row_update2: row length mismatch");
  std::vector<double> val(z.values());
  std::copy_n(row_u.data(), n, val.data() + static_cast<size_t>(u) * n);
  std::copy_n(row_v.data(), n, val.data() + static_cast<size_t>(v) * n);
  Tensor out = make_op_output(z.shape(), std::move(val), {&z, &row_u, &row_v});
  record_if_tracked(out, [zn = z.node(), un = row_u.node(), vn = row_v.node(),
                          on = out.node(), u, v, n]() {
    const auto& g = grad_of(on);
    if (zn->requires_grad || zn->on_tape) {
      auto& gz = grad_of(zn);
      for (size_t i = 0; i < g.size(); ++i) {
        const int row = static_cast<int>(i) / n;
        if (row == u || row == v) continue;
        gz[i] += g[i];
      }
    }
    accum(un, g.data() + static_cast<size_t>(u) * n, static_cast<size_t>(n));
    accum(vn, g.data() + static_cast<size_t>(v) * n, static_cast<size_t>(n));
  });
  return out;
}

Tensor set_pair_fiber(const Tensor& s, int u, int v, const Tensor& fiber) {
  require(s.shape().size() == 3, "set_pair_fiber: rank-3 expected");
  const int n = s.dim(0), r = s.dim(2);
  require(s.dim(1) == n, "set_pair_fiber: square expected");
  require(fiber.size() == r, "set_pair_fiber: fiber length mismatch");
  require(u != v, "set_pair_fiber: u == v");
  std::vector<double> val(s.values());
  const size_t at_uv = (static_cast<size_t>(u) * n + v) * r;
  const size_t at_vu = (static_cast<size_t>(v) * n + u) * r;
  std::copy_n(fiber.data(), r, val.data() + at_uv);
  std::copy_n(fiber.data(), r, val.data() + at_vu);
  Tensor out = make_op_output(s.shape(), std::move(val), {&s, &fiber});
  record_if_tracked(out, [sn = s.node(), fn = fiber.node(), on = out.node(),
                          at_uv, at_vu, r]() {
    const auto& g = grad_of(on);
    if (sn->requires_grad || sn->on_tape) {
      auto& gs = grad_of(sn);
      for (size_t i = 0; i < g.size(); ++i) {
        if ((i >= at_uv && i < at_uv + r) || (i >= at_vu && i < at_vu + r)) continue;
        gs[i] += g[i];
      }
    }
    if (fn->requires_grad || fn->on_tape) {
      auto& gf = grad_of(fn);
      for (int c = 0; c < r; ++c) gf[c] += g[at_uv + c] + g[at_vu + c];
    }
  });
  return out;
}

Tensor gather_attn(const Tensor& s, int u, const std::vector<int>& idx, int c) {
  require(s.shape().size() == 3, "gather_attn: rank-3 expected");
  const int n = s.dim(1), r = s.dim(2);
  std::vector<double> v(idx.size());
  for (size_t k = 0; k < idx.size(); ++k)
    v[k] = s.data()[(static_cast<size_t>(u) * n + idx[k]) * r + c];
  Tensor out = make_op_output({static_cast<int>(idx.size())}, std::move(v), {&s});
  record_if_tracked(out, [sn = s.node(), on = out.node(), idx, u, n, r, c]() {
    if (!sn->requires_grad && !sn->on_tape) return;
    const auto& g = grad_of(on);
    auto& gs = grad_of(sn);
    for (size_t k = 0; k < idx.size(); ++k)
      gs[(static_cast<size_t>(u) * n + idx[k]) * r + c] += g[k];
  });
  return out;
}

Tensor softmax_vec(const Tensor& a) {
  require(a.shape().size() == 1, "softmax_vec: 1-D expected");
  const int n = a.size();
  std::vector<double> v(static_cast<size_t>(n));
  double mx = a.data()[0];
  for (int i = 1; i < n; ++i) mx = std::max(mx, a.data()[i]);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    v[static_cast<size_t>(i)] = std::exp(a.data()[i] - mx);
    z += v[static_cast<size_t>(i)];
  }
  for (double& x : v) x /= z;
  Tensor out = make_op_output(a.shape(), std::move(v), {&a});
  record_if_tracked(out, [an = a.node(), on = out.node(), n]() {
    if (!an->requires_grad && !an->on_tape) return;
    const auto& g = grad_of(on);
    auto& ga = grad_of(an);
    double gy = 0.0;
    for (int i = 0; i < n; ++i) gy += g[static_cast<size_t>(i)] * on->value[static_cast<size_t>(i)];
    for (int i = 0; i < n; ++i)
      ga[static_cast<size_t>(i)] +=
          on->value[static_cast<size_t>(i)] * (g[static_cast<size_t>(i)] - gy);
  });
  return out;
}

// ---------------------------------------------------------------------------
// bilinear
// ---------------------------------------------------------------------------

Tensor pairwise_bilinear(const Tensor& h, const Tensor& w) {
  require(h.shape().size() == 2 && w.shape().size() == 3, "pairwise_bilinear: bad ranks");
  const int n = h.dim(0), d = h.dim(1);
  require(w.dim(0) == d && w.dim(1) == d, "pairwise_bilinear: W must be {d,d,m}");
  const int m = w.dim(2);
  const size_t dm = static_cast<size_t>(d) * m;

  // T[i,b,c] = sum_a H[i,a] W[a,b,c]; treating W as d x (d*m) this is a matmul.
  std::vector<double> t(static_cast<size_t>(n) * dm, 0.0);
  const double* ph = h.data();
  const double* pw = w.data();
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < d; ++a) {
      const double hia = ph[static_cast<size_t>(i) * d + a];
      if (hia == 0.0) continue;
      const double* wrow = pw + static_cast<size_t>(a) * dm;
      double* trow = t.data() + static_cast<size_t>(i) * dm;
      for (size_t bc = 0; bc < dm; ++bc) trow[bc] += hia * wrow[bc];
    }

  // out[i,j,c] = sum_b T[i,b,c] H[j,b]
  std::vector<double> v(static_cast<size_t>(n) * n * m, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double* orow = v.data() + (static_cast<size_t>(i) * n + j) * m;
      const double* ti = t.data() + static_cast<size_t>(i) * dm;
      const double* hj = ph + static_cast<size_t>(j) * d;
      for (int b = 0; b < d; ++b) {
        const double hjb = hj[b];
        if (hjb == 0.0) continue;
        const double* tb = ti + static_cast<size_t>(b) * m;
        for (int c = 0; c < m; ++c) orow[c] += tb[c] * hjb;
      }
    }

  Tensor out = make_op_output({n, n, m}, std::move(v), {&h, &w});
  record_if_tracked(out, [hn = h.node(), wn = w.node(), on = out.node(),
                          t = std::move(t), n, d, m, dm]() {
    const auto& g = grad_of(on);
    const bool need_h = hn->requires_grad || hn->on_tape;
    const bool need_w = wn->requires_grad || wn->on_tape;
    if (!need_h && !need_w) return;

    // dT[i,b,c] = sum_j G[i,j,c] H[j,b]
    std::vector<double> dt(static_cast<size_t>(n) * dm, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double* grow = g.data() + (static_cast<size_t>(i) * n + j) * m;
        const double* hj = hn->value.data() + static_cast<size_t>(j) * d;
        double* dti = dt.data() + static_cast<size_t>(i) * dm;
        for (int b = 0; b < d; ++b) {
          const double hjb = hj[b];
          if (hjb == 0.0) continue;
          double* dtb = dti + static_cast<size_t>(b) * m;
          for (int c = 0; c < m; ++c) dtb[c] += grow[c] * hjb;
        }
      }

    if (need_w) {
      // dW[a,b,c] = sum_i H[i,a] dT[i,b,c]
      auto& gw = grad_of(wn);
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < d; ++a) {
          const double hia = hn->value[static_cast<size_t>(i) * d + a];
          if (hia == 0.0) continue;
          const double* dti = dt.data() + static_cast<size_t>(i) * dm;
          double* gwa = gw.data() + static_cast<size_t>(a) * dm;
          for (size_t bc = 0; bc < dm; ++bc) gwa[bc] += hia * dti[bc];
        }
    }
    if (need_h) {
      auto& gh = grad_of(hn);
      // first slot: dH[i,a] += sum_bc dT[i,b,c] W[a,b,c]
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < d; ++a) {
          double s = 0.0;
          const double* dti = dt.data() + static_cast<size_t>(i) * dm;
          const double* wa = wn->value.data() + static_cast<size_t>(a) * dm;
          for (size_t bc = 0; bc < dm; ++bc) s += dti[bc] * wa[bc];
          gh[static_cast<size_t>(i) * d + a] += s;
        }
      // second slot: dH[j,b] += sum_ic G[i,j,c] T[i,b,c]
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double* grow = g.data() + (static_cast<size_t>(i) * n + j) * m;
          const double* ti = t.data() + static_cast<size_t>(i) * dm;
          double* ghj = gh.data() + static_cast<size_t>(j) * d;
          for (int b = 0; b < d; ++b) {
            double s = 0.0;
            const double* tb = ti + static_cast<size_t>(b) * m;
            for (int c = 0; c < m; ++c) s += grow[c] * tb[c];
            ghj[b] += s;
          }
        }
    }
  });
  return out;
}

Tensor bilinear_form(const Tensor& x, const Tensor& w, const Tensor& y) {
  require(w.shape().size() == 3, "bilinear_form: W must be {d,d,m}");
  const int d = w.dim(0), d2 = w.dim(1), m = w.dim(2);
  require(x.size() == d && y.size() == d2, "bilinear_form: shape mismatch");
  std::vector<double> v(static_cast<size_t>(m), 0.0);
  const double* px = x.data();
  const double* py = y.data();
  const double* pw = w.data();
  for (int a = 0; a < d; ++a) {
    if (px[a] == 0.0) continue;
    for (int b = 0; b < d2; ++b) {
      const double xy = px[a] * py[b];
      if (xy == 0.0) continue;
      const double* wab = pw + (static_cast<size_t>(a) * d2 + b) * m;
      for (int c = 0; c < m; ++c) v[static_cast<size_t>(c)] += xy * wab[c];
    }
  }
  Tensor out = make_op_output({m}, std::move(v), {&x, &w, &y});
  record_if_tracked(out, [xn = x.node(), wn = w.node(), yn = y.node(),
                          on = out.node(), d, d2, m]() {
    const auto& g = grad_of(on);
    const bool need_x = xn->requires_grad || xn->on_tape;
    const bool need_y = yn->requires_grad || yn->on_tape;
    const bool need_w = wn->requires_grad || wn->on_tape;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d2; ++b) {
        const double* wab = wn->value.data() + (static_cast<size_t>(a) * d2 + b) * m;
        double gw_dot = 0.0;
        for (int c = 0; c < m; ++c) gw_dot += g[static_cast<size_t>(c)] * wab[c];
        if (need_x) grad_of(xn)[static_cast<size_t>(a)] += gw_dot * yn->value[static_cast<size_t>(b)];
        if (need_y) grad_of(yn)[static_cast<size_t>(b)] += gw_dot * xn->value[static_cast<size_t>(a)];
        if (need_w) {
          const double xy = xn->value[static_cast<size_t>(a)] * yn->value[static_cast<size_t>(b)];
          double* gwab = grad_of(wn).data() + (static_cast<size_t>(a) * d2 + b) * m;
          for (int c = 0; c < m; ++c) gwab[c] += xy * g[static_cast<size_t>(c)];
        }
      }
  });
  return out;
}

Tensor mask_mul(const Tensor& a, const std::vector<double>& mask) {
  require(a.values().size() == mask.size(), "mask_mul: size mismatch");
  std::vector<double> v(a.values());
  for (size_t i = 0; i < v.size(); ++i) v[i] *= mask[i];
  Tensor out = make_op_output(a.shape(), std::move(v), {&a});
  record_if_tracked(out, [an = a.node(), on = out.node(), mask]() {
    if (!an->requires_grad && !an->on_tape) return;
    const auto& g = grad_of(on);
    auto& ga = grad_of(an);
    for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * mask[i];
  });
  return out;
}

Tensor sum_axis0_3d(const Tensor& e) {
  require(e.shape().size() == 3, "sum_axis0_3d: rank-3 expected");
  const int n0 = e.dim(0), n1 = e.dim(1), m = e.dim(2);
  std::vector<double> v(static_cast<size_t>(n1) * m, 0.0);
  const double* pe = e.data();
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) {
      const double* row = pe + (static_cast<size_t>(i) * n1 + j) * m;
      double* orow = v.data() + static_cast<size_t>(j) * m;
      for (int c = 0; c < m; ++c) orow[c] += row[c];
    }
  Tensor out = make_op_output({n1, m}, std::move(v), {&e});
  record_if_tracked(out, [en = e.node(), on = out.node(), n0, n1, m]() {
    if (!en->requires_grad && !en->on_tape) return;
    const auto& g = grad_of(on);
    auto& ge = grad_of(en);
    for (int i = 0; i < n0; ++i)
      for (int j = 0; j < n1; ++j) {
        double* row = ge.data() + (static_cast<size_t>(i) * n1 + j) * m;
        const double* grow = g.data() + static_cast<size_t>(j) * m;
        for (int c = 0; c < m; ++c) row[c] += grow[c];
      }
  });
  return out;
}

Tensor straight_through(const Tensor& soft, std::vector<double> hard) {
  require(soft.values().size() == hard.size(), "straight_through: size mismatch");
  Tensor out = make_op_output(soft.shape(), std::move(hard), {&soft});
  record_if_tracked(out, [sn = soft.node(), on = out.node()]() {
    const auto& g = grad_of(on);
    accum(sn, g.data(), g.size());
  });
  return out;
}

Tensor gumbel_softmax_sample(const Tensor& logits, double temperature, bool hard,
                             Rng& rng) {
  require(temperature > 0.0, "gumbel_softmax_sample: temperature must be positive");
  const int n = logits.size();
  std::vector<double> noisy(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) noisy[static_cast<size_t>(i)] = rng.gumbel();
  Tensor g = Tensor::from({n}, std::move(noisy));
  Tensor soft = softmax_vec(scale(add(logits, g), 1.0 / temperature));
  if (!hard) return soft;
  int arg = 0;
  for (int i = 1; i < n; ++i)
    if (soft.data()[i] > soft.data()[arg]) arg = i;
  std::vector<double> onehot(static_cast<size_t>(n), 0.0);
  onehot[static_cast<size_t>(arg)] = 1.0;
  return straight_through(soft, std::move(onehot));
}

}  // namespace ldg
