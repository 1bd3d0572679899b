#pragma once

#include <vector>

#include "ldg/tensor.hpp"

namespace ldg {

/// The evolving temporal-attention tensor S, {N, N, r}. Row-normalized
/// real values with r = 1 when driven by the association graph; one-hot
/// (or all-zero "non-edge") fibers when sampled from the encoder.
struct AttentionState {
  Tensor s;  // {N, N, r}

  AttentionState() = default;
  AttentionState(int n_nodes, int r) : s(Tensor::zeros({n_nodes, n_nodes, r})) {}

  int n() const { return s.dim(0); }
  int r() const { return s.dim(2); }

  double at(int u, int v, int c) const {
    return s.data()[(static_cast<size_t>(u) * n() + v) * r() + c];
  }

  /// Partners i != u with S[u,i,c] > 0.
  std::vector<int> nonzero_partners(int u, int c) const {
    std::vector<int> out;
    const int nn = n(), rr = r();
    const double* base = s.data() + static_cast<size_t>(u) * nn * rr;
    for (int i = 0; i < nn; ++i) {
      if (i == u) continue;
      if (base[static_cast<size_t>(i) * rr + c] > 0.0) out.push_back(i);
    }
    return out;
  }

  /// Detach from any tape (state cut at batch boundaries).
  void detach() { s = s.detach(); }
};

}  // namespace ldg
