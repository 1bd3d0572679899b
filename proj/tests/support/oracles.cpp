#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace ldg::testing {

std::vector<double> finite_diff_grad(ldg::Tensor& param,
                                     const std::function<double()>& loss_fn,
                                     double step) {
  std::vector<double> grad(param.values().size(), 0.0);
  double* w = param.data();
  for (size_t i = 0; i < grad.size(); ++i) {
    const double saved = w[i];
    w[i] = saved + step;
    const double up = loss_fn();
    w[i] = saved - step;
    const double down = loss_fn();
    w[i] = saved;
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

double max_rel_error(const std::vector<double>& a, const std::vector<double>& b,
                     double floor) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::fabs(a[i]), std::fabs(b[i]), floor});
    worst = std::max(worst, std::fabs(a[i] - b[i]) / denom);
  }
  return worst;
}

std::vector<double> bilinear_oracle(const std::vector<double>& x,
                                    const std::vector<double>& w,
                                    const std::vector<double>& y, int d, int m) {
  std::vector<double> out(static_cast<size_t>(m), 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int c = 0; c < m; ++c)
        out[static_cast<size_t>(c)] +=
            x[static_cast<size_t>(i)] *
            w[(static_cast<size_t>(i) * d + j) * m + c] * y[static_cast<size_t>(j)];
  return out;
}

AggregateOracle aggregate_from_dump(const std::vector<ldg::ScoreDumpRow>& dump) {
  AggregateOracle out;
  if (dump.empty()) return out;
  double sum = 0.0, hits = 0.0;
  for (const auto& row : dump) {
    const double s_true = row.scores[static_cast<size_t>(row.true_v)];
    double better = 0.0, ties = 0.0;
    for (size_t v = 0; v < row.scores.size(); ++v) {
      if (static_cast<int>(v) == row.u || static_cast<int>(v) == row.true_v) continue;
      if (row.scores[v] > s_true) better += 1.0;
      else if (row.scores[v] == s_true) ties += 1.0;
    }
    const double rank = 1.0 + better + 0.5 * ties;
    sum += rank;
    hits += rank <= 10.0 ? 1.0 : 0.0;
  }
  out.mar = sum / static_cast<double>(dump.size());
  out.hits10 = hits / static_cast<double>(dump.size());
  return out;
}

double ks_distance_exponential(std::vector<double> samples, double rate) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double cdf = 1.0 - std::exp(-rate * samples[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    worst = std::max({worst, std::fabs(cdf - lo), std::fabs(cdf - hi)});
  }
  return worst;
}

}  // namespace ldg::testing
