#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ldg/evaluator.hpp"
#include "ldg/tensor.hpp"

namespace ldg::testing {

/// Central-difference gradient of `loss_fn` with respect to `param`,
/// entry by entry. `loss_fn` must recompute the loss from scratch (values
/// only, no tape) and be deterministic.
std::vector<double> finite_diff_grad(ldg::Tensor& param,
                                     const std::function<double()>& loss_fn,
                                     double step = 1e-5);

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor).
double max_rel_error(const std::vector<double>& a, const std::vector<double>& b,
                     double floor = 1e-5);

/// Triple-loop contraction oracle for bilinear_form.
std::vector<double> bilinear_oracle(const std::vector<double>& x,
                                    const std::vector<double>& w,
                                    const std::vector<double>& y, int d, int m);

/// Aggregates MAR / HITS@10 from dumped per-event scores, independently of
/// the evaluate() path (same tie-average rule, recomputed from raw scores).
struct AggregateOracle {
  double mar = 0.0;
  double hits10 = 0.0;
};
AggregateOracle aggregate_from_dump(const std::vector<ldg::ScoreDumpRow>& dump);

/// One-sided Kolmogorov-Smirnov distance of samples against Exp(rate).
double ks_distance_exponential(std::vector<double> samples, double rate);

}  // namespace ldg::testing
