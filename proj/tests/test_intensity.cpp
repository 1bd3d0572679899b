#include "ldg/intensity.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "ldg/rng.hpp"

namespace ldg {
namespace {

IntensityParams make_params(int d, uint64_t seed, double psi = 1.0) {
  Rng rng(seed);
  IntensityParams p;
  const double raw = std::log(std::exp(psi) - 1.0);
  for (int k = 0; k < 2; ++k) {
    p.rate_raw[k] = Tensor::leaf({1}, {raw});
    std::vector<double> omega(static_cast<size_t>(2 * d));
    for (double& x : omega) x = rng.normal() * 0.3;
    p.compat_concat[k] = Tensor::leaf({2 * d}, std::move(omega));
    std::vector<double> big(static_cast<size_t>(d) * d);
    for (double& x : big) x = rng.normal() * 0.3;
    p.compat_bilinear[k] = Tensor::leaf({d, d, 1}, std::move(big));
  }
  return p;
}

TEST(IntensityConcat, ZeroEmbeddingsGiveLogTwo) {
  const int d = 4;
  IntensityParams p = make_params(d, 1);
  Tensor z = Tensor::zeros({d});
  EXPECT_NEAR(intensity_concat(z, z, 1, p).item(), std::log(2.0), 1e-9);
  EXPECT_NEAR(intensity_concat(z, z, 0, p).item(), std::log(2.0), 1e-9);
}

TEST(IntensityBilinear, ZeroEmbeddingsGivePsiLogTwo) {
  const int d = 4;
  for (double psi : {0.5, 1.0, 3.0}) {
    IntensityParams p = make_params(d, 2, psi);
    Tensor z = Tensor::zeros({d});
    EXPECT_NEAR(intensity_bilinear(z, z, 1, p).item(), psi * std::log(2.0), 1e-9);
  }
}

TEST(IntensityBilinear, IdentityUnitVectors) {
  const int d = 3;
  IntensityParams p = make_params(d, 3);
  std::vector<double> eye(static_cast<size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) eye[static_cast<size_t>(i) * d + i] = 1.0;
  p.compat_bilinear[1] = Tensor::leaf({d, d, 1}, eye);
  Tensor e1 = Tensor::from({d}, {1.0, 0.0, 0.0});
  EXPECT_NEAR(intensity_bilinear(e1, e1, 1, p).item(), std::log(1.0 + std::exp(1.0)),
              1e-9);
}

TEST(Intensity, PositiveOnRandomInputs) {
  const int d = 6;
  IntensityParams p = make_params(d, 4);
  Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> zu(static_cast<size_t>(d)), zv(static_cast<size_t>(d));
    for (double& x : zu) x = rng.normal() * 2.0;
    for (double& x : zv) x = rng.normal() * 2.0;
    Tensor tu = Tensor::from({d}, zu);
    Tensor tv = Tensor::from({d}, zv);
    EXPECT_GT(intensity_concat(tu, tv, trial % 2, p).item(), 0.0);
    EXPECT_GT(intensity_bilinear(tu, tv, trial % 2, p).item(), 0.0);
  }
}

TEST(IntensityConcat, MatchesScalarRecomputation) {
  const int d = 3;
  IntensityParams p = make_params(d, 5, 0.8);
  Rng rng(123);
  std::vector<double> zu(static_cast<size_t>(d)), zv(static_cast<size_t>(d));
  for (double& x : zu) x = rng.normal();
  for (double& x : zv) x = rng.normal();

  double score = 0.0;
  const auto& omega = p.compat_concat[1].values();
  for (int i = 0; i < d; ++i) score += omega[static_cast<size_t>(i)] * zu[static_cast<size_t>(i)];
  for (int i = 0; i < d; ++i) score += omega[static_cast<size_t>(d + i)] * zv[static_cast<size_t>(i)];
  const double psi = std::log1p(std::exp(p.rate_raw[1].item()));
  const double expect = psi * std::log1p(std::exp(score / psi));

  EXPECT_NEAR(
      intensity_concat(Tensor::from({d}, zu), Tensor::from({d}, zv), 1, p).item(),
      expect, 1e-12);
}

TEST(IntensityBilinear, AsymmetryPermittedForGenericWeights) {
  const int d = 5;
  IntensityParams p = make_params(d, 6);
  Rng rng(7);
  int differing = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> zu(static_cast<size_t>(d)), zv(static_cast<size_t>(d));
    for (double& x : zu) x = rng.normal();
    for (double& x : zv) x = rng.normal();
    Tensor tu = Tensor::from({d}, zu);
    Tensor tv = Tensor::from({d}, zv);
    const double fwd = intensity_bilinear(tu, tv, 1, p).item();
    const double rev = intensity_bilinear(tv, tu, 1, p).item();
    differing += std::fabs(fwd - rev) > 1e-12 ? 1 : 0;
  }
  EXPECT_EQ(differing, 20);
}

TEST(Intensity, MonotoneInCompatibilityScore) {
  const int d = 2;
  IntensityParams p = make_params(d, 8, 1.3);
  // score = omega . [z_u, z_v]; scale z along omega to raise the score
  Tensor base = Tensor::from({d}, {0.5, -0.2});
  double prev = -1.0;
  for (double t = -3.0; t <= 3.0; t += 0.25) {
    std::vector<double> zu(static_cast<size_t>(d));
    const auto& omega = p.compat_concat[1].values();
    for (int i = 0; i < d; ++i) zu[static_cast<size_t>(i)] = t * omega[static_cast<size_t>(i)];
    const double lam =
        intensity_concat(Tensor::from({d}, zu), base, 1, p).item();
    if (prev >= 0.0) EXPECT_GT(lam, prev - 1e-12);
    prev = lam;
  }
}

}  // namespace
}  // namespace ldg
