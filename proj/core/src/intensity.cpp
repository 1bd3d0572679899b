#include "ldg/intensity.hpp"

namespace ldg {

Tensor intensity_rate(const IntensityParams& p, int k) {
  require(k == 0 || k == 1, "intensity: kind must be 0 or 1");
  return softplus(p.rate_raw[k]);
}

Tensor intensity_concat(const Tensor& z_u, const Tensor& z_v, int k,
                        const IntensityParams& p) {
  require(k == 0 || k == 1, "intensity: kind must be 0 or 1");
  Tensor pair = concat_vec({z_u, z_v});
  Tensor score = dot(p.compat_concat[k], pair);
  return softplus_scaled(score, intensity_rate(p, k));
}

Tensor intensity_bilinear(const Tensor& z_u, const Tensor& z_v, int k,
                          const IntensityParams& p) {
  require(k == 0 || k == 1, "intensity: kind must be 0 or 1");
  Tensor zu = z_u.shape().size() == 1 ? z_u : reshape(z_u, {z_u.size()});
  Tensor zv = z_v.shape().size() == 1 ? z_v : reshape(z_v, {z_v.size()});
  Tensor score = bilinear_form(zu, p.compat_bilinear[k], zv);
  return softplus_scaled(score, intensity_rate(p, k));
}

}  // namespace ldg
