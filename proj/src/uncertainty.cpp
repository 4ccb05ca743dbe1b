#include "geodepth/uncertainty.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "geodepth/error.hpp"

namespace geodepth {

namespace {

void require_positive_sigma(double sigma) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::NonPositiveSigma, "sigma = " + std::to_string(sigma));
  }
}

}  // namespace

double DepthEstimate::laplace_scale() const {
  return sigma / std::numbers::sqrt2;
}

double laplace_pdf(double z, const DepthEstimate& est) {
  require_positive_sigma(est.sigma);
  const double lambda = est.laplace_scale();
  return std::exp(-std::abs(z - est.z) / lambda) / (2.0 * lambda);
}

double reg_loss(const DepthEstimate& est, double z_gt) {
  require_positive_sigma(est.sigma);
  return std::abs(est.z - z_gt) / est.sigma + std::log(est.sigma);
}

double total_loss(double l_geo, double l_reg, const LossWeights& w) {
  return l_geo + w.omega_w * l_reg;
}

DepthEstimate fuse(const DepthEstimate& reg, const DepthEstimate& geo) {
  if (!geo.valid) return reg;
  if (!reg.valid) return geo;
  require_positive_sigma(reg.sigma);
  require_positive_sigma(geo.sigma);
  const double w_reg = 1.0 / reg.sigma;
  const double w_geo = 1.0 / geo.sigma;
  DepthEstimate out;
  out.z = (reg.z * w_reg + geo.z * w_geo) / (w_reg + w_geo);
  out.sigma = 2.0 / (w_reg + w_geo);
  return out;
}

}  // namespace geodepth
