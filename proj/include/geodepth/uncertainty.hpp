#pragma once

namespace geodepth {

/// Laplace depth belief; sigma is the standard deviation (sqrt(2) * scale).
struct DepthEstimate {
  double z = 0.0;
  double sigma = 1.0;
  bool valid = true;

  double laplace_scale() const;
};

struct LossWeights {
  double omega_w = 1.0;
};

double laplace_pdf(double z, const DepthEstimate& est);

/// |est.z - z_gt| / sigma + log(sigma). Throws NonPositiveSigma.
double reg_loss(const DepthEstimate& est, double z_gt);

double total_loss(double l_geo, double l_reg, const LossWeights& w);

/// Inverse-sigma weighted mean of the two depths. The returned sigma is
/// 2 / (1/sigma_reg + 1/sigma_geo), a diagnostic only. An invalid input is
/// ignored and the other returned as is.
DepthEstimate fuse(const DepthEstimate& reg, const DepthEstimate& geo);

}  // namespace geodepth
