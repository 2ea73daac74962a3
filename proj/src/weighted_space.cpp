#include "horizon/weighted_space.hpp"

#include <algorithm>
#include <limits>

namespace horizon {

TailDiagnosis diagnose_tail(const Eigen::VectorXd& integrand, const SpectralGrid& grid,
                            int blocks) {
  TailDiagnosis out;
  const double knee = 0.5 * grid.omega_max();
  const double width = (grid.omega_max() - knee) / blocks;
  Eigen::VectorXd envelope = Eigen::VectorXd::Zero(blocks);
  for (Eigen::Index j = 0; j < grid.nodes().size(); ++j) {
    const double w = std::abs(grid.nodes()(j));
    const double v = integrand(j);
    if (!std::isfinite(v)) {
      out.divergent = true;
      out.envelope_ratio = std::numeric_limits<double>::infinity();
      return out;
    }
    if (w < knee) continue;
    const int b = std::min(blocks - 1, static_cast<int>((w - knee) / width));
    envelope(b) = std::max(envelope(b), std::abs(v));
  }
  if (envelope(0) == 0.0) {
    out.divergent = envelope(blocks - 1) > 0.0;
    out.envelope_ratio = out.divergent ? std::numeric_limits<double>::infinity() : 0.0;
    return out;
  }
  out.envelope_ratio = envelope(blocks - 1) / envelope(0);
  out.divergent = out.envelope_ratio >= 1.0;
  return out;
}

double weighted_norm_sq(const Eigen::VectorXcd& u_on_grid, const WeightedNorm& norm,
                        const SpectralGrid& grid) {
  if (u_on_grid.size() != grid.nodes().size())
    throw std::invalid_argument("weighted_norm_sq: sample count does not match grid");
  const Eigen::VectorXd weight =
      (norm.sign * norm.r * grid.nodes().array().abs()).exp().matrix();
  const Eigen::VectorXd integrand = weight.cwiseProduct(u_on_grid.cwiseAbs2());
  if (norm.sign > 0 && diagnose_tail(integrand, grid).divergent)
    throw std::domain_error("weight/decay mismatch");
  return grid.integrate(integrand);
}

double weighted_norm_sq(const ComplexSpectrum& u, const WeightedNorm& norm,
                        const SpectralGrid& grid) {
  Eigen::VectorXcd samples(grid.nodes().size());
  for (Eigen::Index j = 0; j < samples.size(); ++j) samples(j) = u(grid.nodes()(j));
  return weighted_norm_sq(samples, norm, grid);
}

double lp_norm(const Eigen::VectorXcd& u_on_grid, int p, const SpectralGrid& grid) {
  if (u_on_grid.size() != grid.nodes().size())
    throw std::invalid_argument("lp_norm: sample count does not match grid");
  switch (p) {
    case kSupNorm:
      return u_on_grid.cwiseAbs().maxCoeff();
    case 1:
      return grid.integrate(u_on_grid.cwiseAbs());
    case 2:
      return std::sqrt(grid.integrate(u_on_grid.cwiseAbs2()));
    default:
      throw std::invalid_argument("lp_norm: p must be 1, 2 or infinity");
  }
}

}  // namespace horizon
