#include "orient/alignment.hpp"

#include <vector>

#include "orient/errors.hpp"
#include "orient/priors.hpp"
#include "orient/reconstruct.hpp"

namespace orient {

PolarAlignment aligned_pcc(const PolarImage& estimate, const PolarImage& reference) {
  if (estimate.size() != reference.size()) throw DimensionMismatch("aligned_pcc: shapes differ");
  PolarAlignment best;
  std::vector<double> buf(estimate.size());
  for (long k = 0; k < static_cast<long>(estimate.l_angular()); ++k) {
    rotate_polar_into(estimate.data(), estimate.d_radial(), estimate.l_angular(), k, buf);
    const double v = pcc(buf, reference.data());
    if (v > best.pcc) best = {v, k};
  }
  return best;
}

VolumeAlignment aligned_pcc(const VolumeGrid& estimate, const VolumeGrid& reference,
                            const VolumeAlignmentOptions& options) {
  if (estimate.n() != reference.n()) throw DimensionMismatch("aligned_pcc: shapes differ");
  Rng rng(options.seed);
  std::vector<double> buf(estimate.size());
  VolumeAlignment best;
  auto consider = [&](const Rotation& g) {
    rotate_volume_into(estimate.data(), estimate.n(), g, options.method, buf);
    double v = -1.0;
    try {
      v = pcc(buf, reference.data());
    } catch (const ZeroVariance&) {
      return;
    }
    if (v > best.pcc) best = {v, g};
  };
  consider(Rotation());
  for (const Rotation& g : sample_uniform(rng, options.coarse_samples)) consider(g);
  double eta = 0.35;
  for (int round = 0; round < options.refine_rounds; ++round, eta *= 0.5) {
    const Rotation center = best.rotation;
    for (const Rotation& d : ig_sample(rng, eta, options.refine_samples)) consider(center * d);
  }
  return best;
}

}  // namespace orient
