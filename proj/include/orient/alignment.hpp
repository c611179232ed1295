#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "orient/forward.hpp"
#include "orient/so3.hpp"
#include "orient/volume.hpp"

namespace orient {

// Reconstructions are only defined up to a global group element (the frame
// is inherited from the initial template), so fidelity is reported as the
// best PCC over that element.

struct PolarAlignment {
  double pcc = -1.0;
  long shift = 0;
};

/// max_k pcc(rotate_polar(estimate, k), reference), exhaustive over shifts.
PolarAlignment aligned_pcc(const PolarImage& estimate, const PolarImage& reference);

struct VolumeAlignment {
  double pcc = -1.0;
  Rotation rotation;
};

struct VolumeAlignmentOptions {
  std::size_t coarse_samples = 1000;  ///< Haar samples plus the identity
  int refine_rounds = 4;
  std::size_t refine_samples = 60;    ///< IG perturbations per round
  std::uint64_t seed = 0x616c6967;
  Interpolation method = Interpolation::Trilinear;
};

/// Approximate max_g pcc(rotate_volume(estimate, g), reference): coarse
/// Haar search followed by shrinking local IG perturbations of the best.
VolumeAlignment aligned_pcc(const VolumeGrid& estimate, const VolumeGrid& reference,
                            const VolumeAlignmentOptions& options = {});

}  // namespace orient
