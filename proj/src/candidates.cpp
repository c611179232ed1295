#include "orient/candidates.hpp"

#include <stdexcept>

namespace orient {

CandidateSet CandidateSet::build(const VolumeGrid& vbar, const RotationPrior& prior, std::size_t count,
                                 std::uint64_t seed, bool projected, Interpolation method) {
  if (count == 0) throw std::invalid_argument("candidate set needs at least one rotation");
  Rng rng(seed);
  CandidateSet c = from_rotations(vbar, prior.sample(rng, count), projected, method);
  c.prior = prior;
  c.seed = seed;
  return c;
}

CandidateSet CandidateSet::from_rotations(const VolumeGrid& vbar, std::vector<Rotation> rotations, bool projected,
                                          Interpolation method) {
  if (rotations.empty()) throw std::invalid_argument("candidate set needs at least one rotation");
  const std::size_t d = projected ? vbar.n() * vbar.n() : vbar.size();
  const long count = static_cast<long>(rotations.size());
  Eigen::MatrixXd templates(static_cast<Eigen::Index>(d), count);
  if (projected) {
    for (long l = 0; l < count; ++l) {
      const std::vector<double> x = clean_signal(vbar, rotations[l], true, method);
      templates.col(l) = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(d));
    }
  } else {
    // rotate_volume_into is itself parallel over slices.
    for (long l = 0; l < count; ++l) {
      rotate_volume_into(vbar.data(), vbar.n(), rotations[l].inverse(), method,
                         std::span<double>(templates.col(l).data(), d));
    }
  }
  return from_templates(std::move(rotations), std::move(templates));
}

CandidateSet CandidateSet::from_templates(std::vector<Rotation> rotations, Eigen::MatrixXd templates) {
  if (rotations.empty()) throw std::invalid_argument("candidate set needs at least one rotation");
  if (static_cast<Eigen::Index>(rotations.size()) != templates.cols()) {
    throw std::invalid_argument("one template column per rotation required");
  }
  CandidateSet c;
  c.rotations = std::move(rotations);
  c.templates = std::move(templates);
  c.template_sq_norms = c.templates.colwise().squaredNorm().transpose();
  return c;
}

}  // namespace orient
