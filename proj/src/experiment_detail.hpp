#pragma once

#include <span>
#include <string>
#include <vector>

#include "orient/experiment.hpp"

namespace orient::detail {

struct Summary {
  double mean = 0.0;
  double se = 0.0;
};

Summary summarize(const std::vector<double>& v);

double resolve_sigma(const ExperimentConfig& cfg, double level, std::span<const double> reference);

// Infinite at sigma = 0, where the ratio is undefined.
double reported_snr(std::span<const double> reference, double sigma);

VolumeGrid load_phantom(const PhantomSpec& spec);

ResultRecord record(const ExperimentConfig& cfg, double sigma, double snr, std::size_t grid_size,
                    std::string estimator, const Summary& s, std::size_t trials);

}  // namespace orient::detail
