#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "experiment_detail.hpp"
#include "orient/candidates.hpp"
#include "orient/errors.hpp"
#include "orient/estimators.hpp"
#include "orient/experiment.hpp"
#include "orient/kernels.hpp"

namespace orient {

namespace detail {

Summary summarize(const std::vector<double>& v) {
  Summary s;
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return s;
}

double resolve_sigma(const ExperimentConfig& cfg, double level, std::span<const double> reference) {
  switch (cfg.noise_scale) {
    case NoiseScale::Absolute:
      return level;
    case NoiseScale::Relative:
      return level * signal_rms(reference);
    case NoiseScale::Snr:
      return sigma_for_snr(reference, level);
  }
  return level;
}

double reported_snr(std::span<const double> reference, double sigma) {
  if (sigma == 0.0) return std::numeric_limits<double>::infinity();
  return snr_of(reference, sigma);
}

VolumeGrid load_phantom(const PhantomSpec& spec) { return make_phantom(spec.kind, spec.n, spec.seed, spec.path); }

ResultRecord record(const ExperimentConfig& cfg, double sigma, double snr, std::size_t grid_size,
                    std::string estimator, const Summary& s, std::size_t trials) {
  return {to_string(cfg.experiment), cfg.seed, sigma, snr, grid_size, std::move(estimator), s.mean, s.se, trials};
}

}  // namespace detail

namespace {

using detail::Summary;

constexpr std::uint64_t kTrialStream = 0x747269616c;
constexpr std::uint64_t kCandidateStream = 0x63616e64;
constexpr std::size_t kChunk = 256;

std::vector<double> reference_signal(const VolumeGrid& vbar, bool projected) {
  return projected ? project_z(vbar) : vbar.values();
}

// Observation i of a sweep depends only on (seed, i) and sigma: the truth
// rotation and the unit noise draw are shared by every cell of the sweep.
struct TrialBatch {
  Eigen::MatrixXd y;
  std::vector<Rotation> truth;
};

TrialBatch synthesize_trials(const ExperimentConfig& cfg, const VolumeGrid& vbar,
                             const std::optional<InverseCdfTable>& table, double sigma, std::size_t first,
                             std::size_t count) {
  const std::size_t d = cfg.projected ? vbar.n() * vbar.n() : vbar.size();
  TrialBatch b;
  b.y.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(count));
  b.truth.resize(count);
  const NoiseModel noise = NoiseModel::isotropic(sigma);
  const long n = static_cast<long>(count);
#pragma omp parallel for schedule(static)
  for (long t = 0; t < n; ++t) {
    const auto idx = static_cast<std::size_t>(t);
    Rng rng = make_rng(cfg.seed, kTrialStream, first + idx);
    const Rotation g = table ? ig_sample(rng, *table, 1).front() : sample_uniform(rng, 1).front();
    std::vector<double> data = clean_signal(vbar, g, cfg.projected, cfg.interpolation);
    add_noise(data, noise, rng);
    std::copy(data.begin(), data.end(), b.y.col(t).data());
    b.truth[idx] = g;
  }
  return b;
}

std::optional<InverseCdfTable> truth_table(const RotationPrior& prior) {
  if (prior.kind == RotationPrior::Kind::Uniform) return std::nullopt;
  return InverseCdfTable::build(prior.eta);
}

// sigma = 0 has no posterior; its limit is the MAP rotation.
kernels::BatchEstimates estimate(const Eigen::MatrixXd& y, const CandidateSet& c, double sigma) {
  if (sigma > 0.0) return kernels::estimate_batch(y, c, NoiseModel::isotropic(sigma));
  const Eigen::MatrixXd r = kernels::residual_norms(c, y);
  kernels::BatchEstimates out;
  for (Eigen::Index i = 0; i < y.cols(); ++i) {
    const std::size_t best = kernels::argmin(std::span<const double>(r.col(i).data(), static_cast<std::size_t>(r.rows())));
    EstimateReport rep;
    rep.rotation = c.rotations[best];
    rep.map_index = best;
    out.map.push_back(rep);
    out.mmse.push_back(rep);
  }
  return out;
}

CandidateSet candidates(const ExperimentConfig& cfg, const VolumeGrid& vbar, const RotationPrior& prior,
                        std::size_t grid_size, std::uint64_t index) {
  return CandidateSet::build(vbar, prior, grid_size, derive_seed(cfg.seed, kCandidateStream, index), cfg.projected,
                             cfg.interpolation);
}

// Errors of one or more estimators over all trials at one sigma, processed
// in chunks so memory stays bounded.
template <class PerChunk>
void for_each_chunk(const ExperimentConfig& cfg, const VolumeGrid& vbar, const std::optional<InverseCdfTable>& table,
                    double sigma, PerChunk&& per_chunk) {
  for (std::size_t first = 0; first < cfg.trials; first += kChunk) {
    const std::size_t count = std::min(kChunk, cfg.trials - first);
    const TrialBatch b = synthesize_trials(cfg, vbar, table, sigma, first, count);
    per_chunk(b);
  }
}

void append_errors(const std::vector<EstimateReport>& est, const std::vector<Rotation>& truth,
                   std::vector<double>& out) {
  for (std::size_t i = 0; i < est.size(); ++i) out.push_back(geodesic_distance(est[i].rotation, truth[i]));
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope needs two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ExperimentOutput run_snr_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const VolumeGrid vbar = detail::load_phantom(cfg.phantom);
  const std::vector<double> ref = reference_signal(vbar, cfg.projected);
  const auto table = truth_table(cfg.truth_prior);
  ExperimentOutput out;
  for (std::size_t li = 0; li < cfg.grid_sizes.size(); ++li) {
    const std::size_t L = cfg.grid_sizes[li];
    const CandidateSet c = candidates(cfg, vbar, cfg.truth_prior, L, li);
    for (double level : cfg.noise_levels) {
      const double sigma = detail::resolve_sigma(cfg, level, ref);
      std::vector<double> map_err, mmse_err;
      for_each_chunk(cfg, vbar, table, sigma, [&](const TrialBatch& b) {
        const auto est = estimate(b.y, c, sigma);
        append_errors(est.map, b.truth, map_err);
        append_errors(est.mmse, b.truth, mmse_err);
      });
      const double snr = detail::reported_snr(ref, sigma);
      out.records.push_back(detail::record(cfg, sigma, snr, L, "map", detail::summarize(map_err), cfg.trials));
      out.records.push_back(detail::record(cfg, sigma, snr, L, "mmse", detail::summarize(mmse_err), cfg.trials));
    }
  }
  return out;
}

ExperimentOutput run_prior_mismatch(const ExperimentConfig& cfg) {
  cfg.validate();
  const VolumeGrid vbar = detail::load_phantom(cfg.phantom);
  const std::vector<double> ref = reference_signal(vbar, cfg.projected);
  const auto table = truth_table(cfg.truth_prior);
  ExperimentOutput out;
  for (std::size_t li = 0; li < cfg.grid_sizes.size(); ++li) {
    const std::size_t L = cfg.grid_sizes[li];
    const std::uint64_t base = li * (cfg.estimation_priors.size() + 1);
    const CandidateSet uniform = candidates(cfg, vbar, RotationPrior::uniform(), L, base);
    std::vector<CandidateSet> sets;
    for (std::size_t k = 0; k < cfg.estimation_priors.size(); ++k) {
      sets.push_back(candidates(cfg, vbar, cfg.estimation_priors[k], L, base + 1 + k));
    }
    for (double level : cfg.noise_levels) {
      const double sigma = detail::resolve_sigma(cfg, level, ref);
      std::vector<double> map_err, mmse_uniform_err;
      std::vector<std::vector<double>> mmse_err(sets.size());
      for_each_chunk(cfg, vbar, table, sigma, [&](const TrialBatch& b) {
        const auto u = estimate(b.y, uniform, sigma);
        append_errors(u.map, b.truth, map_err);
        append_errors(u.mmse, b.truth, mmse_uniform_err);
        for (std::size_t k = 0; k < sets.size(); ++k) append_errors(estimate(b.y, sets[k], sigma).mmse, b.truth, mmse_err[k]);
      });
      const double snr = detail::reported_snr(ref, sigma);
      out.records.push_back(detail::record(cfg, sigma, snr, L, "map_uniform", detail::summarize(map_err), cfg.trials));
      out.records.push_back(
          detail::record(cfg, sigma, snr, L, "mmse_uniform", detail::summarize(mmse_uniform_err), cfg.trials));
      for (std::size_t k = 0; k < sets.size(); ++k) {
        out.records.push_back(detail::record(cfg, sigma, snr, L, "mmse_" + cfg.estimation_priors[k].label(),
                                             detail::summarize(mmse_err[k]), cfg.trials));
      }
    }
  }
  return out;
}

ExperimentOutput run_grid_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const VolumeGrid vbar = detail::load_phantom(cfg.phantom);
  const std::vector<double> ref = reference_signal(vbar, cfg.projected);
  const auto table = truth_table(cfg.truth_prior);
  const std::size_t ns = cfg.noise_levels.size();
  std::vector<std::vector<double>> map_mean(ns), mmse_mean(ns);
  std::vector<double> sigmas(ns);
  ExperimentOutput out;
  for (std::size_t li = 0; li < cfg.grid_sizes.size(); ++li) {
    const std::size_t L = cfg.grid_sizes[li];
    const CandidateSet c = candidates(cfg, vbar, cfg.truth_prior, L, li);
    for (std::size_t s = 0; s < ns; ++s) {
      const double sigma = detail::resolve_sigma(cfg, cfg.noise_levels[s], ref);
      sigmas[s] = sigma;
      std::vector<double> map_err, mmse_err;
      for_each_chunk(cfg, vbar, table, sigma, [&](const TrialBatch& b) {
        const auto est = estimate(b.y, c, sigma);
        append_errors(est.map, b.truth, map_err);
        append_errors(est.mmse, b.truth, mmse_err);
      });
      const Summary m = detail::summarize(map_err), e = detail::summarize(mmse_err);
      map_mean[s].push_back(m.mean);
      mmse_mean[s].push_back(e.mean);
      const double snr = detail::reported_snr(ref, sigma);
      out.records.push_back(detail::record(cfg, sigma, snr, L, "map", m, cfg.trials));
      out.records.push_back(detail::record(cfg, sigma, snr, L, "mmse", e, cfg.trials));
    }
  }
  std::vector<double> ls;
  for (std::size_t L : cfg.grid_sizes) ls.push_back(static_cast<double>(L));
  for (std::size_t s = 0; s < ns; ++s) {
    const double snr = detail::reported_snr(ref, sigmas[s]);
    out.records.push_back(
        detail::record(cfg, sigmas[s], snr, 0, "map_loglog_slope", {loglog_slope(ls, map_mean[s]), 0.0}, cfg.trials));
    out.records.push_back(
        detail::record(cfg, sigmas[s], snr, 0, "mmse_loglog_slope", {loglog_slope(ls, mmse_mean[s]), 0.0}, cfg.trials));
  }
  return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::SnrSweep:
      return run_snr_sweep(cfg);
    case ExperimentKind::PriorMismatch:
      return run_prior_mismatch(cfg);
    case ExperimentKind::GridSweep:
      return run_grid_sweep(cfg);
    case ExperimentKind::Recover2d:
      return run_recover2d(cfg);
    case ExperimentKind::Recover3d:
      return run_recover3d(cfg);
    case ExperimentKind::EinsteinNoise:
      return run_einstein_noise(cfg);
  }
  throw ConfigError("unknown experiment");
}

}  // namespace orient
