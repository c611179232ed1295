#include <cmath>
#include <memory>

#include "experiment_detail.hpp"
#include "orient/alignment.hpp"
#include "orient/errors.hpp"
#include "orient/experiment.hpp"

namespace orient {

namespace {

using detail::Summary;

constexpr std::uint64_t kObservationStream = 0x6f6273;
constexpr std::uint64_t kCandidateStream = 0x63616e64;
constexpr std::uint64_t kAlignStream = 0x616c6967;

std::string cell_name(const ExperimentConfig& cfg, std::size_t s, std::size_t r, Assignment mode) {
  return to_string(cfg.experiment) + "_s" + std::to_string(s) + "_r" + std::to_string(r) + "_" + to_string(mode);
}

ReconstructionConfig reconstruction_config(const ExperimentConfig& cfg, Assignment mode) {
  ReconstructionConfig rc;
  rc.assignment = mode;
  rc.max_iters = cfg.max_iters;
  rc.rel_tol = cfg.rel_tol;
  rc.interpolation = cfg.interpolation;
  rc.seed = cfg.seed;
  return rc;
}

double positive_sigma(const ExperimentConfig& cfg, double level, std::span<const double> reference) {
  const double sigma = detail::resolve_sigma(cfg, level, reference);
  if (!(sigma > 0.0)) throw ConfigError("reconstruction needs a positive noise level");
  return sigma;
}

// Observation columns for repeat r. Each column has its own generator, so
// the group element and the unit noise draw of column i are shared by every
// sigma; only their scale changes.
template <class Clean>
Eigen::MatrixXd synthesize(const ExperimentConfig& cfg, std::size_t d, std::size_t r, double sigma, Clean&& clean) {
  Eigen::MatrixXd y(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(cfg.observations));
  const NoiseModel noise = NoiseModel::isotropic(sigma);
  const long m = static_cast<long>(cfg.observations);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < m; ++i) {
    Rng rng = make_rng(derive_seed(cfg.seed, kObservationStream, r), kObservationStream, static_cast<std::uint64_t>(i));
    std::vector<double> data = clean(rng);
    add_noise(data, noise, rng);
    std::copy(data.begin(), data.end(), y.col(i).data());
  }
  return y;
}

struct CellMetrics {
  std::vector<double> pcc_truth;
  std::vector<double> pcc_template;
  std::vector<double> iterations;
};

void push_cell(ExperimentOutput& out, const ExperimentConfig& cfg, double sigma, double snr, std::size_t grid_size,
               Assignment mode, const CellMetrics& m) {
  const std::string base = to_string(mode);
  if (!m.pcc_truth.empty()) {
    out.records.push_back(
        detail::record(cfg, sigma, snr, grid_size, base + ":pcc_truth", detail::summarize(m.pcc_truth), cfg.repeats));
  }
  out.records.push_back(detail::record(cfg, sigma, snr, grid_size, base + ":pcc_template",
                                       detail::summarize(m.pcc_template), cfg.repeats));
  out.records.push_back(detail::record(cfg, sigma, snr, grid_size, base + ":iterations",
                                       detail::summarize(m.iterations), cfg.repeats));
}

double iterations_of(const ReconstructionTrace& t) { return static_cast<double>(t.records.size()); }

}  // namespace

ExperimentOutput run_recover2d(const ExperimentConfig& cfg) {
  cfg.validate();
  const PolarSpec& p = cfg.polar;
  const PolarImage truth = make_polar_phantom(p.d_radial, p.l_angular, p.truth_seed);
  const PolarImage tmpl = make_polar_phantom(p.d_radial, p.l_angular, p.template_seed);
  const PolarShiftAction action(p.d_radial, p.l_angular);
  const std::size_t L = p.l_angular;
  ExperimentOutput out;
  for (std::size_t s = 0; s < cfg.noise_levels.size(); ++s) {
    const double sigma = positive_sigma(cfg, cfg.noise_levels[s], truth.data());
    const double snr = snr_of(truth.data(), sigma);
    for (Assignment mode : cfg.assignments) {
      CellMetrics m;
      for (std::size_t r = 0; r < cfg.repeats; ++r) {
        const Eigen::MatrixXd y = synthesize(cfg, truth.size(), r, sigma, [&](Rng& rng) {
          std::uniform_int_distribution<long> shift(0, static_cast<long>(L) - 1);
          return rotate_polar(truth, shift(rng)).values();
        });
        ReconstructionResult res = run_reconstruction(y, tmpl.data(), action, NoiseModel::isotropic(sigma),
                                                      reconstruction_config(cfg, mode), truth.data());
        const PolarImage est(p.d_radial, p.l_angular, res.estimate);
        m.pcc_truth.push_back(aligned_pcc(est, truth).pcc);
        m.pcc_template.push_back(pcc(res.estimate, tmpl.data()));
        m.iterations.push_back(iterations_of(res.trace));
        out.traces.push_back({cell_name(cfg, s, r, mode), std::move(res.trace)});
      }
      push_cell(out, cfg, sigma, snr, L, mode, m);
    }
  }
  return out;
}

ExperimentOutput run_recover3d(const ExperimentConfig& cfg) {
  cfg.validate();
  const VolumeGrid truth = detail::load_phantom(cfg.phantom);
  const VolumeGrid tmpl = detail::load_phantom(cfg.template_phantom);
  const std::size_t n = truth.n();
  const std::size_t L = cfg.grid_sizes.front();
  Rng crng = make_rng(cfg.seed, kCandidateStream, 0);
  const VolumeRotationAction action(n, sample_uniform(crng, L), cfg.interpolation);
  ExperimentOutput out;
  for (std::size_t s = 0; s < cfg.noise_levels.size(); ++s) {
    const double sigma = positive_sigma(cfg, cfg.noise_levels[s], truth.data());
    const double snr = snr_of(truth.data(), sigma);
    for (Assignment mode : cfg.assignments) {
      CellMetrics m;
      for (std::size_t r = 0; r < cfg.repeats; ++r) {
        const Eigen::MatrixXd y = synthesize(cfg, truth.size(), r, sigma, [&](Rng& rng) {
          const Rotation g = cfg.truth_prior.sample(rng, 1).front();
          return clean_signal(truth, g, false, cfg.interpolation);
        });
        ReconstructionResult res = run_reconstruction(y, tmpl.data(), action, NoiseModel::isotropic(sigma),
                                                      reconstruction_config(cfg, mode), truth.data());
        VolumeGrid est(n, std::move(res.estimate));
        VolumeAlignmentOptions opts;
        opts.coarse_samples = cfg.align_samples;
        opts.seed = derive_seed(cfg.seed, kAlignStream, s * cfg.repeats + r);
        opts.method = cfg.interpolation;
        m.pcc_truth.push_back(aligned_pcc(est, truth, opts).pcc);
        m.pcc_template.push_back(pcc(est.data(), tmpl.data()));
        m.iterations.push_back(iterations_of(res.trace));
        const std::string name = cell_name(cfg, s, r, mode);
        out.traces.push_back({name, std::move(res.trace)});
        out.volumes.push_back({name, std::move(est)});
      }
      push_cell(out, cfg, sigma, snr, L, mode, m);
    }
  }
  return out;
}

ExperimentOutput run_einstein_noise(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<double> tmpl;
  std::unique_ptr<GroupAction> action;
  std::size_t L = 0, n = 0;
  if (cfg.polar_geometry) {
    const PolarSpec& p = cfg.polar;
    tmpl = make_polar_phantom(p.d_radial, p.l_angular, p.template_seed).values();
    action = std::make_unique<PolarShiftAction>(p.d_radial, p.l_angular);
    L = p.l_angular;
  } else {
    const VolumeGrid v = detail::load_phantom(cfg.template_phantom);
    n = v.n();
    tmpl = v.values();
    L = cfg.grid_sizes.front();
    Rng crng = make_rng(cfg.seed, kCandidateStream, 0);
    action = std::make_unique<VolumeRotationAction>(n, sample_uniform(crng, L), cfg.interpolation);
  }
  ExperimentOutput out;
  for (std::size_t s = 0; s < cfg.noise_levels.size(); ++s) {
    const double sigma = positive_sigma(cfg, cfg.noise_levels[s], tmpl);
    for (Assignment mode : cfg.assignments) {
      CellMetrics m;
      for (std::size_t r = 0; r < cfg.repeats; ++r) {
        const Eigen::MatrixXd y =
            synthesize(cfg, tmpl.size(), r, sigma, [&](Rng&) { return std::vector<double>(tmpl.size(), 0.0); });
        ReconstructionResult res =
            run_reconstruction(y, tmpl, *action, NoiseModel::isotropic(sigma), reconstruction_config(cfg, mode));
        m.pcc_template.push_back(pcc(res.estimate, tmpl));
        m.iterations.push_back(iterations_of(res.trace));
        const std::string name = cell_name(cfg, s, r, mode);
        out.traces.push_back({name, std::move(res.trace)});
        if (!cfg.polar_geometry) out.volumes.push_back({name, VolumeGrid(n, std::move(res.estimate))});
      }
      push_cell(out, cfg, sigma, 0.0, L, mode, m);
    }
  }
  return out;
}

}  // namespace orient
