#include "orient/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "orient/errors.hpp"
#include "orient/kernels.hpp"

namespace orient {

namespace {

constexpr std::size_t kSumBlock = 16;

// sum_{i < count} produce(i) with fixed blocks of kSumBlock terms, each block
// summed in index order and the block partials combined in block order.
// `produce` writes into its buffer and returns false to contribute nothing.
template <class Produce>
std::vector<double> ordered_sum(std::size_t count, std::size_t dim, Produce&& produce) {
  const std::size_t blocks = (count + kSumBlock - 1) / kSumBlock;
  std::vector<std::vector<double>> partial(blocks);
  const long nblocks = static_cast<long>(blocks);
#pragma omp parallel
  {
    std::vector<double> buf(dim);
#pragma omp for schedule(dynamic)
    for (long b = 0; b < nblocks; ++b) {
      std::vector<double>& acc = partial[static_cast<std::size_t>(b)];
      acc.assign(dim, 0.0);
      const std::size_t first = static_cast<std::size_t>(b) * kSumBlock;
      const std::size_t last = std::min(count, first + kSumBlock);
      for (std::size_t i = first; i < last; ++i) {
        if (!produce(i, std::span<double>(buf))) continue;
        for (std::size_t k = 0; k < dim; ++k) acc[k] += buf[k];
      }
    }
  }
  std::vector<double> total(dim, 0.0);
  for (const auto& p : partial) {
    for (std::size_t k = 0; k < dim; ++k) total[k] += p[k];
  }
  return total;
}

void check_dims(const Eigen::MatrixXd& observations, std::span<const double> current, const GroupAction& action) {
  if (static_cast<std::size_t>(observations.rows()) != action.dim() || current.size() != action.dim()) {
    throw DimensionMismatch("observations, estimate and group action disagree on dimension");
  }
  if (observations.cols() == 0) throw std::invalid_argument("reconstruction needs at least one observation");
}

std::span<const double> column(const Eigen::MatrixXd& m, Eigen::Index i) {
  return {m.col(i).data(), static_cast<std::size_t>(m.rows())};
}

double noise_variance(const NoiseModel& noise) {
  if (!noise.is_isotropic()) throw std::invalid_argument("reconstruction supports isotropic noise only");
  const double v = noise.effective_variance(0);
  if (!(v > 0.0)) throw ZeroVariance("effective noise variance is zero");
  return v;
}

void divide(std::vector<double>& v, double m) {
  for (double& x : v) x /= m;
}

}  // namespace

Assignment parse_assignment(const std::string& s) {
  if (s == "soft_em") return Assignment::SoftEm;
  if (s == "mmse_align") return Assignment::MmseAlign;
  if (s == "hard_map") return Assignment::HardMap;
  throw std::invalid_argument("unknown assignment mode '" + s + "'");
}

std::string to_string(Assignment a) {
  switch (a) {
    case Assignment::SoftEm:
      return "soft_em";
    case Assignment::MmseAlign:
      return "mmse_align";
    case Assignment::HardMap:
      return "hard_map";
  }
  return "unknown";
}

void ReconstructionConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
}

std::string ReconstructionTrace::to_jsonl() const {
  auto number_or_null = [](std::optional<double> v) -> nlohmann::json {
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
  };
  std::string out;
  for (const IterationRecord& r : records) {
    nlohmann::ordered_json j;
    j["iter"] = r.iter;
    j["rel_change"] = number_or_null(r.rel_change);
    j["pcc_truth"] = number_or_null(r.pcc_truth);
    j["pcc_template"] = number_or_null(r.pcc_template);
    out += j.dump();
    out += '\n';
  }
  return out;
}

Eigen::MatrixXd stack_observations(std::span<const Observation> obs) {
  if (obs.empty()) return {};
  const std::size_t d = obs.front().data.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(obs.size()));
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (obs[i].data.size() != d) throw DimensionMismatch("observations differ in dimension");
    out.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::VectorXd>(obs[i].data.data(), static_cast<Eigen::Index>(d));
  }
  return out;
}

std::vector<PosteriorWeights> soft_assignments(const Eigen::MatrixXd& observations, std::span<const double> current,
                                               const GroupAction& action, const NoiseModel& noise) {
  check_dims(observations, current, action);
  const double variance = noise_variance(noise);
  const Eigen::MatrixXd templates = action.templates(current);
  const Eigen::VectorXd sq = templates.colwise().squaredNorm().transpose();
  const Eigen::MatrixXd residuals = kernels::residual_norms(templates, sq, observations);
  std::vector<PosteriorWeights> out(static_cast<std::size_t>(observations.cols()));
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < observations.cols(); ++i) {
    out[static_cast<std::size_t>(i)] = kernels::posterior_from_residuals(column(residuals, i), variance);
  }
  return out;
}

std::vector<std::size_t> hard_assignments(const Eigen::MatrixXd& observations, std::span<const double> current,
                                          const GroupAction& action) {
  check_dims(observations, current, action);
  const Eigen::MatrixXd templates = action.templates(current);
  const Eigen::VectorXd sq = templates.colwise().squaredNorm().transpose();
  const Eigen::MatrixXd residuals = kernels::residual_norms(templates, sq, observations);
  std::vector<std::size_t> out(static_cast<std::size_t>(observations.cols()));
  for (Eigen::Index i = 0; i < observations.cols(); ++i) {
    out[static_cast<std::size_t>(i)] = kernels::argmin(column(residuals, i));
  }
  return out;
}

std::vector<double> soft_update(const Eigen::MatrixXd& observations, std::span<const PosteriorWeights> weights,
                                const GroupAction& action) {
  const std::size_t d = action.dim();
  const std::size_t count = action.size();
  if (weights.size() != static_cast<std::size_t>(observations.cols())) {
    throw DimensionMismatch("one posterior per observation required");
  }
  for (const PosteriorWeights& w : weights) {
    if (w.size() != count) throw DimensionMismatch("posterior length differs from candidate count");
  }
  // Linearity of the action: sum_i w_il (g_l . y_i) = g_l . (sum_i w_il y_i).
  auto produce = [&](std::size_t l, std::span<double> out) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    bool any = false;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const double w = weights[i].w[l];
      if (w == 0.0) continue;
      z.noalias() += w * observations.col(static_cast<Eigen::Index>(i));
      any = true;
    }
    if (!any) return false;
    action.align_candidate(std::span<const double>(z.data(), d), l, out);
    return true;
  };
  std::vector<double> total = ordered_sum(count, d, produce);
  divide(total, static_cast<double>(observations.cols()));
  return total;
}

std::vector<double> hard_update(const Eigen::MatrixXd& observations, std::span<const std::size_t> assignment,
                                const GroupAction& action) {
  const std::size_t d = action.dim();
  const std::size_t count = action.size();
  if (assignment.size() != static_cast<std::size_t>(observations.cols())) {
    throw DimensionMismatch("one assignment per observation required");
  }
  std::vector<std::vector<std::size_t>> members(count);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] >= count) throw std::out_of_range("assignment index out of range");
    members[assignment[i]].push_back(i);
  }
  auto produce = [&](std::size_t l, std::span<double> out) {
    if (members[l].empty()) return false;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t i : members[l]) z += observations.col(static_cast<Eigen::Index>(i));
    action.align_candidate(std::span<const double>(z.data(), d), l, out);
    return true;
  };
  std::vector<double> total = ordered_sum(count, d, produce);
  divide(total, static_cast<double>(observations.cols()));
  return total;
}

std::vector<double> mmse_update(const Eigen::MatrixXd& observations, std::span<const PosteriorWeights> weights,
                                const GroupAction& action) {
  const std::size_t d = action.dim();
  if (weights.size() != static_cast<std::size_t>(observations.cols())) {
    throw DimensionMismatch("one posterior per observation required");
  }
  for (const PosteriorWeights& w : weights) {
    if (w.size() != action.size()) throw DimensionMismatch("posterior length differs from candidate count");
  }
  auto produce = [&](std::size_t i, std::span<double> out) {
    action.align_mmse(column(observations, static_cast<Eigen::Index>(i)), weights[i], out);
    return true;
  };
  std::vector<double> total = ordered_sum(weights.size(), d, produce);
  divide(total, static_cast<double>(observations.cols()));
  return total;
}

std::vector<double> em_step_soft(const Eigen::MatrixXd& observations, std::span<const double> current,
                                 const GroupAction& action, const NoiseModel& noise) {
  const auto weights = soft_assignments(observations, current, action, noise);
  return soft_update(observations, weights, action);
}

std::vector<double> em_step_mmse(const Eigen::MatrixXd& observations, std::span<const double> current,
                                 const GroupAction& action, const NoiseModel& noise) {
  const auto weights = soft_assignments(observations, current, action, noise);
  return mmse_update(observations, weights, action);
}

std::vector<double> hard_step(const Eigen::MatrixXd& observations, std::span<const double> current,
                              const GroupAction& action) {
  const auto assignment = hard_assignments(observations, current, action);
  return hard_update(observations, assignment, action);
}

std::vector<double> run_step(Assignment mode, const Eigen::MatrixXd& observations, std::span<const double> current,
                             const GroupAction& action, const NoiseModel& noise) {
  switch (mode) {
    case Assignment::SoftEm:
      return em_step_soft(observations, current, action, noise);
    case Assignment::MmseAlign:
      return em_step_mmse(observations, current, action, noise);
    case Assignment::HardMap:
      return hard_step(observations, current, action);
  }
  throw std::invalid_argument("unknown assignment mode");
}

ReconstructionResult run_reconstruction(const Eigen::MatrixXd& observations, std::span<const double> initial,
                                        const GroupAction& action, const NoiseModel& noise,
                                        const ReconstructionConfig& cfg,
                                        std::optional<std::span<const double>> truth) {
  cfg.validate();
  check_dims(observations, initial, action);
  auto try_pcc = [](std::span<const double> a, std::span<const double> b) -> std::optional<double> {
    try {
      return pcc(a, b);
    } catch (const ZeroVariance&) {
      return std::nullopt;
    }
  };

  ReconstructionResult result;
  std::vector<double> current(initial.begin(), initial.end());
  for (int t = 1; t <= cfg.max_iters; ++t) {
    std::vector<double> next = run_step(cfg.assignment, observations, current, action, noise);
    double diff = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) diff += (next[k] - current[k]) * (next[k] - current[k]);
    const double base = l2_norm(current);
    double rel = 0.0;
    if (base > 0.0) {
      rel = std::sqrt(diff) / base;
    } else if (diff > 0.0) {
      rel = std::numeric_limits<double>::infinity();
    }
    IterationRecord rec;
    rec.iter = t;
    rec.rel_change = rel;
    if (truth) rec.pcc_truth = try_pcc(next, *truth);
    rec.pcc_template = try_pcc(next, initial);
    result.trace.records.push_back(rec);
    current = std::move(next);
    if (rel < cfg.rel_tol) {
      result.trace.converged = true;
      break;
    }
  }
  result.estimate = std::move(current);
  return result;
}

double pcc(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("pcc: operands differ in size");
  if (a.empty()) throw ZeroVariance("pcc: empty operands");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw ZeroVariance("pcc: operand has zero variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace orient
