// Parallel kernels against their serial reference counterparts.
//
//   orient_bench --benchmark_filter=Residual

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "orient/candidates.hpp"
#include "orient/forward.hpp"
#include "orient/group_action.hpp"
#include "orient/kernels.hpp"
#include "orient/reconstruct.hpp"

using namespace orient;

namespace {

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n01(rng);
  return m;
}

const CandidateSet& candidates() {
  static const CandidateSet c = [] {
    const VolumeGrid v = make_phantom(PhantomKind::AsymmetricL, 24, 0);
    return CandidateSet::build(v, RotationPrior::uniform(), 300, 1, false);
  }();
  return c;
}

void BM_ResidualNorms(benchmark::State& state) {
  const CandidateSet& c = candidates();
  const Eigen::MatrixXd y = gaussian(static_cast<Eigen::Index>(c.dim()), state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::residual_norms(c, y));
  state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<std::int64_t>(c.size()));
}

void BM_ResidualNormsReference(benchmark::State& state) {
  const CandidateSet& c = candidates();
  const Eigen::MatrixXd y = gaussian(static_cast<Eigen::Index>(c.dim()), state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(reference::residual_norms(c.templates, y));
  state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<std::int64_t>(c.size()));
}

void BM_EstimateBatch(benchmark::State& state) {
  const CandidateSet& c = candidates();
  const Eigen::MatrixXd y = gaussian(static_cast<Eigen::Index>(c.dim()), state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::estimate_batch(y, c, NoiseModel::isotropic(5.0)));
}

void BM_EstimateBatchReference(benchmark::State& state) {
  const CandidateSet& c = candidates();
  const Eigen::MatrixXd y = gaussian(static_cast<Eigen::Index>(c.dim()), state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(reference::estimate_batch(y, c, NoiseModel::isotropic(5.0)));
}

void BM_RotateVolume(benchmark::State& state) {
  const VolumeGrid v = make_phantom(PhantomKind::GaussianBlobs, static_cast<std::size_t>(state.range(0)), 1);
  const Rotation g = Rotation::about_x(0.3) * Rotation::about_z(1.1);
  for (auto _ : state) benchmark::DoNotOptimize(rotate_volume(v, g));
}

void BM_RotateVolumeReference(benchmark::State& state) {
  const VolumeGrid v = make_phantom(PhantomKind::GaussianBlobs, static_cast<std::size_t>(state.range(0)), 1);
  const Rotation g = Rotation::about_x(0.3) * Rotation::about_z(1.1);
  for (auto _ : state) benchmark::DoNotOptimize(reference::rotate_volume(v, g));
}

void BM_PolarEmStep(benchmark::State& state) {
  const auto mode = static_cast<Assignment>(state.range(0));
  const PolarImage truth = make_polar_phantom(300, 30, 1);
  const PolarShiftAction action(300, 30);
  Eigen::MatrixXd y = gaussian(static_cast<Eigen::Index>(truth.size()), 2000, 4) * 5.0;
  for (Eigen::Index i = 0; i < y.cols(); ++i) {
    y.col(i) += Eigen::Map<const Eigen::VectorXd>(truth.values().data(), static_cast<Eigen::Index>(truth.size()));
  }
  const PolarImage start = make_polar_phantom(300, 30, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_step(mode, y, start.data(), action, NoiseModel::isotropic(5.0)));
  }
  state.SetLabel(to_string(mode));
}

void BM_VolumeEmStep(benchmark::State& state) {
  const auto mode = static_cast<Assignment>(state.range(0));
  const VolumeGrid v = make_phantom(PhantomKind::GaussianBlobs, 24, 1);
  Rng rng(5);
  const VolumeRotationAction action(24, sample_uniform(rng, 100));
  const Eigen::MatrixXd y = gaussian(static_cast<Eigen::Index>(v.size()), 200, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_step(mode, y, v.data(), action, NoiseModel::isotropic(1.0)));
  }
  state.SetLabel(to_string(mode));
}

}  // namespace

BENCHMARK(BM_ResidualNorms)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResidualNormsReference)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateBatch)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateBatchReference)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RotateVolume)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RotateVolumeReference)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PolarEmStep)
    ->Arg(static_cast<int>(Assignment::SoftEm))
    ->Arg(static_cast<int>(Assignment::MmseAlign))
    ->Arg(static_cast<int>(Assignment::HardMap))
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VolumeEmStep)
    ->Arg(static_cast<int>(Assignment::MmseAlign))
    ->Arg(static_cast<int>(Assignment::HardMap))
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
