#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "oracles.hpp"
#include "orient/candidates.hpp"
#include "orient/errors.hpp"
#include "orient/estimators.hpp"
#include "orient/forward.hpp"
#include "orient/priors.hpp"

using namespace orient;

namespace {

constexpr double kPi = std::numbers::pi;

CandidateSet raw_candidates(const std::vector<std::vector<double>>& cols, std::vector<Rotation> rots = {}) {
  const auto d = static_cast<Eigen::Index>(cols.front().size());
  Eigen::MatrixXd t(d, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t l = 0; l < cols.size(); ++l)
    for (Eigen::Index i = 0; i < d; ++i) t(i, static_cast<Eigen::Index>(l)) = cols[l][i];
  if (rots.empty())
    for (std::size_t l = 0; l < cols.size(); ++l) rots.push_back(Rotation::about_z(0.1 * static_cast<double>(l)));
  return CandidateSet::from_templates(std::move(rots), std::move(t));
}

std::vector<std::vector<double>> random_columns(std::size_t d, std::size_t count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<std::vector<double>> cols(count, std::vector<double>(d));
  for (auto& c : cols)
    for (auto& x : c) x = n01(rng);
  return cols;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST(Posterior, EqualResidualsSplitEvenly) {
  auto c = raw_candidates({{1.0, 0.0}, {-1.0, 0.0}});
  const auto w = posterior_weights(std::vector<double>{0.0, 0.0}, c, NoiseModel::isotropic(0.7));
  EXPECT_DOUBLE_EQ(w.w[0], 0.5);
  EXPECT_DOUBLE_EQ(w.w[1], 0.5);
}

TEST(Posterior, FlatAtHugeSigma) {
  auto c = raw_candidates(random_columns(20, 7, 1));
  const auto y = random_columns(20, 1, 2)[0];
  const auto w = posterior_weights(y, c, NoiseModel::isotropic(1e12));
  for (double x : w.w) EXPECT_NEAR(x, 1.0 / 7.0, 1e-9);
  EXPECT_NEAR(w.effective_sample_size(), 7.0, 1e-6);
}

TEST(Posterior, HandEvaluatedTwoPoint) {
  auto c = raw_candidates({{0.0}, {1.0}});
  const auto w = posterior_weights(std::vector<double>{0.0}, c, NoiseModel::isotropic(1.0));
  const double a = 1.0, b = std::exp(-0.5);
  EXPECT_NEAR(w.w[0], 0.62246, 1e-5);
  EXPECT_NEAR(w.w[1], 0.37754, 1e-5);
  EXPECT_NEAR(w.w[0], a / (a + b), 1e-15);
  EXPECT_NEAR(w.log_w[1], -0.5 - std::log(a + b), 1e-15);
}

TEST(Posterior, NormalizedAcrossScales) {
  auto c = raw_candidates(random_columns(50, 40, 3));
  const auto y = random_columns(50, 1, 4)[0];
  for (double sigma = 1e-8; sigma <= 1e8 * 1.0001; sigma *= 10.0) {
    const auto w = posterior_weights(y, c, NoiseModel::isotropic(sigma));
    for (std::size_t l = 0; l < w.size(); ++l) {
      ASSERT_TRUE(std::isfinite(w.w[l]));
      ASSERT_FALSE(std::isnan(w.log_w[l]));
      ASSERT_GE(w.w[l], 0.0);
    }
    EXPECT_NEAR(sum(w.w), 1.0, 1e-12) << sigma;
    const double ess = w.effective_sample_size();
    EXPECT_GE(ess, 1.0 - 1e-12);
    EXPECT_LE(ess, 40.0 + 1e-9);
  }
}

TEST(Posterior, LogWeightsConsistent) {
  auto c = raw_candidates(random_columns(10, 6, 5));
  const auto y = random_columns(10, 1, 6)[0];
  const auto w = posterior_weights(y, c, NoiseModel::isotropic(2.0));
  for (std::size_t l = 0; l < w.size(); ++l) EXPECT_NEAR(std::exp(w.log_w[l]), w.w[l], 1e-15);
}

TEST(Posterior, MonotoneInResidual) {
  auto cols = random_columns(8, 5, 7);
  const auto y = random_columns(8, 1, 8)[0];
  const auto base = posterior_weights(y, raw_candidates(cols), NoiseModel::isotropic(1.5));
  // Move candidate 2 halfway toward y.
  for (std::size_t i = 0; i < 8; ++i) cols[2][i] = 0.5 * (cols[2][i] + y[i]);
  const auto moved = posterior_weights(y, raw_candidates(cols), NoiseModel::isotropic(1.5));
  EXPECT_GT(moved.w[2], base.w[2]);
}

TEST(Posterior, DiagonalNoiseMatchesDirectFormula) {
  auto cols = random_columns(4, 3, 9);
  const auto y = random_columns(4, 1, 10)[0];
  NoiseModel noise{0.5, {0.1, 0.2, 0.3, 0.4}};
  const auto w = posterior_weights(y, raw_candidates(cols), noise);
  std::vector<double> direct;
  for (const auto& x : cols) {
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) s += (y[i] - x[i]) * (y[i] - x[i]) / (noise.tau[i] * noise.tau[i] + 0.25);
    direct.push_back(std::exp(-0.5 * s));
  }
  const double z = sum(direct);
  for (std::size_t l = 0; l < 3; ++l) EXPECT_NEAR(w.w[l], direct[l] / z, 1e-14);
}

TEST(Posterior, Errors) {
  auto c = raw_candidates({{0.0, 1.0}, {1.0, 0.0}});
  EXPECT_THROW(posterior_weights(std::vector<double>{0.0}, c, NoiseModel::isotropic(1.0)), DimensionMismatch);
  EXPECT_THROW(posterior_weights(std::vector<double>{0.0, 0.0}, c, NoiseModel::isotropic(0.0)), ZeroVariance);
  EXPECT_THROW(map_estimate(std::vector<double>{0.0, 0.0, 1.0}, c), DimensionMismatch);
  // Partially zero variance is allowed; exact agreement on that coordinate.
  NoiseModel partial{0.0, {0.0, 1.0}};
  const auto w = posterior_weights(std::vector<double>{0.0, 0.3}, c, partial);
  EXPECT_EQ(w.w[0], 1.0);
  EXPECT_EQ(w.w[1], 0.0);
}

TEST(Map, ExactTemplateWins) {
  auto cols = random_columns(12, 9, 11);
  auto c = raw_candidates(cols);
  for (std::size_t k = 0; k < cols.size(); ++k) EXPECT_EQ(map_estimate(cols[k], c).map_index.value(), k);
}

TEST(Map, TieGoesToLowestIndex) {
  auto c = raw_candidates({{5.0, 5.0}, {1.0, 0.0}, {-1.0, 0.0}, {0.0, 9.0}});
  const auto r = map_estimate(std::vector<double>{0.0, 0.0}, c);
  EXPECT_EQ(r.map_index.value(), 1u);
  auto c2 = raw_candidates({{1.0, 0.0}, {-1.0, 0.0}, {3.0, 0.0}});
  EXPECT_EQ(map_estimate(std::vector<double>{0.0, 0.0}, c2).map_index.value(), 0u);
}

TEST(Map, MatchesNaiveArgmin) {
  const auto cols = random_columns(30, 60, 12);
  auto c = raw_candidates(cols);
  for (unsigned t = 0; t < 50; ++t) {
    const auto y = random_columns(30, 1, 100 + t)[0];
    const auto r = oracle::naive_residuals(y, cols);
    const auto expected = static_cast<std::size_t>(std::min_element(r.begin(), r.end()) - r.begin());
    EXPECT_EQ(map_estimate(y, c).map_index.value(), expected);
  }
}

TEST(Map, ArgmaxInvariantUnderCommonNoiseScale) {
  const auto cols = random_columns(10, 20, 13);
  auto c = raw_candidates(cols);
  const auto y = random_columns(10, 1, 14)[0];
  std::size_t expected = map_estimate(y, c).map_index.value();
  for (double s : {0.01, 1.0, 100.0}) {
    NoiseModel noise{0.3 * s, {0.1 * s, 0.2 * s, 0.1 * s, 0.2 * s, 0.1 * s, 0.2 * s, 0.1 * s, 0.2 * s, 0.1 * s, 0.2 * s}};
    NoiseModel iso = NoiseModel::isotropic(s);
    const auto w = posterior_weights(y, c, iso);
    EXPECT_EQ(static_cast<std::size_t>(std::max_element(w.w.begin(), w.w.end()) - w.w.begin()), expected);
    const auto wd1 = posterior_weights(y, c, noise);
    NoiseModel scaled = noise;
    scaled.sigma *= 3.0;
    for (auto& t : scaled.tau) t *= 3.0;
    const auto wd2 = posterior_weights(y, c, scaled);
    EXPECT_EQ(std::max_element(wd1.w.begin(), wd1.w.end()) - wd1.w.begin(),
              std::max_element(wd2.w.begin(), wd2.w.end()) - wd2.w.begin());
  }
}

TEST(Mmse, SingleCandidateReturnedExactly) {
  const auto g = Rotation::about_y(1.1);
  auto c = raw_candidates({{1.0, 2.0}}, {g});
  const auto r = mmse_estimate(std::vector<double>{0.0, 0.0}, c, NoiseModel::isotropic(1.0));
  EXPECT_LE(geodesic_distance(r.rotation, g), 1e-14);
  EXPECT_DOUBLE_EQ(r.effective_sample_size, 1.0);
}

TEST(Mmse, ConcentratedWeightsMatchMap) {
  const auto v = make_phantom(PhantomKind::AsymmetricL, 16, 0);
  Rng rng(15);
  auto c = CandidateSet::build(v, RotationPrior::uniform(), 50, 21, false);
  const double scale = signal_rms(v.data());
  for (int t = 0; t < 5; ++t) {
    const auto obs = synthesize_observation(v, sample_uniform(rng, 1)[0], NoiseModel::isotropic(1e-6 * scale), false, rng);
    const auto map = map_estimate(obs, c);
    const auto mmse = mmse_estimate(obs, c, NoiseModel::isotropic(1e-6 * scale));
    EXPECT_LE(geodesic_distance(map.rotation, mmse.rotation), 1e-6);
  }
}

TEST(Mmse, SymmetricPairAveragesToIdentity) {
  const auto w = PosteriorWeights::from_weights(std::vector<double>{1.0, 1.0});
  std::vector<Rotation> r{Rotation::about_z(0.2), Rotation::about_z(-0.2)};
  const auto est = mmse_from_weights(w, r);
  EXPECT_LE(oracle::frobenius_gap(est.rotation.matrix(), Mat3::Identity()), 1e-10);
  EXPECT_FALSE(est.degenerate_average);
}

TEST(Mmse, FlagsCancellingAverage) {
  const auto w = PosteriorWeights::from_weights(std::vector<double>{1.0, 1.0});
  Mat3 m = Mat3::Zero();
  m(0, 0) = 1;
  m(1, 1) = -1;
  m(2, 2) = -1;
  std::vector<Rotation> r{Rotation(), Rotation::unchecked(m)};
  // (I + diag(1,-1,-1)) / 2 = diag(1,0,0): rank one.
  const auto est = mmse_from_weights(w, r);
  EXPECT_TRUE(est.procrustes_nonunique);
  EXPECT_TRUE(is_rotation(est.rotation.matrix()));
  std::vector<Rotation> opposite{Rotation::about_x(kPi), Rotation::about_y(kPi), Rotation::about_z(kPi), Rotation()};
  const auto est2 = mmse_from_weights(PosteriorWeights::from_weights(std::vector<double>{1, 1, 1, 1}), opposite);
  EXPECT_TRUE(est2.degenerate_average);
  EXPECT_TRUE(is_rotation(est2.rotation.matrix()));
}

TEST(RawAverage, OneHotIsBitExact) {
  Rng rng(16);
  const auto r = sample_uniform(rng, 5);
  const auto w = PosteriorWeights::from_weights(std::vector<double>{0, 0, 1, 0, 0});
  EXPECT_EQ(mmse_raw_average(w, r), r[2].matrix());
}

TEST(RawAverage, SymmetricPairClosedForm) {
  const double theta = 0.37;
  std::vector<Rotation> r{Rotation::about_z(theta), Rotation::about_z(-theta)};
  const Mat3 a = mmse_raw_average(PosteriorWeights::from_weights(std::vector<double>{1, 1}), r);
  EXPECT_NEAR(a(0, 0), std::cos(theta), 1e-15);
  EXPECT_NEAR(a(1, 1), std::cos(theta), 1e-15);
  EXPECT_NEAR(a(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(a(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(a(2, 2), 1.0, 1e-15);
}

TEST(RawAverage, HaarMeanNearZero) {
  Rng rng(17);
  const auto r = sample_uniform(rng, 10000);
  const auto a = mmse_raw_average(PosteriorWeights::from_weights(std::vector<double>(10000, 1.0)), r);
  EXPECT_LE(a.cwiseAbs().maxCoeff(), 0.05);
}

TEST(CircularMean, Examples) {
  std::vector<double> angles{0.1, 0.7, 2.0};
  EXPECT_NEAR(mmse_so2_angle(PosteriorWeights::from_weights(std::vector<double>{0, 1, 0}), angles).angle, 0.7, 1e-15);
  const auto sym = mmse_so2_angle(PosteriorWeights::from_weights(std::vector<double>{1, 1}), std::vector<double>{0.2, -0.2});
  EXPECT_NEAR(sym.angle, 0.0, 1e-15);
  const auto q = mmse_so2_angle(PosteriorWeights::from_weights(std::vector<double>{0.75, 0.25}),
                                std::vector<double>{0.0, kPi / 2});
  EXPECT_NEAR(q.angle, 0.32175, 1e-5);
  EXPECT_NEAR(q.angle, std::atan2(0.25, 0.75), 1e-15);
  const auto deg = mmse_so2_angle(PosteriorWeights::from_weights(std::vector<double>{1, 1}), std::vector<double>{0.0, kPi});
  EXPECT_TRUE(deg.degenerate);
}

TEST(Equivariance, RelabelingPermutesWeights) {
  const auto v = make_phantom(PhantomKind::GaussianBlobs, 12, 2);
  Rng rng(18);
  auto rots = sample_uniform(rng, 30);
  const auto c = CandidateSet::from_rotations(v, rots, false);
  std::vector<std::size_t> perm(30);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Rotation> permuted;
  for (auto p : perm) permuted.push_back(rots[p]);
  const auto cp = CandidateSet::from_rotations(v, permuted, false);
  const NoiseModel noise = NoiseModel::isotropic(0.5 * signal_rms(v.data()) * 30);
  const auto y = synthesize_observation(v, sample_uniform(rng, 1)[0], noise, false, rng);
  const auto w = posterior_weights(y, c, noise);
  const auto wp = posterior_weights(y, cp, noise);
  for (std::size_t l = 0; l < 30; ++l) EXPECT_NEAR(wp.w[l], w.w[perm[l]], 1e-13);
  EXPECT_LE(geodesic_distance(mmse_estimate(y, c, noise).rotation, mmse_estimate(y, cp, noise).rotation), 1e-10);
  EXPECT_TRUE(map_estimate(y, c).rotation == map_estimate(y, cp).rotation);
}

TEST(PropositionOne, MmseApproachesMapAsNoiseVanishes) {
  const auto v = make_phantom(PhantomKind::AsymmetricL, 16, 0);
  auto c = CandidateSet::build(v, RotationPrior::uniform(), 100, 31, false);
  Rng rng(19);
  const auto truth = sample_uniform(rng, 1)[0];
  const auto clean = clean_signal(v, truth, false);
  std::vector<double> eps(clean.size());
  std::normal_distribution<double> n01;
  for (auto& e : eps) e = n01(rng);
  const double scale = signal_rms(clean);
  // Start in the regime where the posterior is still spread out.
  std::vector<double> gaps;
  for (double rel : {3.0, 1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    std::vector<double> y(clean.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = clean[i] + rel * scale * eps[i];
    const auto noise = NoiseModel::isotropic(rel * scale);
    gaps.push_back(geodesic_distance(mmse_estimate(y, c, noise).rotation, map_estimate(y, c).rotation));
  }
  EXPECT_LE(gaps.back(), 1e-6);
  for (std::size_t i = gaps.size() - 3; i < gaps.size(); ++i) EXPECT_LE(gaps[i], gaps[i - 1] + 1e-15);
}
