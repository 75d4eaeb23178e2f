#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "smoteaudit/baselines.hpp"
#include "smoteaudit/dataset.hpp"
#include "smoteaudit/rng.hpp"
#include "smoteaudit/smote.hpp"

using namespace smoteaudit;

namespace {

LabeledDataset datasetFrom(Matrix features, int label) {
  LabeledDataset ds;
  ds.labels = Eigen::VectorXi::Constant(features.rows(), label);
  ds.features = std::move(features);
  return ds;
}

LabeledDataset fixture(Index n0, Index n1, Index d, std::uint64_t seed,
                       bool outlier = false) {
  FixtureSpec spec;
  spec.n0 = n0;
  spec.n1 = n1;
  spec.d = d;
  spec.seed = seed;
  spec.plantedOutlier = outlier;
  return makeFixture(spec);
}

Matrix gaussianCloud(Index n, Index d, double shift, SplitRng& rng) {
  Matrix m(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) m(i, j) = rng.normal() + shift;
  }
  return m;
}

}  // namespace

TEST_CASE("distance to closest record is zero for identical sets") {
  const LabeledDataset real = fixture(40, 10, 3, 1);
  CHECK(dcr(real, real) == 0.0);
}

TEST_CASE("distance to closest record matches a hand computation") {
  Matrix synF(2, 2);
  synF << 0, 0,
          3, 4;
  Matrix realF(2, 2);
  realF << 0, 0,
           0, 1;
  const LabeledDataset syn = datasetFrom(synF, 1);
  const LabeledDataset real = datasetFrom(realF, 1);
  // (0,0) sits on a real row; (3,4)'s nearest real row is (0,1), at distance 3*sqrt(2).
  CHECK(dcr(syn, real) ==
        doctest::Approx(0.5 * std::sqrt(18.0)).epsilon(1e-12));

  LabeledDataset emptySyn;
  emptySyn.features.resize(0, 2);
  emptySyn.labels.resize(0);
  CHECK(dcr(emptySyn, real) == 0.0);

  LabeledDataset emptyReal;
  emptyReal.features.resize(0, 2);
  emptyReal.labels.resize(0);
  CHECK_THROWS_AS(dcr(syn, emptyReal), std::invalid_argument);
}

TEST_CASE("linkability links rows whose split-halves agree") {
  Matrix synF(2, 4);
  synF << 0, 0, 0, 0,
          10, 10, 10, 10;
  Matrix realF(2, 4);
  realF << 0.1, 0.0, 0.0, 0.1,   // nearest syn row 0 on both halves
           10.0, 10.0, 0.0, 0.0; // syn row 1 on the first half, 0 on the second
  const LabeledDataset syn = datasetFrom(synF, 1);
  const LabeledDataset real = datasetFrom(realF, 1);
  CHECK(linkability(syn, real, {0, 1}, {2, 3}) == 0.5);

  // Distance ties resolve to the lowest synthetic id on both halves.
  Matrix tieF(1, 4);
  tieF << 5, 5, 5, 5;  // equidistant from both synthetic rows everywhere
  const LabeledDataset tied = datasetFrom(tieF, 1);
  CHECK(linkability(syn, tied, {0, 1}, {2, 3}) == 1.0);

  CHECK_THROWS_AS(linkability(syn, real, {}, {2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(linkability(syn, real, {0, 1}, {1, 3}), std::invalid_argument);
  CHECK_THROWS_AS(linkability(syn, real, {0, 9}, {2, 3}), std::invalid_argument);
}

TEST_CASE("linkability on independent data stays at the chance rate") {
  // With synthetic rows independent of the real rows and the two feature
  // halves independent of each other, the probability that both halves pick
  // the same synthetic row is exactly 1/|syn|.
  const Index synRows = 8;
  const Index realRows = 40;
  const Index d = 8;
  const int reps = 30;
  SplitRng rng(0x11AB);

  std::vector<double> perRep;
  perRep.reserve(reps);
  for (int rep = 0; rep < reps; ++rep) {
    const LabeledDataset syn = datasetFrom(gaussianCloud(synRows, d, 0.0, rng), 1);
    const LabeledDataset real =
        datasetFrom(gaussianCloud(realRows, d, 0.0, rng), 1);
    perRep.push_back(linkability(syn, real, {0, 1, 2, 3}, {4, 5, 6, 7}));
  }

  double mean = 0.0;
  for (double v : perRep) mean += v;
  mean /= static_cast<double>(reps);
  double var = 0.0;
  for (double v : perRep) var += (v - mean) * (v - mean);
  var /= static_cast<double>(reps - 1);
  const double stderrMean = std::sqrt(var / static_cast<double>(reps));
  const double chance = 1.0 / static_cast<double>(synRows);
  CHECK(std::abs(mean - chance) <= 3.0 * stderrMean + 1e-12);
}

TEST_CASE("mean linkability over splits is deterministic in the seed") {
  const LabeledDataset real = fixture(60, 20, 6, 4);
  SmoteConfig cfg;
  cfg.k = 5;
  cfg.seed = 9;
  const SmoteResult smote = smoteOversample(real, cfg);
  const double a = linkabilityMeanOverSplits(smote.synthetic, real, 5, 77);
  const double b = linkabilityMeanOverSplits(smote.synthetic, real, 5, 77);
  CHECK(a == b);
  CHECK(a >= 0.0);
  CHECK(a <= 1.0);
}

TEST_CASE("auc scores rank separation, reversal, and ties") {
  CHECK(aucScore({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}) == 1.0);
  CHECK(aucScore({0.8, 0.9, 0.1, 0.2}, {0, 0, 1, 1}) == 0.0);
  CHECK(aucScore({0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}) == 0.5);
  // Pairwise count: 3 of the 4 (positive, negative) pairs rank correctly.
  CHECK(aucScore({0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1}) == 0.75);
  // A tied positive/negative pair contributes half.
  CHECK(aucScore({0.3, 0.3}, {0, 1}) == 0.5);
  CHECK_THROWS_AS(aucScore({0.5, 0.6}, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(aucScore({0.5}, std::vector<int>{}), std::invalid_argument);
  CHECK_THROWS_AS(aucScore({0.5, 0.6}, {0, 2}), std::invalid_argument);
}

TEST_CASE("summary features follow the documented layout") {
  Matrix f(3, 2);
  f << 1, 2,
       3, 4,
       5, 6;
  const LabeledDataset ds = datasetFrom(f, 1);
  const Vector out = groundhogFeatures(ds);
  REQUIRE(out.size() == 9);  // 4 * 2 + 1
  CHECK(out[0] == 1.0);  // min of column 0
  CHECK(out[1] == 2.0);  // min of column 1
  CHECK(out[2] == 3.0);  // mean of column 0
  CHECK(out[3] == 4.0);  // mean of column 1
  CHECK(out[4] == 3.0);  // median of column 0
  CHECK(out[5] == 4.0);  // median of column 1
  CHECK(out[6] == 5.0);  // max of column 0
  CHECK(out[7] == 6.0);  // max of column 1
  CHECK(out[8] == doctest::Approx(1.0).epsilon(1e-12));  // perfect correlation

  // Even row count: medians interpolate; zero-variance columns give corr 0.
  Matrix g(4, 2);
  g << 1, 7,
       2, 7,
       4, 7,
       8, 7;
  const Vector even = groundhogFeatures(datasetFrom(g, 1));
  CHECK(even[4] == 3.0);  // median of {1,2,4,8}
  CHECK(even[5] == 7.0);
  CHECK(even[8] == 0.0);  // constant column correlates with nothing

  LabeledDataset tooSmall = datasetFrom(Matrix::Zero(1, 2), 1);
  CHECK_THROWS_AS(groundhogFeatures(tooSmall), std::invalid_argument);
}

TEST_CASE("both learners separate well-separated classes") {
  SplitRng rng(0x7EA1);
  const Index n = 60;
  const Index d = 4;
  Matrix features(2 * n, d);
  features.topRows(n) = gaussianCloud(n, d, -2.0, rng);
  features.bottomRows(n) = gaussianCloud(n, d, 2.0, rng);
  Eigen::VectorXi labels(2 * n);
  labels.head(n).setZero();
  labels.tail(n).setOnes();

  for (LearnerKind kind : {LearnerKind::TreeEnsemble, LearnerKind::LinearLogistic}) {
    LearnerConfig cfg;
    cfg.kind = kind;
    cfg.trees = 25;
    cfg.maxDepth = 5;
    cfg.seed = 3;
    const auto model = trainLearner(features, labels, cfg);
    const Vector scores = model->scoreAll(features);
    std::vector<double> s(scores.data(), scores.data() + scores.size());
    std::vector<int> y(labels.data(), labels.data() + labels.size());
    const double auc = aucScore(s, y);
    INFO("learner kind ", static_cast<int>(kind));
    CHECK(auc >= 0.95);
    for (double v : s) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }

  Eigen::VectorXi oneClass = Eigen::VectorXi::Ones(2 * n);
  LearnerConfig cfg;
  CHECK_THROWS_AS(trainLearner(features, oneClass, cfg), std::invalid_argument);
}

TEST_CASE("tree ensemble training is deterministic in the seed") {
  SplitRng rng(0x7EA2);
  Matrix features(40, 3);
  features.topRows(20) = gaussianCloud(20, 3, -1.5, rng);
  features.bottomRows(20) = gaussianCloud(20, 3, 1.5, rng);
  Eigen::VectorXi labels(40);
  labels.head(20).setZero();
  labels.tail(20).setOnes();

  LearnerConfig cfg;
  cfg.trees = 10;
  cfg.maxDepth = 4;
  cfg.seed = 5;
  const Vector a = trainLearner(features, labels, cfg)->scoreAll(features);
  const Vector b = trainLearner(features, labels, cfg)->scoreAll(features);
  CHECK(a == b);
}

TEST_CASE("naive origin classifier reports sane holdout metrics") {
  const LabeledDataset real = fixture(300, 50, 4, 8);
  auto [scaled, params] = standardize(real);
  SmoteConfig smoteCfg;
  smoteCfg.k = 5;
  smoteCfg.seed = 12;
  const SmoteResult smote = smoteOversample(scaled, smoteCfg);
  const LabeledDataset aug = augment(scaled, smote.synthetic);

  LearnerConfig learner;
  learner.trees = 20;
  learner.maxDepth = 5;
  const NaiveDistinguishResult result = naiveDistinguish(aug, learner, 42);
  CHECK(result.precision >= 0.0);
  CHECK(result.precision <= 1.0);
  CHECK(result.recall >= 0.0);
  CHECK(result.recall <= 1.0);
  CHECK(result.evaluated > 0);
  CHECK(result.predictedReal >= 0);
  CHECK(result.predictedReal <= result.evaluated);
  // Half of the 300 minority rows (50 real + 250 synthetic) are held out.
  CHECK(result.evaluated == 150);

  const NaiveDistinguishResult again = naiveDistinguish(aug, learner, 42);
  CHECK(result.precision == again.precision);
  CHECK(result.recall == again.recall);

  // Origin flags are required.
  LabeledDataset noOrigin = aug;
  noOrigin.origin.clear();
  CHECK_THROWS_AS(naiveDistinguish(noOrigin, learner, 42),
                  std::invalid_argument);
}

TEST_CASE("outlier target picking maximizes distance from the minority mean") {
  const LabeledDataset real = fixture(120, 20, 5, 6, true);
  const Index picked = pickOutlierTarget(real);
  REQUIRE(picked >= 0);
  REQUIRE(picked < real.rows());
  CHECK(real.labels[picked] == 1);

  const Matrix minority = real.minorityFeatures();
  const IndexList ids = real.minorityRows();
  const Vector mean = minority.colwise().mean().transpose();
  double bestDist = -1.0;
  Index bestId = -1;
  for (Index i = 0; i < minority.rows(); ++i) {
    const double dist = (minority.row(i).transpose() - mean).norm();
    if (dist > bestDist) {
      bestDist = dist;
      bestId = ids[static_cast<size_t>(i)];
    }
  }
  CHECK(picked == bestId);
  // The planted outlier is far out; anything this far is unambiguous.
  CHECK(bestDist >= 5.0);
}

TEST_CASE("membership game runs deterministically in feature mode") {
  const LabeledDataset real = fixture(60, 20, 4, 10);
  MiaConfig cfg;
  cfg.targetOutlier = true;
  cfg.trainWorldsPerSide = 10;
  cfg.testWorldsPerSide = 10;
  cfg.mode = MiaMode::SyntheticFeatures;
  cfg.smote.k = 5;
  cfg.seed = 31;

  const MiaResult a = miaGame(real, cfg);
  CHECK(a.auc >= 0.0);
  CHECK(a.auc <= 1.0);
  CHECK(a.inScores.size() == 10);
  CHECK(a.outScores.size() == 10);
  CHECK(a.targetRow == pickOutlierTarget(real));

  const MiaResult b = miaGame(real, cfg);
  CHECK(a.auc == b.auc);
  CHECK(a.inScores == b.inScores);
  CHECK(a.outScores == b.outScores);
}

TEST_CASE("membership game classifier modes score the target row") {
  const LabeledDataset real = fixture(60, 20, 4, 10);
  MiaConfig cfg;
  cfg.targetOutlier = true;
  cfg.trainWorldsPerSide = 10;  // classifier modes ignore train worlds
  cfg.testWorldsPerSide = 10;
  cfg.smote.k = 5;
  cfg.learner.trees = 10;
  cfg.learner.maxDepth = 4;
  cfg.seed = 32;

  for (MiaMode mode : {MiaMode::AugmentedClassifier, MiaMode::RealClassifier}) {
    cfg.mode = mode;
    const MiaResult result = miaGame(real, cfg);
    INFO("mode ", static_cast<int>(mode));
    CHECK(result.auc >= 0.0);
    CHECK(result.auc <= 1.0);
    CHECK(result.inScores.size() == 10);
    CHECK(result.outScores.size() == 10);
    for (double s : result.inScores) {
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
  }
}

TEST_CASE("membership game validates its target") {
  const LabeledDataset real = fixture(40, 10, 3, 2);
  MiaConfig cfg;
  cfg.targetRow = -1;  // no outlier flag, no explicit row
  CHECK_THROWS_AS(miaGame(real, cfg), std::invalid_argument);
  cfg.targetRow = 0;
  if (real.labels[0] != 1) {
    CHECK_THROWS_AS(miaGame(real, cfg), std::invalid_argument);
  }
}
