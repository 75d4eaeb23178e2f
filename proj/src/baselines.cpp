#include "smoteaudit/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "smoteaudit/rng.hpp"

namespace smoteaudit {

namespace {

constexpr std::uint64_t kTrainInStream = 0x100000;
constexpr std::uint64_t kTrainOutStream = 0x200000;
constexpr std::uint64_t kTestInStream = 0x300000;
constexpr std::uint64_t kTestOutStream = 0x400000;
constexpr std::uint64_t kShuffleStream = 0x500000;
constexpr std::uint64_t kWorldLearnerStream = 0xC1A55;
constexpr std::uint64_t kMetaLearnerStream = 0x3E7A;

template <typename T>
void shuffleInPlace(std::vector<T>& values, SplitRng& rng) {
  for (size_t i = values.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.uniformIndex(i));
    std::swap(values[i - 1], values[j]);
  }
}

double giniImpurity(Index positives, Index total) {
  const double p = static_cast<double>(positives) / static_cast<double>(total);
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double vote = 0.0;
};

class TreeEnsembleClassifier final : public Classifier {
 public:
  TreeEnsembleClassifier(std::vector<std::vector<TreeNode>> trees)
      : trees_(std::move(trees)) {}

  double score(const Eigen::Ref<const Vector>& row) const override {
    double votes = 0.0;
    for (const auto& nodes : trees_) {
      int at = 0;
      while (nodes[at].feature >= 0) {
        at = row[nodes[at].feature] <= nodes[at].threshold ? nodes[at].left
                                                           : nodes[at].right;
      }
      votes += nodes[at].vote;
    }
    return votes / static_cast<double>(trees_.size());
  }

 private:
  std::vector<std::vector<TreeNode>> trees_;
};

// One bootstrapped Gini tree. Feature subsets are drawn per split; node
// recursion is left-first, so the random stream is consumed in a fixed
// order.
class TreeBuilder {
 public:
  TreeBuilder(const Eigen::Ref<const Matrix>& x,
              const Eigen::Ref<const Eigen::VectorXi>& y, int maxDepth,
              int featuresPerSplit, SplitRng& rng)
      : x_(x), y_(y), maxDepth_(maxDepth), mtry_(featuresPerSplit), rng_(rng) {}

  std::vector<TreeNode> build(std::vector<Index> rows) {
    nodes_.clear();
    buildNode(std::move(rows), 0);
    return std::move(nodes_);
  }

 private:
  int buildNode(std::vector<Index> rows, int depth) {
    const Index m = static_cast<Index>(rows.size());
    Index positives = 0;
    for (Index r : rows) positives += y_[r];

    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_[id].vote = 2 * positives >= m ? 1.0 : 0.0;

    if (depth >= maxDepth_ || m < 2 || positives == 0 || positives == m) {
      return id;
    }

    std::vector<Index> features(static_cast<size_t>(x_.cols()));
    std::iota(features.begin(), features.end(), Index{0});
    const int picks = std::min<int>(mtry_, static_cast<int>(features.size()));
    for (int j = 0; j < picks; ++j) {
      const size_t swapWith =
          static_cast<size_t>(j) +
          static_cast<size_t>(rng_.uniformIndex(features.size() -
                                                static_cast<size_t>(j)));
      std::swap(features[static_cast<size_t>(j)], features[swapWith]);
    }

    const double parent = giniImpurity(positives, m);
    double bestImpurity = parent - 1e-12;
    Index bestFeature = -1;
    double bestThreshold = 0.0;

    std::vector<std::pair<double, Index>> byValue(rows.size());
    for (int j = 0; j < picks; ++j) {
      const Index f = features[static_cast<size_t>(j)];
      for (size_t t = 0; t < rows.size(); ++t) {
        byValue[t] = {x_(rows[t], f), rows[t]};
      }
      std::sort(byValue.begin(), byValue.end());
      Index leftPositives = 0;
      for (Index split = 1; split < m; ++split) {
        leftPositives += y_[byValue[static_cast<size_t>(split - 1)].second];
        const double lo = byValue[static_cast<size_t>(split - 1)].first;
        const double hi = byValue[static_cast<size_t>(split)].first;
        if (!(hi > lo)) continue;
        const double weighted =
            (static_cast<double>(split) * giniImpurity(leftPositives, split) +
             static_cast<double>(m - split) *
                 giniImpurity(positives - leftPositives, m - split)) /
            static_cast<double>(m);
        if (weighted < bestImpurity) {
          bestImpurity = weighted;
          bestFeature = f;
          bestThreshold = lo + 0.5 * (hi - lo);
        }
      }
    }

    if (bestFeature < 0) return id;

    std::vector<Index> leftRows, rightRows;
    leftRows.reserve(rows.size());
    rightRows.reserve(rows.size());
    for (Index r : rows) {
      (x_(r, bestFeature) <= bestThreshold ? leftRows : rightRows).push_back(r);
    }
    if (leftRows.empty() || rightRows.empty()) return id;

    nodes_[id].feature = static_cast<int>(bestFeature);
    nodes_[id].threshold = bestThreshold;
    rows.clear();
    rows.shrink_to_fit();
    const int left = buildNode(std::move(leftRows), depth + 1);
    const int right = buildNode(std::move(rightRows), depth + 1);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  const Eigen::Ref<const Matrix>& x_;
  const Eigen::Ref<const Eigen::VectorXi>& y_;
  int maxDepth_;
  int mtry_;
  SplitRng& rng_;
  std::vector<TreeNode> nodes_;
};

class LogisticClassifier final : public Classifier {
 public:
  LogisticClassifier(ScalingParams scaling, Vector weights, double bias)
      : scaling_(std::move(scaling)), weights_(std::move(weights)), bias_(bias) {}

  double score(const Eigen::Ref<const Vector>& row) const override {
    const double z =
        ((row - scaling_.shift).array() / scaling_.scale.array()).matrix().dot(
            weights_) +
        bias_;
    return 1.0 / (1.0 + std::exp(-z));
  }

 private:
  ScalingParams scaling_;
  Vector weights_;
  double bias_;
};

void requireSameDimension(const LabeledDataset& a, const LabeledDataset& b,
                          const char* what) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(what) +
                                ": feature dimensions differ");
  }
}

// Nearest row of `rows` to `query` on the given column subset; distance ties
// resolve to the lowest row id.
Index nearestOnSubset(const Matrix& rows, const Eigen::Ref<const Vector>& query,
                      const IndexList& subset) {
  Index best = 0;
  double bestDist = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < rows.rows(); ++i) {
    double dist = 0.0;
    for (Index c : subset) {
      const double delta = rows(i, c) - query[c];
      dist += delta * delta;
    }
    if (dist < bestDist) {
      bestDist = dist;
      best = i;
    }
  }
  return best;
}

LabeledDataset dropRow(const LabeledDataset& ds, Index row) {
  LabeledDataset out;
  const Index n = ds.rows();
  out.features.resize(n - 1, ds.cols());
  out.labels.resize(n - 1);
  out.features.topRows(row) = ds.features.topRows(row);
  out.features.bottomRows(n - 1 - row) = ds.features.bottomRows(n - 1 - row);
  out.labels.head(row) = ds.labels.head(row);
  out.labels.tail(n - 1 - row) = ds.labels.tail(n - 1 - row);
  if (ds.hasOrigin()) {
    out.origin = ds.origin;
    out.origin.erase(out.origin.begin() + row);
  }
  out.columnNames = ds.columnNames;
  out.labelName = ds.labelName;
  return out;
}

// Synthetic rows for one world, generated in the world's standardized space
// and mapped back to the original scale.
Matrix worldSynthetic(const LabeledDataset& world, SmoteConfig smote,
                      std::uint64_t worldSeed) {
  auto [scaled, params] = standardize(world);
  smote.seed = worldSeed;
  const SmoteResult result = smoteOversample(scaled, smote);
  return params.invert(result.synthetic.features);
}

LabeledDataset syntheticDataset(const LabeledDataset& world, Matrix features) {
  LabeledDataset syn;
  syn.labels = Eigen::VectorXi::Ones(features.rows());
  syn.features = std::move(features);
  syn.origin.assign(static_cast<size_t>(syn.features.rows()),
                    Origin::Synthetic);
  syn.columnNames = world.columnNames;
  syn.labelName = world.labelName;
  return syn;
}

Vector worldFeatureVector(const LabeledDataset& world, const SmoteConfig& smote,
                          std::uint64_t worldSeed) {
  return groundhogFeatures(
      syntheticDataset(world, worldSynthetic(world, smote, worldSeed)));
}

double worldClassifierSignal(const LabeledDataset& world, const MiaConfig& cfg,
                             std::uint64_t worldSeed,
                             const Eigen::Ref<const Vector>& target) {
  LearnerConfig learner = cfg.learner;
  learner.seed = SplitRng::deriveSeed(worldSeed, kWorldLearnerStream);
  if (cfg.mode == MiaMode::AugmentedClassifier) {
    const LabeledDataset aug = augment(
        world,
        syntheticDataset(world, worldSynthetic(world, cfg.smote, worldSeed)));
    return trainLearner(aug.features, aug.labels, learner)->score(target);
  }
  return trainLearner(world.features, world.labels, learner)->score(target);
}

Index resolveTarget(const LabeledDataset& real, const MiaConfig& cfg) {
  const Index target =
      cfg.targetOutlier ? pickOutlierTarget(real) : cfg.targetRow;
  if (target < 0 || target >= real.rows() || real.labels[target] != 1) {
    throw std::invalid_argument("miaGame: target must be a minority row");
  }
  return target;
}

}  // namespace

void LearnerConfig::validate() const {
  if (trees < 1 || maxDepth < 1 || featuresPerSplit < 0) {
    throw std::invalid_argument(
        "LearnerConfig: trees and maxDepth must be positive, "
        "featuresPerSplit nonnegative");
  }
  if (!(learningRate > 0.0) || epochs < 1) {
    throw std::invalid_argument(
        "LearnerConfig: learningRate must be positive and epochs at least 1");
  }
}

Vector Classifier::scoreAll(const Eigen::Ref<const Matrix>& rows) const {
  Vector out(rows.rows());
  for (Index i = 0; i < rows.rows(); ++i) {
    out[i] = score(rows.row(i).transpose());
  }
  return out;
}

std::unique_ptr<Classifier> trainLearner(
    const Eigen::Ref<const Matrix>& features,
    const Eigen::Ref<const Eigen::VectorXi>& labels, const LearnerConfig& cfg) {
  cfg.validate();
  const Index n = features.rows();
  if (n != labels.size()) {
    throw std::invalid_argument("trainLearner: row/label count mismatch");
  }
  Index positives = 0;
  for (Index i = 0; i < n; ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw std::invalid_argument("trainLearner: labels must be 0 or 1");
    }
    positives += labels[i];
  }
  if (positives == 0 || positives == n) {
    throw std::invalid_argument("trainLearner: both classes must be present");
  }

  if (cfg.kind == LearnerKind::LinearLogistic) {
    const ScalingParams scaling = fitScaling(features);
    const Matrix x = scaling.apply(features);
    const Vector y = labels.cast<double>();
    Vector w = Vector::Zero(x.cols());
    double b = 0.0;
    const double invN = 1.0 / static_cast<double>(n);
    Vector p(n);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      p = ((x * w).array() + b).matrix();
      p = (1.0 / (1.0 + (-p.array()).exp())).matrix();
      const Vector delta = p - y;
      w -= cfg.learningRate * invN * (x.transpose() * delta);
      b -= cfg.learningRate * invN * delta.sum();
    }
    return std::make_unique<LogisticClassifier>(scaling, std::move(w), b);
  }

  const int mtry = cfg.featuresPerSplit > 0
                       ? cfg.featuresPerSplit
                       : static_cast<int>(std::ceil(
                             std::sqrt(static_cast<double>(features.cols()))));
  std::vector<std::vector<TreeNode>> trees;
  trees.reserve(static_cast<size_t>(cfg.trees));
  for (int t = 0; t < cfg.trees; ++t) {
    SplitRng rng(SplitRng::deriveSeed(cfg.seed, static_cast<std::uint64_t>(t)));
    std::vector<Index> bootstrap(static_cast<size_t>(n));
    for (auto& row : bootstrap) {
      row = static_cast<Index>(rng.uniformIndex(static_cast<size_t>(n)));
    }
    TreeBuilder builder(features, labels, cfg.maxDepth, mtry, rng);
    trees.push_back(builder.build(std::move(bootstrap)));
  }
  return std::make_unique<TreeEnsembleClassifier>(std::move(trees));
}

double dcr(const LabeledDataset& syn, const LabeledDataset& real) {
  requireSameDimension(syn, real, "dcr");
  if (real.rows() == 0) {
    throw std::invalid_argument("dcr: real dataset is empty");
  }
  if (syn.rows() == 0) return 0.0;
  double total = 0.0;
  for (Index i = 0; i < syn.rows(); ++i) {
    total += std::sqrt((real.features.rowwise() - syn.features.row(i))
                           .rowwise()
                           .squaredNorm()
                           .minCoeff());
  }
  return total / static_cast<double>(syn.rows());
}

double linkability(const LabeledDataset& syn, const LabeledDataset& real,
                   const IndexList& subsetA, const IndexList& subsetB) {
  requireSameDimension(syn, real, "linkability");
  if (syn.rows() == 0 || real.rows() == 0) {
    throw std::invalid_argument("linkability: empty dataset");
  }
  if (subsetA.empty() || subsetB.empty()) {
    throw std::invalid_argument("linkability: feature subsets must be nonempty");
  }
  for (const IndexList* subset : {&subsetA, &subsetB}) {
    for (Index c : *subset) {
      if (c < 0 || c >= syn.cols()) {
        throw std::invalid_argument("linkability: feature index out of range");
      }
    }
  }
  IndexList sortedA = subsetA, sortedB = subsetB;
  std::sort(sortedA.begin(), sortedA.end());
  std::sort(sortedB.begin(), sortedB.end());
  IndexList overlap;
  std::set_intersection(sortedA.begin(), sortedA.end(), sortedB.begin(),
                        sortedB.end(), std::back_inserter(overlap));
  if (!overlap.empty()) {
    throw std::invalid_argument("linkability: feature subsets overlap");
  }
  for (const IndexList* subset : {&subsetA, &subsetB}) {
    bool degenerate = true;
    for (Index i = 1; i < syn.rows() && degenerate; ++i) {
      for (Index c : *subset) {
        if (syn.features(i, c) != syn.features(0, c)) {
          degenerate = false;
          break;
        }
      }
    }
    if (degenerate) {
      throw std::invalid_argument(
          "linkability: synthetic rows are identical on a feature subset");
    }
  }

  Index hits = 0;
  for (Index i = 0; i < real.rows(); ++i) {
    const Vector query = real.features.row(i).transpose();
    if (nearestOnSubset(syn.features, query, subsetA) ==
        nearestOnSubset(syn.features, query, subsetB)) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(real.rows());
}

double linkabilityMeanOverSplits(const LabeledDataset& syn,
                                 const LabeledDataset& real, int splits,
                                 std::uint64_t seed) {
  if (splits < 1) {
    throw std::invalid_argument("linkabilityMeanOverSplits: splits must be positive");
  }
  if (syn.cols() < 2) {
    throw std::invalid_argument(
        "linkabilityMeanOverSplits: need at least two features to split");
  }
  const Index d = syn.cols();
  double total = 0.0;
  for (int s = 0; s < splits; ++s) {
    SplitRng rng(SplitRng::deriveSeed(seed, static_cast<std::uint64_t>(s)));
    IndexList perm(static_cast<size_t>(d));
    std::iota(perm.begin(), perm.end(), Index{0});
    shuffleInPlace(perm, rng);
    const auto mid = perm.begin() + static_cast<std::ptrdiff_t>(d / 2);
    IndexList a(perm.begin(), mid), b(mid, perm.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    total += linkability(syn, real, a, b);
  }
  return total / static_cast<double>(splits);
}

NaiveDistinguishResult naiveDistinguish(const LabeledDataset& aug,
                                        const LearnerConfig& learner,
                                        std::uint64_t seed) {
  if (!aug.hasOrigin()) {
    throw std::invalid_argument("naiveDistinguish: origin flags are required");
  }
  IndexList realIds, synIds;
  for (Index i = 0; i < aug.rows(); ++i) {
    if (aug.labels[i] != 1) continue;
    (aug.origin[static_cast<size_t>(i)] == Origin::Real ? realIds : synIds)
        .push_back(i);
  }
  if (realIds.size() < 2 || synIds.size() < 2) {
    throw std::invalid_argument(
        "naiveDistinguish: need at least two minority rows of each origin");
  }

  SplitRng rng(SplitRng::deriveSeed(seed, 0xD157));
  shuffleInPlace(realIds, rng);
  shuffleInPlace(synIds, rng);
  const auto realMid =
      realIds.begin() + static_cast<std::ptrdiff_t>(realIds.size() / 2);
  const auto synMid =
      synIds.begin() + static_cast<std::ptrdiff_t>(synIds.size() / 2);

  IndexList trainIds(realIds.begin(), realMid);
  const Index trainRealCount = static_cast<Index>(trainIds.size());
  trainIds.insert(trainIds.end(), synIds.begin(), synMid);
  IndexList testIds(realMid, realIds.end());
  const Index testRealCount = static_cast<Index>(testIds.size());
  testIds.insert(testIds.end(), synMid, synIds.end());

  Matrix trainX(static_cast<Index>(trainIds.size()), aug.cols());
  Eigen::VectorXi trainY(static_cast<Index>(trainIds.size()));
  for (size_t t = 0; t < trainIds.size(); ++t) {
    trainX.row(static_cast<Index>(t)) = aug.features.row(trainIds[t]);
    trainY[static_cast<Index>(t)] =
        static_cast<Index>(t) < trainRealCount ? 1 : 0;
  }

  LearnerConfig cfg = learner;
  cfg.seed = SplitRng::deriveSeed(seed, learner.seed);
  const auto classifier = trainLearner(trainX, trainY, cfg);

  Index tp = 0, fp = 0;
  for (size_t t = 0; t < testIds.size(); ++t) {
    const double s =
        classifier->score(aug.features.row(testIds[t]).transpose());
    if (s >= 0.5) {
      (static_cast<Index>(t) < testRealCount ? tp : fp) += 1;
    }
  }

  NaiveDistinguishResult out;
  out.evaluated = static_cast<Index>(testIds.size());
  out.predictedReal = tp + fp;
  out.precision = out.predictedReal > 0
                      ? static_cast<double>(tp) /
                            static_cast<double>(out.predictedReal)
                      : 0.0;
  out.recall = static_cast<double>(tp) / static_cast<double>(testRealCount);
  return out;
}

Vector groundhogFeatures(const LabeledDataset& ds) {
  const Index n = ds.rows();
  const Index d = ds.cols();
  if (n < 2) {
    throw std::invalid_argument("groundhogFeatures: need at least two rows");
  }
  Vector out(4 * d + d * (d - 1) / 2);
  const Vector means = ds.features.colwise().mean();
  std::vector<double> column(static_cast<size_t>(n));
  for (Index j = 0; j < d; ++j) {
    out[j] = ds.features.col(j).minCoeff();
    out[d + j] = means[j];
    for (Index i = 0; i < n; ++i) column[static_cast<size_t>(i)] = ds.features(i, j);
    std::sort(column.begin(), column.end());
    const size_t half = static_cast<size_t>(n) / 2;
    out[2 * d + j] = (n % 2 == 1)
                         ? column[half]
                         : 0.5 * (column[half - 1] + column[half]);
    out[3 * d + j] = ds.features.col(j).maxCoeff();
  }

  const Matrix centered = ds.features.rowwise() - means.transpose();
  const Vector sd =
      (centered.colwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt();
  Index at = 4 * d;
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      double corr = 0.0;
      if (sd[i] > 0.0 && sd[j] > 0.0) {
        corr = centered.col(i).dot(centered.col(j)) /
               (static_cast<double>(n) * sd[i] * sd[j]);
        corr = std::clamp(corr, -1.0, 1.0);
      }
      out[at++] = corr;
    }
  }
  return out;
}

double aucScore(const std::vector<double>& scores,
                const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw std::invalid_argument("aucScore: scores and labels must align");
  }
  const size_t n = scores.size();
  size_t positives = 0;
  for (int label : labels) {
    if (label != 0 && label != 1) {
      throw std::invalid_argument("aucScore: labels must be 0 or 1");
    }
    positives += static_cast<size_t>(label);
  }
  if (positives == 0 || positives == n) {
    throw std::invalid_argument("aucScore: both classes must be present");
  }

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  double positiveRankSum = 0.0;
  size_t at = 0;
  while (at < n) {
    size_t end = at + 1;
    while (end < n && scores[order[end]] == scores[order[at]]) ++end;
    const double midrank = 0.5 * (static_cast<double>(at + 1) +
                                  static_cast<double>(end));
    for (size_t t = at; t < end; ++t) {
      if (labels[order[t]] == 1) positiveRankSum += midrank;
    }
    at = end;
  }
  const double np = static_cast<double>(positives);
  const double nn = static_cast<double>(n - positives);
  return (positiveRankSum - np * (np + 1.0) / 2.0) / (np * nn);
}

Index pickOutlierTarget(const LabeledDataset& real) {
  const IndexList minority = real.minorityRows();
  if (minority.empty()) {
    throw std::invalid_argument("pickOutlierTarget: no minority rows");
  }
  Vector center = Vector::Zero(real.cols());
  for (Index id : minority) center += real.features.row(id).transpose();
  center /= static_cast<double>(minority.size());

  Index best = minority[0];
  double bestDist = -1.0;
  for (Index id : minority) {
    const double dist = (real.features.row(id).transpose() - center).norm();
    if (dist > bestDist) {
      bestDist = dist;
      best = id;
    }
  }
  return best;
}

void MiaConfig::validate() const {
  if (trainWorldsPerSide < 10 || testWorldsPerSide < 10) {
    throw std::invalid_argument("MiaConfig: need at least 10 worlds per side");
  }
  if (!targetOutlier && targetRow < 0) {
    throw std::invalid_argument(
        "MiaConfig: set targetRow or enable targetOutlier");
  }
  if (smote.k < 1) {
    throw std::invalid_argument("MiaConfig: smote.k must be positive");
  }
  learner.validate();
}

MiaResult miaGame(const LabeledDataset& real, const MiaConfig& cfg) {
  cfg.validate();
  real.validate();
  const DatasetStats stats = computeStats(real);
  if (stats.n1 - 1 <= cfg.smote.k) {
    throw std::invalid_argument(
        "miaGame: the without-target world needs more minority rows than "
        "smote.k");
  }

  MiaResult result;
  result.targetRow = resolveTarget(real, cfg);
  const LabeledDataset& inWorldData = real;
  const LabeledDataset outWorldData = dropRow(real, result.targetRow);
  const Vector target = real.features.row(result.targetRow).transpose();

  if (cfg.mode == MiaMode::SyntheticFeatures) {
    std::vector<Vector> trainFeatures;
    trainFeatures.reserve(static_cast<size_t>(2 * cfg.trainWorldsPerSide));
    for (Index w = 0; w < cfg.trainWorldsPerSide; ++w) {
      trainFeatures.push_back(worldFeatureVector(
          inWorldData, cfg.smote,
          SplitRng::deriveSeed(cfg.seed, kTrainInStream + static_cast<std::uint64_t>(w))));
    }
    for (Index w = 0; w < cfg.trainWorldsPerSide; ++w) {
      trainFeatures.push_back(worldFeatureVector(
          outWorldData, cfg.smote,
          SplitRng::deriveSeed(cfg.seed, kTrainOutStream + static_cast<std::uint64_t>(w))));
    }
    Matrix trainX(static_cast<Index>(trainFeatures.size()),
                  trainFeatures.front().size());
    Eigen::VectorXi trainY(trainX.rows());
    for (Index i = 0; i < trainX.rows(); ++i) {
      trainX.row(i) = trainFeatures[static_cast<size_t>(i)].transpose();
      trainY[i] = i < cfg.trainWorldsPerSide ? 1 : 0;
    }
    LearnerConfig meta;
    meta.kind = LearnerKind::LinearLogistic;
    meta.learningRate = cfg.learner.learningRate;
    meta.epochs = cfg.learner.epochs;
    meta.seed = SplitRng::deriveSeed(cfg.seed, kMetaLearnerStream);
    const auto metaClassifier = trainLearner(trainX, trainY, meta);

    for (Index w = 0; w < cfg.testWorldsPerSide; ++w) {
      result.inScores.push_back(metaClassifier->score(worldFeatureVector(
          inWorldData, cfg.smote,
          SplitRng::deriveSeed(cfg.seed, kTestInStream + static_cast<std::uint64_t>(w)))));
    }
    for (Index w = 0; w < cfg.testWorldsPerSide; ++w) {
      result.outScores.push_back(metaClassifier->score(worldFeatureVector(
          outWorldData, cfg.smote,
          SplitRng::deriveSeed(cfg.seed, kTestOutStream + static_cast<std::uint64_t>(w)))));
    }
  } else {
    for (Index w = 0; w < cfg.testWorldsPerSide; ++w) {
      result.inScores.push_back(worldClassifierSignal(
          inWorldData, cfg,
          SplitRng::deriveSeed(cfg.seed, kTestInStream + static_cast<std::uint64_t>(w)),
          target));
    }
    for (Index w = 0; w < cfg.testWorldsPerSide; ++w) {
      result.outScores.push_back(worldClassifierSignal(
          outWorldData, cfg,
          SplitRng::deriveSeed(cfg.seed, kTestOutStream + static_cast<std::uint64_t>(w)),
          target));
    }
  }

  std::vector<double> scores = result.inScores;
  scores.insert(scores.end(), result.outScores.begin(),
                result.outScores.end());
  std::vector<int> labels(scores.size(), 0);
  std::fill(labels.begin(),
            labels.begin() + static_cast<std::ptrdiff_t>(result.inScores.size()),
            1);
  result.auc = aucScore(scores, labels);
  return result;
}

double miaShuffledControlMean(const LabeledDataset& real, const MiaConfig& cfg,
                              int repetitions) {
  if (cfg.mode != MiaMode::SyntheticFeatures) {
    throw std::invalid_argument(
        "miaShuffledControlMean: requires MiaMode::SyntheticFeatures");
  }
  if (repetitions < 1) {
    throw std::invalid_argument(
        "miaShuffledControlMean: repetitions must be positive");
  }
  cfg.validate();
  const DatasetStats stats = computeStats(real);
  if (stats.n1 - 1 <= cfg.smote.k) {
    throw std::invalid_argument(
        "miaShuffledControlMean: the without-target world needs more minority "
        "rows than smote.k");
  }
  const Index targetRow = resolveTarget(real, cfg);
  const LabeledDataset& inWorldData = real;
  const LabeledDataset outWorldData = dropRow(real, targetRow);

  std::vector<Vector> trainFeatures, testFeatures;
  for (Index w = 0; w < cfg.trainWorldsPerSide; ++w) {
    trainFeatures.push_back(worldFeatureVector(
        inWorldData, cfg.smote,
        SplitRng::deriveSeed(cfg.seed, kTrainInStream + static_cast<std::uint64_t>(w))));
  }
  for (Index w = 0; w < cfg.trainWorldsPerSide; ++w) {
    trainFeatures.push_back(worldFeatureVector(
        outWorldData, cfg.smote,
        SplitRng::deriveSeed(cfg.seed, kTrainOutStream + static_cast<std::uint64_t>(w))));
  }
  for (Index w = 0; w < cfg.testWorldsPerSide; ++w) {
    testFeatures.push_back(worldFeatureVector(
        inWorldData, cfg.smote,
        SplitRng::deriveSeed(cfg.seed, kTestInStream + static_cast<std::uint64_t>(w))));
  }
  for (Index w = 0; w < cfg.testWorldsPerSide; ++w) {
    testFeatures.push_back(worldFeatureVector(
        outWorldData, cfg.smote,
        SplitRng::deriveSeed(cfg.seed, kTestOutStream + static_cast<std::uint64_t>(w))));
  }

  Matrix trainX(static_cast<Index>(trainFeatures.size()),
                trainFeatures.front().size());
  for (Index i = 0; i < trainX.rows(); ++i) {
    trainX.row(i) = trainFeatures[static_cast<size_t>(i)].transpose();
  }
  std::vector<int> testLabels(testFeatures.size(), 0);
  std::fill(testLabels.begin(),
            testLabels.begin() + cfg.testWorldsPerSide, 1);

  LearnerConfig meta;
  meta.kind = LearnerKind::LinearLogistic;
  meta.learningRate = cfg.learner.learningRate;
  meta.epochs = cfg.learner.epochs;

  double total = 0.0;
  for (int rep = 0; rep < repetitions; ++rep) {
    std::vector<int> shuffled(trainFeatures.size(), 0);
    std::fill(shuffled.begin(), shuffled.begin() + cfg.trainWorldsPerSide, 1);
    SplitRng rng(
        SplitRng::deriveSeed(cfg.seed, kShuffleStream + static_cast<std::uint64_t>(rep)));
    shuffleInPlace(shuffled, rng);
    Eigen::VectorXi trainY(trainX.rows());
    for (Index i = 0; i < trainX.rows(); ++i) {
      trainY[i] = shuffled[static_cast<size_t>(i)];
    }
    meta.seed = SplitRng::deriveSeed(cfg.seed, kShuffleStream + 0x1000 +
                                         static_cast<std::uint64_t>(rep));
    const auto metaClassifier = trainLearner(trainX, trainY, meta);
    std::vector<double> scores;
    scores.reserve(testFeatures.size());
    for (const Vector& f : testFeatures) {
      scores.push_back(metaClassifier->score(f));
    }
    total += aucScore(scores, testLabels);
  }
  return total / static_cast<double>(repetitions);
}

}  // namespace smoteaudit
