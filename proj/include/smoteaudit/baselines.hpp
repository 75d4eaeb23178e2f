#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "smoteaudit/dataset.hpp"
#include "smoteaudit/smote.hpp"
#include "smoteaudit/types.hpp"

namespace smoteaudit {

enum class LearnerKind { TreeEnsemble, LinearLogistic };

// Deterministic internal learners. The tree ensemble is a random forest:
// bootstrapped depth-limited trees, Gini splits, per-split feature
// subsampling, score = fraction of trees voting the positive class. The
// linear-logistic learner is full-batch gradient descent on internally
// standardized features; it uses no randomness, so its output depends only
// on the data.
struct LearnerConfig {
  LearnerKind kind = LearnerKind::TreeEnsemble;
  int trees = 50;
  int maxDepth = 8;
  int featuresPerSplit = 0;  // 0 means ceil(sqrt(d))
  double learningRate = 0.1;
  int epochs = 200;
  std::uint64_t seed = 0;

  void validate() const;
};

class Classifier {
 public:
  virtual ~Classifier() = default;

  // Probability-like score in [0, 1] for the positive class.
  virtual double score(const Eigen::Ref<const Vector>& row) const = 0;

  Vector scoreAll(const Eigen::Ref<const Matrix>& rows) const;
};

// Trains a binary classifier on label values {0, 1}. Throws when only one
// class is present.
std::unique_ptr<Classifier> trainLearner(const Eigen::Ref<const Matrix>& features,
                                         const Eigen::Ref<const Eigen::VectorXi>& labels,
                                         const LearnerConfig& cfg);

// Mean Euclidean distance from each synthetic row to its nearest real row.
// Empty synthetic input scores 0; an empty real set is an error.
double dcr(const LabeledDataset& syn, const LabeledDataset& real);

// Linkability attack on one feature split: for each real row, find the
// nearest synthetic row using only the columns in subsetA and again using
// only subsetB; the attack succeeds when both lookups return the same
// synthetic row. Distance ties resolve to the lowest synthetic id. Throws
// when a subset is empty, overlapping, out of range, or spans a degenerate
// (all-rows-identical) synthetic subspace.
double linkability(const LabeledDataset& syn, const LabeledDataset& real,
                   const IndexList& subsetA, const IndexList& subsetB);

// Mean linkability over `splits` random equal-size feature bipartitions
// drawn from `seed`.
double linkabilityMeanOverSplits(const LabeledDataset& syn,
                                 const LabeledDataset& real, int splits,
                                 std::uint64_t seed);

struct NaiveDistinguishResult {
  double precision = 0.0;  // for the "real" class
  double recall = 0.0;
  Index evaluated = 0;      // held-out rows
  Index predictedReal = 0;  // positive predictions among them
};

// Classifier baseline for telling real minority rows from synthetic ones.
// The minority rows of `aug` are split 50/50 stratified by origin; the
// learner trains to predict origin and is scored on the held-out half.
// Requires origin flags and at least two rows of each origin.
NaiveDistinguishResult naiveDistinguish(const LabeledDataset& aug,
                                        const LearnerConfig& learner,
                                        std::uint64_t seed);

// Dataset summary used by the membership game: per-column min, mean, median,
// and max, then the upper triangle of the Pearson correlation matrix
// (zero-variance columns contribute correlation 0). Length 4d + d(d-1)/2.
// Requires at least two rows.
Vector groundhogFeatures(const LabeledDataset& ds);

// Area under the ROC curve via the Mann-Whitney statistic with midranks for
// ties. Labels are {0, 1} and both classes must appear.
double aucScore(const std::vector<double>& scores,
                const std::vector<int>& labels);

// What the membership adversary observes per world: summary features of the
// released synthetic data, the score of a classifier trained on the
// augmented data, or the score of a classifier trained on the real data
// alone (the no-oversampling control).
enum class MiaMode { SyntheticFeatures, AugmentedClassifier, RealClassifier };

struct MiaConfig {
  Index targetRow = -1;        // row into the real dataset; must be minority
  bool targetOutlier = false;  // instead pick the minority row farthest from
                               // the minority mean
  Index trainWorldsPerSide = 100;
  Index testWorldsPerSide = 50;
  MiaMode mode = MiaMode::SyntheticFeatures;
  SmoteConfig smote;       // per-world seed is derived, smote.seed is ignored
  LearnerConfig learner;   // classifier modes only; the feature-mode
                           // meta-classifier is always linear-logistic
  std::uint64_t seed = 0;

  void validate() const;
};

struct MiaResult {
  double auc = 0.0;
  std::vector<double> inScores;   // one per test world with the target
  std::vector<double> outScores;  // one per test world without it
  Index targetRow = -1;
};

// Minority row with the largest distance to the minority mean.
Index pickOutlierTarget(const LabeledDataset& real);

// Membership inference game: per world, the real data with or without the
// target row is standardized, oversampled with a world-derived seed, and
// mapped back to the original scale; the mode determines the membership
// signal; the result is the AUC separating in-worlds from out-worlds.
MiaResult miaGame(const LabeledDataset& real, const MiaConfig& cfg);

// Null calibration of the feature mode: the meta-classifier is retrained
// `repetitions` times on label-shuffled train worlds and the mean test AUC
// is returned. Requires MiaMode::SyntheticFeatures.
double miaShuffledControlMean(const LabeledDataset& real, const MiaConfig& cfg,
                              int repetitions);

}  // namespace smoteaudit
