#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smoteaudit/types.hpp"

namespace smoteaudit {

enum class Origin : std::uint8_t { Real, Synthetic };

// Binary-labeled feature table. Label 1 marks the minority class.
struct LabeledDataset {
  Matrix features;                        // n x d
  Eigen::VectorXi labels;                 // n, values in {0, 1}
  std::vector<Origin> origin;             // empty, or one flag per row
  std::vector<std::string> columnNames;   // d feature names
  std::string labelName = "label";
  std::vector<std::string> warnings;      // attached by loaders/builders

  Index rows() const { return features.rows(); }
  Index cols() const { return features.cols(); }
  bool hasOrigin() const { return !origin.empty(); }

  Index minorityCount() const;
  Index majorityCount() const;
  IndexList minorityRows() const;
  Matrix minorityFeatures() const;

  // Structural checks: finite features, labels in {0,1}, consistent sizes.
  void validate() const;
};

struct DatasetStats {
  Index n = 0;
  Index d = 0;
  Index n0 = 0;  // majority count
  Index n1 = 0;  // minority count
  double r = 0;  // imbalance ratio n0 / n1
};

// Errors if the dataset has no minority rows.
DatasetStats computeStats(const LabeledDataset& ds);

// Per-column affine transform: standardized = (x - shift) / scale.
struct ScalingParams {
  Vector shift;
  Vector scale;  // strictly positive

  Matrix apply(const Matrix& x) const;
  Matrix invert(const Matrix& x) const;
};

// Fits shift = column mean and scale = population standard deviation
// (divide by n). Columns with zero variance get scale 1 (shift only).
ScalingParams fitScaling(const Matrix& features);

std::pair<LabeledDataset, ScalingParams> standardize(const LabeledDataset& ds);

enum class ClusterLayout { SingleGaussian, TwoGaussian };

struct FixtureSpec {
  Index n0 = 90;
  Index n1 = 10;
  Index d = 2;
  ClusterLayout layout = ClusterLayout::SingleGaussian;
  bool plantedOutlier = false;
  std::uint64_t seed = 0;

  std::string name() const;
};

// Deterministic synthetic benchmark dataset. Minority rows are drawn from
// the requested Gaussian layout (identity covariance, unit scale) and are
// resampled (bounded retries on derived sub-seeds) until no three minority
// rows are collinear at the default geometric tolerance and no two minority
// rows coincide. Majority rows are a single Gaussian centered at the origin;
// the minority mean sits 6 units away. The two-gaussian layout splits the
// minority into two clusters with means 6 units apart. With plantedOutlier,
// the last minority row is placed 8 units outside the minority cluster on
// the side facing the majority mass.
LabeledDataset makeFixture(const FixtureSpec& spec);

// CSV input: UTF-8, comma-separated, one header line, decimal-point reals.
// The label column is selected by name; rows whose label cell equals
// minorityLabel get label 1. A column named "origin" with values
// real/synthetic is read into origin flags when present.
LabeledDataset loadCsv(const std::string& path, const std::string& labelColumn,
                       const std::string& minorityLabel);

// Writes features, the label column, and (when present and requested) the
// origin column. Values round-trip through loadCsv bit-exactly.
void saveCsv(const LabeledDataset& ds, const std::string& path,
             bool withOrigin = true);

}  // namespace smoteaudit
