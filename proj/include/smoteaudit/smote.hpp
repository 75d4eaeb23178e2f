#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "smoteaudit/dataset.hpp"
#include "smoteaudit/knn.hpp"

namespace smoteaudit {

struct SmoteConfig {
  Index k = 5;
  Index target = 0;  // synthetic row count; 0 means n0 - n1
  std::uint64_t seed = 0;
  IndexStrategy knnStrategy = IndexStrategy::Auto;
};

// One synthetic row's construction: row = source + weight * (neighbor - source),
// with source/neighbor indexing the minority subset in row order.
struct ProvenanceRecord {
  Index source = 0;
  Index neighbor = 0;
  double weight = 0.0;
};

struct SmoteResult {
  LabeledDataset synthetic;                   // all-minority rows, origin Synthetic
  std::vector<ProvenanceRecord> provenance;   // one record per synthetic row
};

// Interpolation oversampling: repeatedly picks a uniform minority row, one of
// its k nearest minority neighbors (uniformly), and a uniform weight in the
// open interval (0, 1). Neighbor lists exclude the point itself and are fixed
// up front from the minority k-nearest-neighbor graph.
SmoteResult smoteOversample(const LabeledDataset& real, const SmoteConfig& cfg);

// Real rows followed by synthetic rows, with origin flags set accordingly.
LabeledDataset augment(const LabeledDataset& real, const LabeledDataset& synthetic);

// Counts provenance records per undirected segment {source, neighbor}.
std::map<std::pair<Index, Index>, Index> segmentUsageCounts(
    const std::vector<ProvenanceRecord>& provenance);

}  // namespace smoteaudit
