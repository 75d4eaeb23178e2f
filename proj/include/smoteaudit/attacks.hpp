#pragma once

#include <array>
#include <utility>
#include <vector>

#include "smoteaudit/dataset.hpp"
#include "smoteaudit/geometry.hpp"
#include "smoteaudit/knn.hpp"

namespace smoteaudit {

// Where the scan queue starts: every point, or the per-axis extreme points
// (two per dimension). All points is the default; the extrema mode explores
// outward from the cloud boundary and can skip interior work.
enum class SeedMode { AllPoints, HullExtrema };

struct AttackConfig {
  Index k = 5;
  double ratio = 0.0;  // imbalance ratio r of the attacked data; must exceed 1
  SeedMode seedMode = SeedMode::AllPoints;
  GeometryConfig geometry;
  // Index used by the reconstruction's seed scan; the distinguishing scan
  // queries the shrinking candidate set directly and ignores this.
  IndexStrategy knnStrategy = IndexStrategy::Auto;

  // ceil(2 * k * ratio), capped at pointCount - 1.
  Index neighborBudget(Index pointCount) const;
  void validate() const;
};

struct DegeneracyReport {
  std::vector<std::pair<Index, Index>> duplicatePairs;
  std::vector<std::array<Index, 3>> collinearTriples;
  bool sampledTripleScan = false;

  bool clean() const {
    return duplicatePairs.empty() && collinearTriples.empty();
  }
};

struct DistinguishResult {
  IndexList detectedReal;      // ascending ids into the attacked point set
  IndexList prunedSynthetic;   // ascending; complement of detectedReal
  DegeneracyReport degeneracy;
};

// Separates real from synthetic rows in an augmented minority point set by
// pruning, from every collinear triple, the point that lies between the
// other two. Neighborhoods are drawn from the surviving candidate set, and
// the sweep repeats until it completes without a prune, so detection does
// not depend on the initial synthetic clutter around each point. Operates
// on bare coordinates; no origin information exists in the interface.
DistinguishResult distinSmote(const Eigen::Ref<const Matrix>& points,
                              const AttackConfig& cfg);

// Filters the minority rows of an augmented dataset, strips everything but
// coordinates, runs distinSmote, and maps ids back to rows of `aug`.
DistinguishResult distinSmoteOnDataset(const LabeledDataset& aug,
                                       const AttackConfig& cfg);

struct ReconstructionResult {
  std::vector<Line> lines;            // maximal detected lines
  std::vector<Candidate> candidates;  // merged line intersections
  std::vector<Candidate> accepted;    // candidates with >= 3 supporting lines
};

// Rebuilds real minority positions from synthetic rows alone: detects the
// interpolation lines, intersects them pairwise, merges nearby intersection
// points, and accepts positions supported by at least three distinct lines.
ReconstructionResult reconSmote(const Eigen::Ref<const Matrix>& points,
                                const AttackConfig& cfg);

struct MatchResult {
  double precision = 0.0;
  double recall = 0.0;
  std::vector<std::pair<Index, Index>> pairs;  // (predicted, truth)
};

// Set intersection on ids.
MatchResult matchById(const IndexList& predicted, const IndexList& truth);

// Greedy one-to-one matching by ascending distance; a pair matches when its
// distance is at most matchTol. Empty prediction or truth scores zero on the
// corresponding metric.
MatchResult matchByPosition(const Eigen::Ref<const Matrix>& predicted,
                            const Eigen::Ref<const Matrix>& truth,
                            double matchTol);

}  // namespace smoteaudit
