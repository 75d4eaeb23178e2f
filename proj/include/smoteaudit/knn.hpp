#pragma once

#include <vector>

#include "smoteaudit/types.hpp"

namespace smoteaudit {

enum class IndexStrategy { Auto, BruteForce, KdTree };

// Exact Euclidean nearest-neighbor queries over a fixed point set. Both
// strategies return identical lists: neighbors are ordered by ascending
// (distance, id), so exact distance ties resolve to the lower id. Auto picks
// the kd-tree for n >= 2000 and d <= 32, brute force otherwise.
class NeighborIndex {
 public:
  explicit NeighborIndex(Matrix points, IndexStrategy strategy = IndexStrategy::Auto);

  // The m nearest members to an arbitrary query point.
  IndexList kNearest(const Eigen::Ref<const Vector>& query, Index m) const;

  // The m nearest members to member `id`; the member itself is excluded
  // unless excludeSelf is false.
  IndexList kNearestOf(Index id, Index m, bool excludeSelf = true) const;

  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  IndexStrategy strategy() const { return strategy_; }
  const Matrix& points() const { return points_; }

 private:
  struct Node {
    int feature = -1;      // split dimension; -1 marks a leaf
    double split = 0.0;
    Index left = -1, right = -1;
    Index begin = 0, end = 0;  // leaf range into order_
  };

  IndexList search(const Eigen::Ref<const Vector>& query, Index m,
                   Index exclude) const;
  Index buildNode(Index begin, Index end);

  Matrix points_;
  IndexStrategy strategy_;
  std::vector<Node> nodes_;
  IndexList order_;
  Index root_ = -1;
};

// Directed k-nearest-neighbor graph with mutuality flags: edge i -> j is
// mutual when j -> i is also present.
struct KnnGraph {
  Index k = 0;
  std::vector<IndexList> neighbors;        // per node, ascending (distance, id)
  std::vector<std::vector<char>> mutual;   // parallel flags

  Index nodeCount() const { return static_cast<Index>(neighbors.size()); }
};

KnnGraph buildKnnGraph(const Eigen::Ref<const Matrix>& points, Index k,
                       IndexStrategy strategy = IndexStrategy::Auto);

// Fraction of directed edges whose reverse edge exists.
double mutualityFraction(const KnnGraph& graph);

}  // namespace smoteaudit
