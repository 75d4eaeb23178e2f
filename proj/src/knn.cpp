#include "smoteaudit/knn.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace smoteaudit {

namespace {

constexpr Index kTreeMinPoints = 2000;
constexpr Index kTreeMaxDim = 32;
constexpr Index kLeafSize = 16;

// Both strategies measure distance through this one expression so their
// results agree bit for bit.
inline double sqDist(const Matrix& points, Index id,
                     const Eigen::Ref<const Vector>& query) {
  return (points.row(id).transpose() - query).squaredNorm();
}

struct HeapEntry {
  double d2;
  Index id;
};

struct HeapWorse {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    return a.id < b.id;
  }
};

}  // namespace

NeighborIndex::NeighborIndex(Matrix points, IndexStrategy strategy)
    : points_(std::move(points)) {
  if (points_.rows() == 0) {
    throw std::invalid_argument("NeighborIndex: empty point set");
  }
  if (strategy == IndexStrategy::Auto) {
    strategy_ = (points_.rows() >= kTreeMinPoints && points_.cols() <= kTreeMaxDim)
                    ? IndexStrategy::KdTree
                    : IndexStrategy::BruteForce;
  } else {
    strategy_ = strategy;
  }
  if (strategy_ == IndexStrategy::KdTree) {
    order_.resize(points_.rows());
    std::iota(order_.begin(), order_.end(), Index{0});
    nodes_.reserve(static_cast<size_t>(2 * points_.rows() / kLeafSize + 2));
    root_ = buildNode(0, points_.rows());
  }
}

Index NeighborIndex::buildNode(Index begin, Index end) {
  Node node;
  node.begin = begin;
  node.end = end;
  if (end - begin <= kLeafSize) {
    nodes_.push_back(node);
    return static_cast<Index>(nodes_.size() - 1);
  }

  // Split on the widest dimension at the median.
  Index dim = 0;
  double widest = -1.0;
  for (Index j = 0; j < points_.cols(); ++j) {
    double lo = points_(order_[begin], j), hi = lo;
    for (Index t = begin + 1; t < end; ++t) {
      const double v = points_(order_[t], j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      dim = j;
    }
  }
  if (widest <= 0.0) {
    // All points in this range coincide; keep them in one leaf.
    nodes_.push_back(node);
    return static_cast<Index>(nodes_.size() - 1);
  }

  const Index mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](Index a, Index b) {
                     if (points_(a, dim) != points_(b, dim)) {
                       return points_(a, dim) < points_(b, dim);
                     }
                     return a < b;
                   });
  node.feature = static_cast<int>(dim);
  node.split = points_(order_[mid], dim);

  nodes_.push_back(node);
  const Index self = static_cast<Index>(nodes_.size() - 1);
  const Index left = buildNode(begin, mid);
  const Index right = buildNode(mid, end);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

IndexList NeighborIndex::kNearest(const Eigen::Ref<const Vector>& query,
                                  Index m) const {
  if (query.size() != points_.cols()) {
    throw std::invalid_argument("kNearest: query dimension mismatch");
  }
  if (m < 1 || m > points_.rows()) {
    throw std::invalid_argument("kNearest: m out of range");
  }
  return search(query, m, -1);
}

IndexList NeighborIndex::kNearestOf(Index id, Index m, bool excludeSelf) const {
  if (id < 0 || id >= points_.rows()) {
    throw std::invalid_argument("kNearestOf: id out of range");
  }
  const Index available = excludeSelf ? points_.rows() - 1 : points_.rows();
  if (m < 1 || m > available) {
    throw std::invalid_argument("kNearestOf: m out of range");
  }
  const Vector query = points_.row(id).transpose();
  return search(query, m, excludeSelf ? id : -1);
}

IndexList NeighborIndex::search(const Eigen::Ref<const Vector>& query, Index m,
                                Index exclude) const {
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapWorse> heap;
  auto offer = [&](Index id) {
    if (id == exclude) return;
    const double d2 = sqDist(points_, id, query);
    if (static_cast<Index>(heap.size()) < m) {
      heap.push({d2, id});
    } else {
      const HeapEntry& worst = heap.top();
      if (d2 < worst.d2 || (d2 == worst.d2 && id < worst.id)) {
        heap.pop();
        heap.push({d2, id});
      }
    }
  };

  if (strategy_ == IndexStrategy::BruteForce) {
    for (Index id = 0; id < points_.rows(); ++id) offer(id);
  } else {
    // Depth-first descent, nearer child first; a subtree is skipped only
    // when the splitting plane is strictly farther than the current worst,
    // so exact ties still reach the id tie-break.
    std::vector<Index> stack;
    stack.push_back(root_);
    while (!stack.empty()) {
      const Index ni = stack.back();
      stack.pop_back();
      const Node& node = nodes_[ni];
      if (node.feature < 0) {
        for (Index t = node.begin; t < node.end; ++t) offer(order_[t]);
        continue;
      }
      const double delta = query[node.feature] - node.split;
      const Index near = delta < 0 ? node.left : node.right;
      const Index far = delta < 0 ? node.right : node.left;
      if (static_cast<Index>(heap.size()) == m && delta * delta > heap.top().d2) {
        stack.push_back(near);
      } else {
        stack.push_back(far);
        stack.push_back(near);
      }
    }
  }

  std::vector<HeapEntry> entries;
  entries.reserve(heap.size());
  while (!heap.empty()) {
    entries.push_back(heap.top());
    heap.pop();
  }
  std::sort(entries.begin(), entries.end(), [](const HeapEntry& a, const HeapEntry& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    return a.id < b.id;
  });
  IndexList out;
  out.reserve(entries.size());
  for (const HeapEntry& e : entries) out.push_back(e.id);
  return out;
}

KnnGraph buildKnnGraph(const Eigen::Ref<const Matrix>& points, Index k,
                       IndexStrategy strategy) {
  const Index n = points.rows();
  if (k < 1) throw std::invalid_argument("buildKnnGraph: k must be positive");
  if (k > n - 1) {
    throw std::invalid_argument("buildKnnGraph: k exceeds point count - 1");
  }

  NeighborIndex index(points, strategy);
  KnnGraph graph;
  graph.k = k;
  graph.neighbors.resize(n);
  for (Index i = 0; i < n; ++i) {
    graph.neighbors[i] = index.kNearestOf(i, k, true);
  }

  std::vector<IndexList> sortedNeighbors(n);
  for (Index i = 0; i < n; ++i) {
    sortedNeighbors[i] = graph.neighbors[i];
    std::sort(sortedNeighbors[i].begin(), sortedNeighbors[i].end());
  }
  graph.mutual.resize(n);
  for (Index i = 0; i < n; ++i) {
    graph.mutual[i].resize(k);
    for (Index t = 0; t < k; ++t) {
      const Index j = graph.neighbors[i][t];
      graph.mutual[i][t] = std::binary_search(sortedNeighbors[j].begin(),
                                              sortedNeighbors[j].end(), i)
                               ? 1
                               : 0;
    }
  }
  return graph;
}

double mutualityFraction(const KnnGraph& graph) {
  if (graph.nodeCount() == 0 || graph.k == 0) {
    throw std::invalid_argument("mutualityFraction: empty graph");
  }
  Index mutual = 0;
  for (const auto& flags : graph.mutual) {
    for (char f : flags) mutual += f;
  }
  return static_cast<double>(mutual) /
         (static_cast<double>(graph.nodeCount()) * static_cast<double>(graph.k));
}

}  // namespace smoteaudit
