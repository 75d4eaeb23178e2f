#include "smoteaudit/geometry.hpp"

#include <algorithm>
#include <numeric>

namespace smoteaudit {

namespace {

// Flips the direction so its largest-magnitude component is positive.
void canonicalizeSign(Vector& direction) {
  Index best = 0;
  for (Index j = 1; j < direction.size(); ++j) {
    if (std::abs(direction[j]) > std::abs(direction[best])) best = j;
  }
  if (direction[best] < 0.0) direction = -direction;
}

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

bool lexLess(const Vector& a, const Vector& b) {
  for (Index j = 0; j < a.size(); ++j) {
    if (a[j] != b[j]) return a[j] < b[j];
  }
  return false;
}

}  // namespace

Line growLine(const std::array<Index, 3>& seed, const IndexList& candidates,
              const Eigen::Ref<const Matrix>& points,
              const GeometryConfig& cfg) {
  cfg.validate();
  for (Index id : seed) {
    if (id < 0 || id >= points.rows()) {
      throw std::invalid_argument("growLine: seed id out of range");
    }
  }

  // The two most distant seed points define the seed line.
  Index e1 = seed[0], e2 = seed[1];
  double best = (points.row(seed[0]) - points.row(seed[1])).norm();
  const std::array<std::pair<Index, Index>, 2> rest = {
      {{seed[0], seed[2]}, {seed[1], seed[2]}}};
  for (const auto& [a, b] : rest) {
    const double dist = (points.row(a) - points.row(b)).norm();
    if (dist > best) {
      best = dist;
      e1 = a;
      e2 = b;
    }
  }
  if (best == 0.0) {
    throw std::invalid_argument("growLine: seed points coincide");
  }

  IndexList members(seed.begin(), seed.end());
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  for (Index id : candidates) {
    if (id < 0 || id >= points.rows()) {
      throw std::invalid_argument("growLine: candidate id out of range");
    }
    if (std::find(members.begin(), members.end(), id) != members.end()) continue;
    if (collinear(points.row(e1), points.row(e2), points.row(id), cfg)) {
      members.push_back(id);
    }
  }
  std::sort(members.begin(), members.end());

  Line line;
  line.members = members;
  line.anchor = Vector::Zero(points.cols());
  for (Index id : members) line.anchor += points.row(id).transpose();
  line.anchor /= static_cast<double>(members.size());

  // Recompute the direction from the two members with extreme projections
  // onto the seed direction.
  const Vector w = (points.row(e2) - points.row(e1)).transpose();
  Index lo = members[0], hi = members[0];
  double tLo = std::numeric_limits<double>::infinity();
  double tHi = -std::numeric_limits<double>::infinity();
  for (Index id : members) {
    const double t = (points.row(id).transpose() - line.anchor).dot(w);
    if (t < tLo) {
      tLo = t;
      lo = id;
    }
    if (t > tHi) {
      tHi = t;
      hi = id;
    }
  }
  line.direction = (points.row(hi) - points.row(lo)).transpose();
  const double norm = line.direction.norm();
  if (norm == 0.0) {
    throw std::invalid_argument("growLine: degenerate member spread");
  }
  line.direction /= norm;
  canonicalizeSign(line.direction);
  return line;
}

std::optional<Vector> intersectLines(const Line& p, const Line& q,
                                     const GeometryConfig& cfg) {
  cfg.validate();
  if (p.anchor.size() != q.anchor.size()) {
    throw std::invalid_argument("intersectLines: dimension mismatch");
  }
  const double cosAngle = p.direction.dot(q.direction);
  if (std::abs(cosAngle) > 1.0 - cfg.parallelTol) return std::nullopt;

  // Least-squares closest approach: minimize over (s, t) the distance
  // between p.anchor + s * p.direction and q.anchor + t * q.direction.
  const Vector w = p.anchor - q.anchor;
  const double det = 1.0 - cosAngle * cosAngle;
  const double wu = w.dot(p.direction);
  const double wv = w.dot(q.direction);
  const double s = (cosAngle * wv - wu) / det;
  const double t = (wv - cosAngle * wu) / det;

  const Vector onP = p.anchor + s * p.direction;
  const Vector onQ = q.anchor + t * q.direction;
  const double gap = (onP - onQ).norm();
  const double tol =
      cfg.intersectTol * (1.0 + std::min(p.anchor.norm(), q.anchor.norm()));
  if (gap > tol) return std::nullopt;
  return (onP + onQ) / 2.0;
}

std::vector<Candidate> mergeCandidates(const std::vector<Candidate>& candidates,
                                       const GeometryConfig& cfg) {
  cfg.validate();
  std::vector<Candidate> current = candidates;

  // Single-linkage closure, repeated until centroids stop colliding.
  while (current.size() > 1) {
    const int n = static_cast<int>(current.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return current[a].point[0] < current[b].point[0];
    });

    UnionFind uf(n);
    bool merged = false;
    for (int a = 0; a < n; ++a) {
      const Candidate& ca = current[order[a]];
      for (int b = a + 1; b < n; ++b) {
        const Candidate& cb = current[order[b]];
        if (cb.point[0] - ca.point[0] > cfg.mergeRadius) break;
        if ((ca.point - cb.point).norm() <= cfg.mergeRadius) {
          uf.unite(order[a], order[b]);
          merged = true;
        }
      }
    }
    if (!merged) break;

    std::vector<std::vector<int>> groups(n);
    for (int i = 0; i < n; ++i) groups[uf.find(i)].push_back(i);

    std::vector<Candidate> next;
    for (const auto& group : groups) {
      if (group.empty()) continue;
      // Average in lexicographic point order so the centroid does not
      // depend on input order.
      std::vector<int> sorted = group;
      std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
        return lexLess(current[a].point, current[b].point);
      });
      Candidate out;
      out.point = Vector::Zero(current[sorted[0]].point.size());
      for (int id : sorted) {
        out.point += current[id].point;
        out.supports.insert(out.supports.end(), current[id].supports.begin(),
                            current[id].supports.end());
      }
      out.point /= static_cast<double>(sorted.size());
      std::sort(out.supports.begin(), out.supports.end());
      out.supports.erase(std::unique(out.supports.begin(), out.supports.end()),
                         out.supports.end());
      next.push_back(std::move(out));
    }
    current = std::move(next);
  }

  std::sort(current.begin(), current.end(),
            [](const Candidate& a, const Candidate& b) {
              return lexLess(a.point, b.point);
            });
  return current;
}

}  // namespace smoteaudit
