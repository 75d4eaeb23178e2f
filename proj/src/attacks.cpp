#include "smoteaudit/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "smoteaudit/rng.hpp"

namespace smoteaudit {

namespace {

// Prefilter margins for the neighbor-pair scan. A triple that passes the
// residual test at tolerance eps either has nearly parallel directions from
// the query point (sin of the angle at most 4*eps / kLegRatioFloor) or one
// leg shorter than kLegRatioFloor of the other, so scanning pairs that
// satisfy one of the two conditions never drops a true triple. The cosine
// slack is sized 100x wider than that sine bound requires.
constexpr double kLegRatioFloor = 1e-3;
constexpr Index kScanTile = 512;

double prefilterSlack(const GeometryConfig& geo) {
  const double eps = geo.collinearTol;
  const double slack = 8.0e4 * eps * eps / (kLegRatioFloor * kLegRatioFloor);
  return std::clamp(slack, 1e-12, 2.0);
}

constexpr Index kExhaustiveTripleCap = 200;
constexpr Index kSampledTripleCount = 100000;
constexpr Index kMaxReportedViolations = 16;

// Invokes fn(x, y) for every neighbor-position pair (x < y) that might form
// a collinear triple with the query point. Directions are compared through
// a tiled Gram product so the quadratic pass stays cache- and SIMD-friendly.
template <typename Fn>
void scanCandidatePairs(const Eigen::Ref<const Matrix>& points, Index query,
                        const IndexList& nbrs, double parallelSlack, Fn&& fn) {
  const Index m = static_cast<Index>(nbrs.size());
  const Index d = points.cols();
  Matrix dirs(m, d);
  Vector norms(m);
  for (Index t = 0; t < m; ++t) {
    dirs.row(t) = points.row(nbrs[t]) - points.row(query);
    norms[t] = dirs.row(t).norm();
  }

  Matrix gram(std::min(m, kScanTile), std::min(m, kScanTile));
  for (Index a0 = 0; a0 < m; a0 += kScanTile) {
    const Index ta = std::min(kScanTile, m - a0);
    for (Index b0 = a0; b0 < m; b0 += kScanTile) {
      const Index tb = std::min(kScanTile, m - b0);
      gram.topLeftCorner(ta, tb).noalias() =
          dirs.middleRows(a0, ta) * dirs.middleRows(b0, tb).transpose();
      for (Index x = 0; x < ta; ++x) {
        const Index gx = a0 + x;
        const Index yStart = (b0 == a0) ? x + 1 : 0;
        for (Index y = yStart; y < tb; ++y) {
          const Index gy = b0 + y;
          const double lo = std::min(norms[gx], norms[gy]);
          const double hi = std::max(norms[gx], norms[gy]);
          if (std::abs(gram(x, y)) >= (1.0 - parallelSlack) * norms[gx] * norms[gy] ||
              lo <= kLegRatioFloor * hi) {
            fn(gx, gy);
          }
        }
      }
    }
  }
}

std::vector<std::pair<Index, Index>> findDuplicateRows(
    const Eigen::Ref<const Matrix>& points) {
  std::vector<Index> order(points.rows());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    for (Index j = 0; j < points.cols(); ++j) {
      if (points(a, j) != points(b, j)) return points(a, j) < points(b, j);
    }
    return a < b;
  });
  std::vector<std::pair<Index, Index>> dups;
  for (size_t t = 1; t < order.size(); ++t) {
    if (points.row(order[t - 1]) == points.row(order[t])) {
      dups.emplace_back(std::min(order[t - 1], order[t]),
                        std::max(order[t - 1], order[t]));
    }
  }
  std::sort(dups.begin(), dups.end());
  return dups;
}

// Post-hoc check of the no-three-collinear assumption on the surviving
// points: exhaustive for small sets, sampled above the cap.
void scanCollinearTriples(const Eigen::Ref<const Matrix>& points,
                          const IndexList& ids, const GeometryConfig& geo,
                          DegeneracyReport* report) {
  const Index n = static_cast<Index>(ids.size());
  if (n < 3) return;
  auto record = [&](Index a, Index b, Index c) {
    if (static_cast<Index>(report->collinearTriples.size()) <
        kMaxReportedViolations) {
      report->collinearTriples.push_back({ids[a], ids[b], ids[c]});
    }
  };
  if (n <= kExhaustiveTripleCap) {
    for (Index a = 0; a + 2 < n; ++a) {
      for (Index b = a + 1; b + 1 < n; ++b) {
        for (Index c = b + 1; c < n; ++c) {
          if (collinear(points.row(ids[a]), points.row(ids[b]),
                        points.row(ids[c]), geo)) {
            record(a, b, c);
          }
        }
      }
    }
  } else {
    report->sampledTripleScan = true;
    SplitRng rng(0x5EEDBA5E);
    for (Index t = 0; t < kSampledTripleCount; ++t) {
      const Index a = static_cast<Index>(rng.uniformIndex(n));
      Index b = static_cast<Index>(rng.uniformIndex(n - 1));
      if (b >= a) ++b;
      Index c = static_cast<Index>(rng.uniformIndex(n - 2));
      if (c >= std::min(a, b)) ++c;
      if (c >= std::max(a, b)) ++c;
      if (collinear(points.row(ids[a]), points.row(ids[b]), points.row(ids[c]),
                    geo)) {
        record(a, b, c);
      }
    }
  }
}

IndexList hullExtremaSeeds(const Eigen::Ref<const Matrix>& points,
                           const std::vector<char>& alive) {
  IndexList seeds;
  for (Index j = 0; j < points.cols(); ++j) {
    Index lo = -1;
    Index hi = -1;
    for (Index i = 0; i < points.rows(); ++i) {
      if (!alive[static_cast<size_t>(i)]) continue;
      if (lo < 0 || points(i, j) < points(lo, j)) lo = i;
      if (hi < 0 || points(i, j) > points(hi, j)) hi = i;
    }
    if (lo >= 0) seeds.push_back(lo);
    if (hi >= 0) seeds.push_back(hi);
  }
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  return seeds;
}

double pointToLineDistance(const Vector& p, const Line& line) {
  const Vector v = p - line.anchor;
  return (v - v.dot(line.direction) * line.direction).norm();
}

// Refits anchor and direction from the current members, keeping the
// direction aligned with the reference and then sign-canonicalized the same
// way growLine does.
void refitLine(Line& line, const Eigen::Ref<const Matrix>& points) {
  const Vector ref = line.direction;
  line.anchor = Vector::Zero(points.cols());
  for (Index id : line.members) line.anchor += points.row(id).transpose();
  line.anchor /= static_cast<double>(line.members.size());

  Index lo = line.members[0], hi = line.members[0];
  double tLo = std::numeric_limits<double>::infinity();
  double tHi = -std::numeric_limits<double>::infinity();
  for (Index id : line.members) {
    const double t = (points.row(id).transpose() - line.anchor).dot(ref);
    if (t < tLo) {
      tLo = t;
      lo = id;
    }
    if (t > tHi) {
      tHi = t;
      hi = id;
    }
  }
  Vector dir = (points.row(hi) - points.row(lo)).transpose();
  const double norm = dir.norm();
  if (norm > 0.0) {
    dir /= norm;
    Index best = 0;
    for (Index j = 1; j < dir.size(); ++j) {
      if (std::abs(dir[j]) > std::abs(dir[best])) best = j;
    }
    if (dir[best] < 0.0) dir = -dir;
    line.direction = dir;
  }
}

// Reunifies fragments of the same underlying line: equal direction up to
// parallelTol and anchors mutually within mergeRadius of the other line.
void mergeDuplicateLines(std::vector<Line>& lines,
                         const Eigen::Ref<const Matrix>& points,
                         const GeometryConfig& geo) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t a = 0; a < lines.size() && !changed; ++a) {
      for (size_t b = a + 1; b < lines.size() && !changed; ++b) {
        const double cosAngle =
            std::abs(lines[a].direction.dot(lines[b].direction));
        if (cosAngle < 1.0 - geo.parallelTol) continue;
        if (pointToLineDistance(lines[b].anchor, lines[a]) > geo.mergeRadius ||
            pointToLineDistance(lines[a].anchor, lines[b]) > geo.mergeRadius) {
          continue;
        }
        IndexList merged = lines[a].members;
        merged.insert(merged.end(), lines[b].members.begin(),
                      lines[b].members.end());
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        lines[a].members = std::move(merged);
        refitLine(lines[a], points);
        lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(b));
        changed = true;
      }
    }
  }
}

// Interval of member projections onto (anchor, direction).
struct LineExtent {
  double lo = 0.0;
  double hi = 0.0;
};

LineExtent memberExtent(const Line& line, const Eigen::Ref<const Matrix>& points) {
  LineExtent extent;
  extent.lo = std::numeric_limits<double>::infinity();
  extent.hi = -std::numeric_limits<double>::infinity();
  for (Index id : line.members) {
    const double t =
        (points.row(id).transpose() - line.anchor).dot(line.direction);
    extent.lo = std::min(extent.lo, t);
    extent.hi = std::max(extent.hi, t);
  }
  return extent;
}

// Point minimizing the sum of squared distances to the given lines; falls
// back to the seed when the normal system is degenerate.
Vector supportPoint(const std::vector<Line>& lines,
                    const std::vector<int>& ids, const Vector& seed) {
  const Index d = seed.size();
  Matrix normal = Matrix::Zero(d, d);
  Vector rhs = Vector::Zero(d);
  for (int id : ids) {
    const Line& line = lines[static_cast<size_t>(id)];
    normal.noalias() += Matrix::Identity(d, d) -
                        line.direction * line.direction.transpose();
    rhs.noalias() +=
        line.anchor - line.direction * line.direction.dot(line.anchor);
  }
  const Eigen::LDLT<Matrix> solver(normal);
  if (solver.info() != Eigen::Success) return seed;
  const Vector x = solver.solve(rhs);
  if (!x.allFinite()) return seed;
  return x;
}

// True when the line runs through x within the collinearity tolerance scaled
// by the line's own extent, and x projects strictly outside the member span
// (interpolation weights are strictly interior, so segment endpoints always
// lie beyond the extreme members).
bool lineSupportsPoint(const Line& line, const LineExtent& extent,
                       const Vector& x, double collinearTol) {
  const Vector rel = x - line.anchor;
  const double t = rel.dot(line.direction);
  const double tol = collinearTol * (1.0 + (extent.hi - extent.lo));
  if ((rel - t * line.direction).norm() > tol) return false;
  return t < extent.lo - tol || t > extent.hi + tol;
}

}  // namespace

Index AttackConfig::neighborBudget(Index pointCount) const {
  const double raw = std::ceil(2.0 * static_cast<double>(k) * ratio);
  const Index budget = static_cast<Index>(raw);
  return std::min(budget, pointCount - 1);
}

void AttackConfig::validate() const {
  if (k < 3) {
    throw std::invalid_argument("AttackConfig: k must be at least 3");
  }
  if (!(ratio > 1.0)) {
    throw std::invalid_argument("AttackConfig: imbalance ratio must exceed 1");
  }
  geometry.validate();
}

DistinguishResult distinSmote(const Eigen::Ref<const Matrix>& points,
                              const AttackConfig& cfg) {
  cfg.validate();
  const Index n = points.rows();
  if (n > 0 && points.cols() < 2) {
    throw std::invalid_argument("distinSmote: need at least 2 feature columns");
  }

  DistinguishResult result;
  if (n == 0) return result;

  result.degeneracy.duplicatePairs = findDuplicateRows(points);

  std::vector<char> inC1(static_cast<size_t>(n), 1);
  std::vector<char> visited(static_cast<size_t>(n), 0);
  const Index budget = cfg.neighborBudget(n);

  if (budget >= 2) {
    const double slack = prefilterSlack(cfg.geometry);
    const Vector sqNorms = points.rowwise().squaredNorm();
    Vector dist(n);
    IndexList pool;
    pool.reserve(static_cast<size_t>(n));

    // Budget-nearest points among the current candidates, excluding the
    // anchor. Restricting the query to candidates matters: once interior
    // synthetics are pruned, the same budget reaches far enough to pair a
    // segment's endpoints even when distance concentration (high d) packs
    // the raw neighborhood with synthetic clutter. Ties break on row id so
    // the scan order is deterministic.
    auto nearestCandidates = [&](Index anchor) {
      dist = sqNorms - 2.0 * (points * points.row(anchor).transpose());
      pool.clear();
      for (Index j = 0; j < n; ++j) {
        if (j != anchor && inC1[static_cast<size_t>(j)]) pool.push_back(j);
      }
      const auto take = std::min(static_cast<size_t>(budget), pool.size());
      std::partial_sort(pool.begin(),
                        pool.begin() + static_cast<std::ptrdiff_t>(take),
                        pool.end(), [&](Index a, Index b) {
                          return dist[a] < dist[b] ||
                                 (dist[a] == dist[b] && a < b);
                        });
      pool.resize(take);
      return pool;
    };

    // Each sweep visits every live candidate at most once; sweeps repeat
    // until one completes without a prune. The first sweep removes the bulk
    // of the synthetics, so later sweeps run over a set small enough that
    // the budget covers essentially all of it.
    std::deque<Index> queue;
    bool prunedAny = true;
    while (prunedAny) {
      prunedAny = false;
      std::fill(visited.begin(), visited.end(), 0);
      queue.clear();
      if (cfg.seedMode == SeedMode::AllPoints) {
        for (Index i = 0; i < n; ++i) {
          if (inC1[static_cast<size_t>(i)]) queue.push_back(i);
        }
      } else {
        for (Index i : hullExtremaSeeds(points, inC1)) queue.push_back(i);
      }

      while (!queue.empty()) {
        const Index i = queue.front();
        queue.pop_front();
        if (visited[i] || !inC1[i]) continue;
        visited[i] = 1;

        const IndexList nbrs = nearestCandidates(i);
        scanCandidatePairs(points, i, nbrs, slack, [&](Index x, Index y) {
          const Index j = nbrs[x];
          const Index l = nbrs[y];
          if (!collinear(points.row(i), points.row(j), points.row(l),
                         cfg.geometry)) {
            return;
          }
          const int middle = middleOfThree(points.row(i), points.row(j),
                                           points.row(l));
          const Index pruned = middle == 0 ? i : (middle == 1 ? j : l);
          if (!inC1[pruned]) return;
          inC1[pruned] = 0;
          visited[pruned] = 1;
          prunedAny = true;
          if (cfg.seedMode == SeedMode::HullExtrema) {
            for (Index nb : nearestCandidates(pruned)) {
              if (!visited[nb]) queue.push_back(nb);
            }
          }
          // With all-points seeding every live id is queued up front, so
          // the re-enqueue of the pruned point's neighborhood is a no-op.
        });
      }
    }
  }

  for (Index i = 0; i < n; ++i) {
    if (inC1[i]) {
      result.detectedReal.push_back(i);
    } else {
      result.prunedSynthetic.push_back(i);
    }
  }
  scanCollinearTriples(points, result.detectedReal, cfg.geometry,
                       &result.degeneracy);
  return result;
}

DistinguishResult distinSmoteOnDataset(const LabeledDataset& aug,
                                       const AttackConfig& cfg) {
  const IndexList minorityIds = aug.minorityRows();
  const Matrix minority = aug.minorityFeatures();
  DistinguishResult local = distinSmote(minority, cfg);

  DistinguishResult result;
  result.degeneracy = local.degeneracy;
  for (auto& [a, b] : result.degeneracy.duplicatePairs) {
    a = minorityIds[a];
    b = minorityIds[b];
  }
  for (auto& triple : result.degeneracy.collinearTriples) {
    for (auto& id : triple) id = minorityIds[id];
  }
  result.detectedReal.reserve(local.detectedReal.size());
  for (Index id : local.detectedReal) {
    result.detectedReal.push_back(minorityIds[id]);
  }
  result.prunedSynthetic.reserve(local.prunedSynthetic.size());
  for (Index id : local.prunedSynthetic) {
    result.prunedSynthetic.push_back(minorityIds[id]);
  }
  return result;
}

ReconstructionResult reconSmote(const Eigen::Ref<const Matrix>& points,
                                const AttackConfig& cfg) {
  cfg.validate();
  ReconstructionResult result;
  const Index n = points.rows();
  if (n < 3) return result;
  if (points.cols() < 2) {
    throw std::invalid_argument("reconSmote: need at least 2 feature columns");
  }
  const Index budget = cfg.neighborBudget(n);
  if (budget < 2) return result;

  const NeighborIndex index(Matrix(points), cfg.knnStrategy);
  const double slack = prefilterSlack(cfg.geometry);
  std::vector<char> visited(static_cast<size_t>(n), 0);
  std::vector<char> assigned(static_cast<size_t>(n), 0);

  for (Index i = 0; i < n; ++i) {
    if (visited[i]) continue;
    visited[i] = 1;

    const IndexList nbrs = index.kNearestOf(i, budget, true);
    scanCandidatePairs(points, i, nbrs, slack, [&](Index x, Index y) {
      const Index j = nbrs[x];
      const Index l = nbrs[y];
      // Points already on a line never seed again; fragments of a line the
      // budget split apart are reunified after the scan.
      if (assigned[j] || assigned[l]) return;
      if (!collinear(points.row(i), points.row(j), points.row(l),
                     cfg.geometry)) {
        return;
      }
      IndexList candidates;
      candidates.reserve(nbrs.size());
      for (Index nb : nbrs) {
        if (!assigned[nb] && nb != j && nb != l && nb != i) {
          candidates.push_back(nb);
        }
      }
      Line line = growLine({i, j, l}, candidates, points, cfg.geometry);
      for (Index id : line.members) {
        assigned[id] = 1;
        visited[id] = 1;
      }
      result.lines.push_back(std::move(line));
    });
  }

  mergeDuplicateLines(result.lines, points, cfg.geometry);

  std::vector<Candidate> raw;
  const int lineCount = static_cast<int>(result.lines.size());
  for (int a = 0; a < lineCount; ++a) {
    for (int b = a + 1; b < lineCount; ++b) {
      const auto hit =
          intersectLines(result.lines[a], result.lines[b], cfg.geometry);
      if (hit) {
        raw.push_back({*hit, {a, b}});
      }
    }
  }
  result.candidates = mergeCandidates(raw, cfg.geometry);

  // Acceptance: at least three of the merged support lines must genuinely
  // pass through the candidate. Interpolated points are strictly interior to
  // their segment, so a shared endpoint sits off every support line's member
  // span; a coincidental near-crossing of unrelated lines fails either the
  // residual or the off-span check. The reference point is re-estimated from
  // the support lines themselves (least squares), with inconsistent lines
  // trimmed and the fit repeated, because the merge centroid can be dragged
  // by ill-conditioned pairwise intersections.
  std::vector<LineExtent> extents;
  extents.reserve(result.lines.size());
  for (const Line& line : result.lines) {
    extents.push_back(memberExtent(line, points));
  }
  for (const Candidate& c : result.candidates) {
    if (c.supports.size() < 3) continue;
    std::vector<int> active = c.supports;
    while (active.size() >= 3) {
      const Vector x = supportPoint(result.lines, active, c.point);
      std::vector<int> verified;
      for (int id : active) {
        const size_t u = static_cast<size_t>(id);
        if (lineSupportsPoint(result.lines[u], extents[u], x,
                              cfg.geometry.collinearTol)) {
          verified.push_back(id);
        }
      }
      if (verified.size() == active.size()) break;
      active = std::move(verified);
    }
    if (active.size() >= 3) result.accepted.push_back(c);
  }
  return result;
}

MatchResult matchById(const IndexList& predicted, const IndexList& truth) {
  IndexList p = predicted, t = truth;
  std::sort(p.begin(), p.end());
  std::sort(t.begin(), t.end());
  IndexList common;
  std::set_intersection(p.begin(), p.end(), t.begin(), t.end(),
                        std::back_inserter(common));
  MatchResult r;
  for (Index id : common) r.pairs.emplace_back(id, id);
  r.precision = p.empty() ? 0.0
                          : static_cast<double>(common.size()) /
                                static_cast<double>(p.size());
  r.recall = t.empty() ? 0.0
                       : static_cast<double>(common.size()) /
                             static_cast<double>(t.size());
  return r;
}

MatchResult matchByPosition(const Eigen::Ref<const Matrix>& predicted,
                            const Eigen::Ref<const Matrix>& truth,
                            double matchTol) {
  if (predicted.rows() > 0 && truth.rows() > 0 &&
      predicted.cols() != truth.cols()) {
    throw std::invalid_argument("matchByPosition: dimension mismatch");
  }
  if (!(matchTol >= 0)) {
    throw std::invalid_argument("matchByPosition: negative tolerance");
  }

  struct Entry {
    double dist;
    Index p, t;
  };
  std::vector<Entry> within;
  for (Index p = 0; p < predicted.rows(); ++p) {
    for (Index t = 0; t < truth.rows(); ++t) {
      const double dist = (predicted.row(p) - truth.row(t)).norm();
      if (dist <= matchTol) within.push_back({dist, p, t});
    }
  }
  std::sort(within.begin(), within.end(), [](const Entry& a, const Entry& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.p != b.p) return a.p < b.p;
    return a.t < b.t;
  });

  std::vector<char> usedP(static_cast<size_t>(predicted.rows()), 0);
  std::vector<char> usedT(static_cast<size_t>(truth.rows()), 0);
  MatchResult r;
  for (const Entry& e : within) {
    if (usedP[e.p] || usedT[e.t]) continue;
    usedP[e.p] = 1;
    usedT[e.t] = 1;
    r.pairs.emplace_back(e.p, e.t);
  }
  const double matched = static_cast<double>(r.pairs.size());
  r.precision = predicted.rows() == 0
                    ? 0.0
                    : matched / static_cast<double>(predicted.rows());
  r.recall =
      truth.rows() == 0 ? 0.0 : matched / static_cast<double>(truth.rows());
  return r;
}

}  // namespace smoteaudit
