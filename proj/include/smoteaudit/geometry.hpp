#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "smoteaudit/types.hpp"

namespace smoteaudit {

// Tolerance ladder for the geometric predicates, expressed for data on a
// standardized scale. mergeRadius must dominate intersectTol so that every
// surviving intersection can be absorbed by a merge cell.
struct GeometryConfig {
  double collinearTol = 1e-9;   // relative orthogonal residual
  double intersectTol = 1e-7;   // closest-approach gap, relative to anchors
  double mergeRadius = 1e-6;    // candidate clustering radius
  double parallelTol = 1e-12;   // |cos angle| > 1 - parallelTol means parallel

  void validate() const {
    if (!(collinearTol > 0) || !(intersectTol > 0) || !(mergeRadius > 0) ||
        !(parallelTol > 0)) {
      throw std::invalid_argument("GeometryConfig: tolerances must be positive");
    }
    if (mergeRadius < intersectTol) {
      throw std::invalid_argument(
          "GeometryConfig: mergeRadius must be at least intersectTol");
    }
  }
};

namespace detail {

// Orthogonal residual of p against the line through a and b. Computed with
// the unnormalized span vector so that exactly representable configurations
// stay exact.
template <typename VecA, typename VecB, typename VecP>
double lineResidual(const VecA& a, const VecB& b, const VecP& p) {
  const auto w = (b - a).eval();
  const double ww = w.squaredNorm();
  if (ww == 0.0) return (p - a).norm();
  const auto v = (p - a).eval();
  const double t = v.dot(w) / ww;
  return (v - t * w).norm();
}

}  // namespace detail

// Scale-invariant collinearity test: the orthogonal residual of the point
// opposite the longest side, measured against the line through the other
// two, must not exceed collinearTol times the largest pairwise distance.
// Symmetric in its arguments; coincident triples count as collinear.
template <typename DA, typename DB, typename DC>
bool collinear(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
               const Eigen::MatrixBase<DC>& c, const GeometryConfig& cfg) {
  using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1>;
  const Vec pa = a.derived().template cast<double>().reshaped();
  const Vec pb = b.derived().template cast<double>().reshaped();
  const Vec pc = c.derived().template cast<double>().reshaped();

  const double dab = (pa - pb).norm();
  const double dac = (pa - pc).norm();
  const double dbc = (pb - pc).norm();
  const double dmax = std::max({dab, dac, dbc});
  if (dmax == 0.0) return true;

  double residual = std::numeric_limits<double>::infinity();
  if (dab == dmax) {
    residual = std::min(residual, detail::lineResidual(pa, pb, pc));
  }
  if (dac == dmax) {
    residual = std::min(residual, detail::lineResidual(pa, pc, pb));
  }
  if (dbc == dmax) {
    residual = std::min(residual, detail::lineResidual(pb, pc, pa));
  }
  return residual <= cfg.collinearTol * dmax;
}

// Index (0, 1, or 2) of the point whose projection onto the direction of the
// longest side is the median. For a collinear triple this is the point
// between the other two. Ties are broken by argument position.
template <typename DA, typename DB, typename DC>
int middleOfThree(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
                  const Eigen::MatrixBase<DC>& c) {
  using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1>;
  const Vec p[3] = {a.derived().template cast<double>().reshaped(),
                    b.derived().template cast<double>().reshaped(),
                    c.derived().template cast<double>().reshaped()};

  const double dab = (p[0] - p[1]).norm();
  const double dac = (p[0] - p[2]).norm();
  const double dbc = (p[1] - p[2]).norm();
  const double dmax = std::max({dab, dac, dbc});

  int base = 0, tip = 1;
  if (dac == dmax && dab != dmax) {
    base = 0;
    tip = 2;
  } else if (dbc == dmax && dab != dmax && dac != dmax) {
    base = 1;
    tip = 2;
  }
  const Vec w = p[tip] - p[base];

  double t[3];
  for (int i = 0; i < 3; ++i) t[i] = (p[i] - p[base]).dot(w);
  int order[3] = {0, 1, 2};
  std::sort(order, order + 3, [&](int x, int y) {
    if (t[x] != t[y]) return t[x] < t[y];
    return x < y;
  });
  return order[1];
}

// A fitted line: unit direction with canonical sign, anchor at the member
// mean, and the ids of the member points, ascending.
struct Line {
  Vector anchor;
  Vector direction;
  IndexList members;
};

// Fits a line through the seed triple and absorbs every candidate whose
// residual against the seed line passes the collinearity test. The returned
// direction is recomputed from the two members with extreme projections.
Line growLine(const std::array<Index, 3>& seed, const IndexList& candidates,
              const Eigen::Ref<const Matrix>& points,
              const GeometryConfig& cfg);

// Closest-approach intersection of two lines. Returns the midpoint of the
// closest pair when the lines are not near-parallel and the gap is within
// intersectTol * (1 + min anchor norm); otherwise nothing.
std::optional<Vector> intersectLines(const Line& p, const Line& q,
                                     const GeometryConfig& cfg);

// A reconstruction candidate: a position plus the ids of the lines whose
// intersections produced it.
struct Candidate {
  Vector point;
  std::vector<int> supports;
};

// Single-linkage clustering at mergeRadius: candidates within the radius are
// merged into one (centroid position, union of supports) until all survivors
// are pairwise separated by more than the radius. The result is independent
// of input order.
std::vector<Candidate> mergeCandidates(const std::vector<Candidate>& candidates,
                                       const GeometryConfig& cfg);

}  // namespace smoteaudit
