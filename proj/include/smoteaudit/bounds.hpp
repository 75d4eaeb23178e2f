#pragma once

#include <string>
#include <vector>

#include "smoteaudit/types.hpp"

namespace smoteaudit {

enum class BoundKind { Approximate, Exact, Both };

// Inputs of the recall lower bounds: class counts, the SMOTE neighbor count,
// and the mutuality probability alpha (fraction of directed nearest-neighbor
// edges that are reciprocated). The approximate bound ignores alpha.
struct BoundInputs {
  Index n0 = 0;
  Index n1 = 0;
  Index k = 5;
  double alpha = 0.0;

  void validate() const;
};

struct BoundResult {
  double lambda = 0.0;
  double pEdge = 0.0;
  double bound = 0.0;
  BoundKind kind = BoundKind::Approximate;
};

// P[X >= 3] for X ~ Binomial(n, p). Large tails come from the complement of
// the three head terms; small tails are summed forward from the j = 3 term,
// so the result keeps full relative accuracy for n up to about 2e5 and p
// down to 1e-9, and stays exact for exactly representable inputs.
double binomTailGe3(Index n, double p);

// P[X >= 3] for X ~ Poisson(lambda), with a series branch below lambda = 0.7
// that avoids the cancellation in 1 - e^{-lambda}(1 + lambda + lambda^2/2).
double poissonTailGe3(double lambda);

// Poisson-approximation lower bound on expected reconstruction recall:
// lambda = (n0 - n1)/(n1 k), p_edge = P[Poisson(lambda) >= 3],
// bound = max(0, (k p_edge - 2)/(k - 2)).
BoundResult approxRecallBound(const BoundInputs& in);

// Exact mutuality-aware lower bound: with N = n0 - n1 and q = 1/(n1 k),
// p_edge(alpha) = (1-alpha) P[Binom(N, q) >= 3] + alpha P[Binom(N, 2q) >= 3],
// bound = max(0, (k p_edge(alpha) - 2)/(k - 2)).
BoundResult exactRecallBound(const BoundInputs& in);

// Cartesian sweep grid. Majority counts derive from the imbalance ratios:
// n0 = round(r * n1). Rows are emitted with n1 outermost, then k, then
// alpha, then r, so fixed-(n1,k,alpha) runs are contiguous and ordered by r.
struct SweepGrid {
  std::vector<double> ratios{5, 10, 20, 25, 50, 75, 100};
  std::vector<Index> ks{5};
  std::vector<double> alphas{0.5};
  std::vector<Index> n1s{100};
  BoundKind kind = BoundKind::Both;
};

struct SweepRow {
  Index n0 = 0;
  Index n1 = 0;
  Index k = 0;
  double alpha = 0.0;
  double ratio = 0.0;
  double lambda = 0.0;
  double pEdgeApprox = 0.0;
  double boundApprox = 0.0;
  double pEdgeExact = 0.0;
  double boundExact = 0.0;
};

// One row per grid cell, both bounds always evaluated.
std::vector<SweepRow> sweepBounds(const SweepGrid& grid);

// CSV for a sweep. Single-kind output uses the header
// n0,n1,k,alpha,lambda,p_edge,bound,kind with kind in {approx, exact}.
// BoundKind::Both uses n0,n1,k,alpha,lambda,p_edge_approx,bound_approx,
// p_edge_exact,bound_exact,bound_ratio where bound_ratio is the
// exact-over-approximate bound ratio (1 when both bounds are zero).
std::string sweepCsv(const std::vector<SweepRow>& rows, BoundKind kind);

}  // namespace smoteaudit
