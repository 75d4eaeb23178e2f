#include "smoteaudit/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace smoteaudit {

namespace {

double truncatedBound(Index k, double pEdge) {
  const double raw =
      (static_cast<double>(k) * pEdge - 2.0) / (static_cast<double>(k) - 2.0);
  return std::max(0.0, raw);
}

void appendField(std::string& out, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  out += buf;
}

void appendField(std::string& out, Index value) {
  out += std::to_string(value);
}

}  // namespace

void BoundInputs::validate() const {
  if (k < 3) {
    throw std::invalid_argument("BoundInputs: k must be at least 3");
  }
  if (n1 < 1 || n0 <= n1) {
    throw std::invalid_argument("BoundInputs: need n0 > n1 >= 1");
  }
  if (!(alpha >= 0.0) || !(alpha <= 1.0)) {
    throw std::invalid_argument("BoundInputs: alpha must lie in [0, 1]");
  }
}

double binomTailGe3(Index n, double p) {
  if (!(p >= 0.0) || !(p <= 1.0)) {
    throw std::invalid_argument("binomTailGe3: p must lie in [0, 1]");
  }
  if (n < 3 || p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;

  const double nd = static_cast<double>(n);
  const double q = 1.0 - p;

  // P(X = 0..2) by direct products; this is exact for exactly representable
  // inputs such as (n = 4, p = 0.5), where the result must be 0.3125 with no
  // rounding at all. If q^n underflows, the head is numerically 0 and the
  // complement branch below returns the correct 1.0.
  const double p0 = std::pow(q, nd);
  const double p1 = nd * p * std::pow(q, nd - 1.0);
  const double p2 = 0.5 * nd * (nd - 1.0) * p * p * std::pow(q, nd - 2.0);
  const double head = p0 + p1 + p2;
  if (head < 0.5) {
    return 1.0 - head;
  }

  // Small tail: sum forward from the j = 3 term with the term recurrence
  // term_{j+1} = term_j * ((n-j)/(j+1)) * (p/(1-p)) to avoid cancellation.
  // head >= 0.5 guarantees q^(n-3) is far from the underflow threshold.
  double term =
      (nd * (nd - 1.0) * (nd - 2.0) / 6.0) * p * p * p * std::pow(q, nd - 3.0);
  double sum = 0.0;
  const double oddsRatio = p / q;
  for (Index j = 3; j <= n; ++j) {
    sum += term;
    if (term <= sum * 1e-18) break;
    term *= (nd - static_cast<double>(j)) / (static_cast<double>(j) + 1.0) *
            oddsRatio;
  }
  return std::min(sum, 1.0);
}

double poissonTailGe3(double lambda) {
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("poissonTailGe3: lambda must be nonnegative");
  }
  if (lambda == 0.0) return 0.0;
  if (lambda > 700.0) return 1.0;
  if (lambda < 0.7) {
    // Forward series: e^{-lambda} sum_{j>=3} lambda^j / j!.
    double term = std::exp(-lambda) * lambda * lambda * lambda / 6.0;
    double sum = 0.0;
    for (int j = 3; j < 200; ++j) {
      sum += term;
      if (term <= sum * 1e-18) break;
      term *= lambda / (j + 1.0);
    }
    return sum;
  }
  return 1.0 - std::exp(-lambda) * (1.0 + lambda + lambda * lambda / 2.0);
}

BoundResult approxRecallBound(const BoundInputs& in) {
  in.validate();
  BoundResult out;
  out.kind = BoundKind::Approximate;
  out.lambda = static_cast<double>(in.n0 - in.n1) /
               (static_cast<double>(in.n1) * static_cast<double>(in.k));
  out.pEdge = poissonTailGe3(out.lambda);
  out.bound = truncatedBound(in.k, out.pEdge);
  return out;
}

BoundResult exactRecallBound(const BoundInputs& in) {
  in.validate();
  BoundResult out;
  out.kind = BoundKind::Exact;
  const Index trials = in.n0 - in.n1;
  const double q =
      1.0 / (static_cast<double>(in.n1) * static_cast<double>(in.k));
  out.lambda = static_cast<double>(trials) * q;
  out.pEdge = (1.0 - in.alpha) * binomTailGe3(trials, q) +
              in.alpha * binomTailGe3(trials, 2.0 * q);
  out.bound = truncatedBound(in.k, out.pEdge);
  return out;
}

std::vector<SweepRow> sweepBounds(const SweepGrid& grid) {
  if (grid.ratios.empty() || grid.ks.empty() || grid.alphas.empty() ||
      grid.n1s.empty()) {
    throw std::invalid_argument("sweepBounds: every grid axis needs values");
  }
  std::vector<SweepRow> rows;
  rows.reserve(grid.ratios.size() * grid.ks.size() * grid.alphas.size() *
               grid.n1s.size());
  for (Index n1 : grid.n1s) {
    for (Index k : grid.ks) {
      for (double alpha : grid.alphas) {
        for (double r : grid.ratios) {
          SweepRow row;
          row.n1 = n1;
          row.k = k;
          row.alpha = alpha;
          row.ratio = r;
          row.n0 = static_cast<Index>(std::llround(r * static_cast<double>(n1)));
          const BoundInputs in{row.n0, row.n1, row.k, row.alpha};
          const BoundResult approx = approxRecallBound(in);
          const BoundResult exact = exactRecallBound(in);
          row.lambda = approx.lambda;
          row.pEdgeApprox = approx.pEdge;
          row.boundApprox = approx.bound;
          row.pEdgeExact = exact.pEdge;
          row.boundExact = exact.bound;
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

std::string sweepCsv(const std::vector<SweepRow>& rows, BoundKind kind) {
  std::string out;
  if (kind == BoundKind::Both) {
    out =
        "n0,n1,k,alpha,lambda,p_edge_approx,bound_approx,p_edge_exact,"
        "bound_exact,bound_ratio\n";
  } else {
    out = "n0,n1,k,alpha,lambda,p_edge,bound,kind\n";
  }
  for (const SweepRow& row : rows) {
    appendField(out, row.n0);
    out += ',';
    appendField(out, row.n1);
    out += ',';
    appendField(out, row.k);
    out += ',';
    appendField(out, row.alpha);
    out += ',';
    appendField(out, row.lambda);
    out += ',';
    if (kind == BoundKind::Both) {
      appendField(out, row.pEdgeApprox);
      out += ',';
      appendField(out, row.boundApprox);
      out += ',';
      appendField(out, row.pEdgeExact);
      out += ',';
      appendField(out, row.boundExact);
      out += ',';
      double ratio;
      if (row.boundApprox > 0.0) {
        ratio = row.boundExact / row.boundApprox;
      } else if (row.boundExact == 0.0) {
        ratio = 1.0;
      } else {
        ratio = std::numeric_limits<double>::infinity();
      }
      appendField(out, ratio);
    } else if (kind == BoundKind::Approximate) {
      appendField(out, row.pEdgeApprox);
      out += ',';
      appendField(out, row.boundApprox);
      out += ",approx";
    } else {
      appendField(out, row.pEdgeExact);
      out += ',';
      appendField(out, row.boundExact);
      out += ",exact";
    }
    out += '\n';
  }
  return out;
}

}  // namespace smoteaudit
