#include "smoteaudit/smote.hpp"

#include <algorithm>
#include <stdexcept>

#include "smoteaudit/rng.hpp"

namespace smoteaudit {

SmoteResult smoteOversample(const LabeledDataset& real, const SmoteConfig& cfg) {
  const DatasetStats stats = computeStats(real);
  if (cfg.k < 1) throw std::invalid_argument("smoteOversample: k must be positive");
  if (stats.n1 <= cfg.k) {
    throw std::invalid_argument(
        "smoteOversample: need more than k minority rows (k=" +
        std::to_string(cfg.k) + ", n1=" + std::to_string(stats.n1) + ")");
  }
  if (cfg.target < 0) {
    throw std::invalid_argument("smoteOversample: negative target");
  }
  const Index target = cfg.target > 0 ? cfg.target
                                      : std::max<Index>(stats.n0 - stats.n1, 0);

  const Matrix minority = real.minorityFeatures();
  const KnnGraph graph = buildKnnGraph(minority, cfg.k, cfg.knnStrategy);

  SmoteResult result;
  result.synthetic.features.resize(target, stats.d);
  result.synthetic.labels = Eigen::VectorXi::Ones(target);
  result.synthetic.origin.assign(static_cast<size_t>(target), Origin::Synthetic);
  result.synthetic.columnNames = real.columnNames;
  result.synthetic.labelName = real.labelName;
  result.provenance.reserve(static_cast<size_t>(target));

  SplitRng rng(cfg.seed);
  for (Index row = 0; row < target; ++row) {
    const Index i = static_cast<Index>(rng.uniformIndex(static_cast<std::uint64_t>(stats.n1)));
    const Index slot = static_cast<Index>(rng.uniformIndex(static_cast<std::uint64_t>(cfg.k)));
    const Index j = graph.neighbors[i][slot];
    const double u = rng.uniformOpen();
    result.synthetic.features.row(row) =
        minority.row(i) + u * (minority.row(j) - minority.row(i));
    result.provenance.push_back({i, j, u});
  }
  result.synthetic.validate();
  return result;
}

LabeledDataset augment(const LabeledDataset& real, const LabeledDataset& synthetic) {
  real.validate();
  if (synthetic.rows() == 0) return real;
  synthetic.validate();
  if (synthetic.cols() != real.cols()) {
    throw std::invalid_argument("augment: feature dimension mismatch");
  }

  LabeledDataset out;
  out.features.resize(real.rows() + synthetic.rows(), real.cols());
  out.features.topRows(real.rows()) = real.features;
  out.features.bottomRows(synthetic.rows()) = synthetic.features;
  out.labels.resize(real.rows() + synthetic.rows());
  out.labels.head(real.rows()) = real.labels;
  out.labels.tail(synthetic.rows()) = synthetic.labels;

  out.origin.reserve(static_cast<size_t>(out.rows()));
  for (Index i = 0; i < real.rows(); ++i) {
    out.origin.push_back(real.hasOrigin() ? real.origin[i] : Origin::Real);
  }
  for (Index i = 0; i < synthetic.rows(); ++i) {
    out.origin.push_back(synthetic.hasOrigin() ? synthetic.origin[i]
                                               : Origin::Synthetic);
  }
  out.columnNames = real.columnNames;
  out.labelName = real.labelName;
  out.validate();
  return out;
}

std::map<std::pair<Index, Index>, Index> segmentUsageCounts(
    const std::vector<ProvenanceRecord>& provenance) {
  std::map<std::pair<Index, Index>, Index> counts;
  for (const ProvenanceRecord& rec : provenance) {
    const auto key = std::minmax(rec.source, rec.neighbor);
    ++counts[{key.first, key.second}];
  }
  return counts;
}

}  // namespace smoteaudit
