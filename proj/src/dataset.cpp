#include "smoteaudit/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "smoteaudit/geometry.hpp"
#include "smoteaudit/rng.hpp"

namespace smoteaudit {

Index LabeledDataset::minorityCount() const {
  return (labels.array() == 1).count();
}

Index LabeledDataset::majorityCount() const {
  return (labels.array() == 0).count();
}

IndexList LabeledDataset::minorityRows() const {
  IndexList out;
  for (Index i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) out.push_back(i);
  }
  return out;
}

Matrix LabeledDataset::minorityFeatures() const {
  const IndexList rows = minorityRows();
  Matrix out(static_cast<Index>(rows.size()), features.cols());
  for (Index i = 0; i < static_cast<Index>(rows.size()); ++i) {
    out.row(i) = features.row(rows[i]);
  }
  return out;
}

void LabeledDataset::validate() const {
  if (labels.size() != features.rows()) {
    throw std::invalid_argument("dataset: label count does not match row count");
  }
  if (!origin.empty() && static_cast<Index>(origin.size()) != features.rows()) {
    throw std::invalid_argument("dataset: origin flag count does not match row count");
  }
  if (!features.allFinite()) {
    throw std::invalid_argument("dataset: features contain non-finite values");
  }
  for (Index i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw std::invalid_argument("dataset: labels must be 0 or 1");
    }
  }
  if (!columnNames.empty() &&
      static_cast<Index>(columnNames.size()) != features.cols()) {
    throw std::invalid_argument("dataset: column name count does not match");
  }
}

DatasetStats computeStats(const LabeledDataset& ds) {
  ds.validate();
  DatasetStats s;
  s.n = ds.rows();
  s.d = ds.cols();
  s.n1 = ds.minorityCount();
  s.n0 = ds.majorityCount();
  if (s.n1 == 0) {
    throw std::invalid_argument("dataset: minority class is empty");
  }
  s.r = s.n0 > 0 ? static_cast<double>(s.n0) / static_cast<double>(s.n1) : 0.0;
  return s;
}

Matrix ScalingParams::apply(const Matrix& x) const {
  return (x.rowwise() - shift.transpose()).array().rowwise() /
         scale.transpose().array();
}

Matrix ScalingParams::invert(const Matrix& x) const {
  return (x.array().rowwise() * scale.transpose().array()).matrix().rowwise() +
         shift.transpose();
}

ScalingParams fitScaling(const Matrix& features) {
  const Index n = features.rows();
  if (n == 0) throw std::invalid_argument("fitScaling: empty matrix");
  ScalingParams p;
  p.shift = features.colwise().mean();
  Matrix centered = features.rowwise() - p.shift.transpose();
  Vector variance =
      centered.array().square().colwise().sum() / static_cast<double>(n);
  p.scale = variance.array().sqrt();
  for (Index j = 0; j < p.scale.size(); ++j) {
    if (!(p.scale[j] > 0.0)) p.scale[j] = 1.0;
  }
  return p;
}

std::pair<LabeledDataset, ScalingParams> standardize(const LabeledDataset& ds) {
  ScalingParams p = fitScaling(ds.features);
  LabeledDataset out = ds;
  out.features = p.apply(ds.features);
  return {std::move(out), std::move(p)};
}

std::string FixtureSpec::name() const {
  std::ostringstream os;
  os << "fixture_r" << (n1 > 0 ? static_cast<double>(n0) / n1 : 0.0) << "_d"
     << d << "_n1_" << n1;
  os << (layout == ClusterLayout::TwoGaussian ? "_two" : "_single");
  if (plantedOutlier) os << "_outlier";
  return os.str();
}

namespace {

bool hasDuplicateRows(const Matrix& x) {
  std::vector<Index> order(x.rows());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (x(a, j) != x(b, j)) return x(a, j) < x(b, j);
    }
    return false;
  });
  for (size_t i = 1; i < order.size(); ++i) {
    if (x.row(order[i - 1]) == x.row(order[i])) return true;
  }
  return false;
}

bool hasCollinearTriple(const Matrix& x, const GeometryConfig& geo) {
  const Index n = x.rows();
  for (Index a = 0; a + 2 < n; ++a) {
    for (Index b = a + 1; b + 1 < n; ++b) {
      for (Index c = b + 1; c < n; ++c) {
        if (collinear(x.row(a), x.row(b), x.row(c), geo)) return true;
      }
    }
  }
  return false;
}

Matrix drawMinority(const FixtureSpec& spec, SplitRng& rng) {
  Matrix x(spec.n1, spec.d);
  const double offset = 6.0 / std::sqrt(static_cast<double>(spec.d));
  if (spec.layout == ClusterLayout::SingleGaussian) {
    for (Index i = 0; i < spec.n1; ++i) {
      for (Index j = 0; j < spec.d; ++j) x(i, j) = offset + rng.normal();
    }
  } else {
    const double half = 3.0 / std::sqrt(static_cast<double>(spec.d));
    const Index firstCluster = (spec.n1 + 1) / 2;
    for (Index i = 0; i < spec.n1; ++i) {
      const double center = offset + (i < firstCluster ? -half : half);
      for (Index j = 0; j < spec.d; ++j) x(i, j) = center + rng.normal();
    }
  }
  if (spec.plantedOutlier && spec.n1 > 0) {
    // Park the last minority row well outside its cluster, on the side
    // facing the majority mass at the origin. Oversampling then drags
    // synthetic minority points toward territory the classifier would
    // otherwise call majority, which is what makes the planted record's
    // membership observable.
    const Vector mean = x.colwise().mean();
    x.row(spec.n1 - 1) = (mean - 8.0 * mean.normalized()).transpose();
  }
  return x;
}

}  // namespace

LabeledDataset makeFixture(const FixtureSpec& spec) {
  if (spec.n1 < 2 || spec.n0 < 1 || spec.d < 2) {
    throw std::invalid_argument("makeFixture: need n1 >= 2, n0 >= 1, d >= 2");
  }
  const GeometryConfig geo;
  constexpr int kMaxRetries = 100;

  Matrix minority;
  bool ok = false;
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    SplitRng rng(SplitRng::deriveSeed(spec.seed, static_cast<std::uint64_t>(attempt)));
    minority = drawMinority(spec, rng);
    if (hasDuplicateRows(minority)) continue;
    if (spec.n1 <= 500 && hasCollinearTriple(minority, geo)) continue;
    ok = true;
    break;
  }
  if (!ok) {
    throw std::runtime_error(
        "makeFixture: could not draw a degeneracy-free minority sample");
  }

  SplitRng majRng(SplitRng::deriveSeed(spec.seed, 0x4D414A));
  Matrix majority(spec.n0, spec.d);
  for (Index i = 0; i < spec.n0; ++i) {
    for (Index j = 0; j < spec.d; ++j) majority(i, j) = majRng.normal();
  }

  LabeledDataset ds;
  ds.features.resize(spec.n0 + spec.n1, spec.d);
  ds.features.topRows(spec.n0) = majority;
  ds.features.bottomRows(spec.n1) = minority;
  ds.labels.resize(spec.n0 + spec.n1);
  ds.labels.head(spec.n0).setZero();
  ds.labels.tail(spec.n1).setOnes();
  ds.columnNames.reserve(spec.d);
  for (Index j = 0; j < spec.d; ++j) {
    ds.columnNames.push_back("x" + std::to_string(j));
  }
  ds.validate();
  return ds;
}

namespace {

std::vector<std::string> splitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

double parseCell(const std::string& cell, size_t row, const std::string& col) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw std::runtime_error("loadCsv: non-numeric cell at row " +
                             std::to_string(row) + ", column " + col);
  }
  return value;
}

}  // namespace

LabeledDataset loadCsv(const std::string& path, const std::string& labelColumn,
                       const std::string& minorityLabel) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("loadCsv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("loadCsv: empty file " + path);
  }
  const std::vector<std::string> header = splitCsvLine(line);

  Index labelIdx = -1;
  Index originIdx = -1;
  std::vector<Index> featureIdx;
  std::vector<std::string> featureNames;
  for (size_t j = 0; j < header.size(); ++j) {
    if (header[j] == labelColumn) {
      labelIdx = static_cast<Index>(j);
    } else if (header[j] == "origin") {
      originIdx = static_cast<Index>(j);
    } else {
      featureIdx.push_back(static_cast<Index>(j));
      featureNames.push_back(header[j]);
    }
  }
  if (labelIdx < 0) {
    throw std::runtime_error("loadCsv: label column '" + labelColumn +
                             "' not found in " + path);
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::vector<Origin> origins;
  size_t lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    const std::vector<std::string> cells = splitCsvLine(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("loadCsv: row " + std::to_string(lineNo) +
                               " has " + std::to_string(cells.size()) +
                               " cells, expected " +
                               std::to_string(header.size()));
    }
    std::vector<double> row;
    row.reserve(featureIdx.size());
    for (size_t f = 0; f < featureIdx.size(); ++f) {
      row.push_back(parseCell(cells[featureIdx[f]], lineNo, featureNames[f]));
    }
    rows.push_back(std::move(row));
    labels.push_back(cells[labelIdx] == minorityLabel ? 1 : 0);
    if (originIdx >= 0) {
      const std::string& o = cells[originIdx];
      if (o == "real") {
        origins.push_back(Origin::Real);
      } else if (o == "synthetic") {
        origins.push_back(Origin::Synthetic);
      } else {
        throw std::runtime_error("loadCsv: row " + std::to_string(lineNo) +
                                 " has unknown origin value '" + o + "'");
      }
    }
  }

  LabeledDataset ds;
  ds.features.resize(static_cast<Index>(rows.size()),
                     static_cast<Index>(featureIdx.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < rows[i].size(); ++j) {
      ds.features(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  ds.labels.resize(static_cast<Index>(labels.size()));
  for (size_t i = 0; i < labels.size(); ++i) {
    ds.labels[static_cast<Index>(i)] = labels[i];
  }
  ds.origin = std::move(origins);
  ds.columnNames = std::move(featureNames);
  ds.labelName = labelColumn;
  ds.validate();

  if (ds.minorityCount() == 0) {
    throw std::runtime_error("loadCsv: minority class is empty (no label cell equals '" +
                             minorityLabel + "')");
  }

  std::vector<Index> order(ds.rows());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    for (Index j = 0; j < ds.cols(); ++j) {
      if (ds.features(a, j) != ds.features(b, j)) {
        return ds.features(a, j) < ds.features(b, j);
      }
    }
    return ds.labels[a] < ds.labels[b];
  });
  Index duplicates = 0;
  for (size_t i = 1; i < order.size(); ++i) {
    if (ds.features.row(order[i - 1]) == ds.features.row(order[i]) &&
        ds.labels[order[i - 1]] == ds.labels[order[i]]) {
      ++duplicates;
    }
  }
  if (duplicates > 0) {
    ds.warnings.push_back("loadCsv: " + std::to_string(duplicates) +
                          " duplicate row(s) in " + path);
  }
  return ds;
}

void saveCsv(const LabeledDataset& ds, const std::string& path,
             bool withOrigin) {
  ds.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("saveCsv: cannot open " + path);

  const bool writeOrigin = withOrigin && ds.hasOrigin();
  for (Index j = 0; j < ds.cols(); ++j) {
    const std::string name = j < static_cast<Index>(ds.columnNames.size())
                                 ? ds.columnNames[j]
                                 : "x" + std::to_string(j);
    out << name << ',';
  }
  out << ds.labelName;
  if (writeOrigin) out << ",origin";
  out << '\n';

  char buf[64];
  for (Index i = 0; i < ds.rows(); ++i) {
    for (Index j = 0; j < ds.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.features(i, j));
      out << buf << ',';
    }
    out << ds.labels[i];
    if (writeOrigin) {
      out << (ds.origin[i] == Origin::Real ? ",real" : ",synthetic");
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("saveCsv: write failed for " + path);
}

}  // namespace smoteaudit
