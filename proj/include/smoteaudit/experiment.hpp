#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "smoteaudit/dataset.hpp"
#include "smoteaudit/geometry.hpp"

namespace smoteaudit {

// Report-only checks of the working assumptions behind the attacks: features
// should be real-valued (integer-only columns are flagged informationally),
// minority rows must be pairwise distinct, and no three minority rows may be
// collinear. The collinearity scan runs on standardized minority features,
// exhaustively for n1 <= 500 and on 1e5 sampled triples above that.
struct AssumptionReport {
  std::vector<Index> integerColumns;
  std::vector<std::pair<Index, Index>> duplicateMinorityPairs;
  std::vector<std::array<Index, 3>> collinearMinorityTriples;
  bool sampledTripleScan = false;
  Index minorityCount = 0;

  bool pass() const {
    return duplicateMinorityPairs.empty() && collinearMinorityTriples.empty();
  }
};

AssumptionReport validateAssumptions(const LabeledDataset& ds,
                                     const GeometryConfig& geometry);

// A dataset requested by name. Fixture seeds are derived from the master
// seed and the name when the experiment runs, so the seed field nested in
// the FixtureSpec is ignored here.
struct FixtureRequest {
  std::string name;
  FixtureSpec spec;
};

struct CsvRequest {
  std::string name;
  std::string path;
  std::string labelColumn;
  std::string minorityLabel;
};

// Parses a fixture token of the form r:d:n1 with optional ':two' (two-cluster
// minority layout) and ':outlier' (planted outlier) suffixes. The name comes
// from FixtureSpec::name().
FixtureRequest parseFixtureToken(const std::string& token);

struct ExperimentConfig {
  std::vector<FixtureRequest> fixtures;
  std::vector<CsvRequest> csvs;
  Index smoteK = 5;
  GeometryConfig geometry;
  double matchTol = 1e-6;  // reconstruction position matching, standardized
  std::vector<std::uint64_t> seedValues{0};
  std::uint64_t masterSeed = 0;
  bool runDistinguish = true;
  bool runReconstruct = true;
  bool runBaselines = false;
  bool boundsOverlay = true;
  int threads = 1;
  std::string outDir = "out";

  void validate() const;
};

// Flat key=value configuration. Lines are `key = value`; blank lines and
// lines starting with # are skipped; unknown keys are errors. Keys:
//   master_seed, seeds (count N -> values 0..N-1), seed_list (explicit,
//   comma-separated), smote.k, match_tol, threads, out,
//   run.distinguish, run.reconstruct, run.baselines, run.bounds_overlay,
//   geometry.collinear_tol, geometry.intersect_tol, geometry.merge_radius,
//   geometry.parallel_tol,
//   fixture.grid (comma-separated r:d:n1 entries, optional 4th field
//   `two` for the two-cluster layout and 5th field `outlier`),
//   csv (name:path:label_column:minority_label, repeatable).
ExperimentConfig parseExperimentConfig(const std::string& text);
ExperimentConfig loadExperimentConfig(const std::string& path);

struct ReportRow {
  std::string dataset;
  double r = 0.0;
  std::string method;
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;
  Index seeds = 0;
  // Filled on reconstruct rows when the bounds overlay is enabled.
  bool hasBounds = false;
  double aId = 0.0;
  double lId = 0.0;
  double alphaHat = 0.0;
  // Aggregated wall-clock time behind this row's cells; lives in the per-run
  // JSON artifacts and never in report.csv, which must be rerun-stable.
  double wallSeconds = 0.0;
};

struct ExperimentOutcome {
  std::vector<ReportRow> rows;
  std::vector<std::string> failedCells;  // "dataset seed=N: error"
  std::string reportCsvText;             // exact bytes written to report.csv
};

// Header: dataset,r,method,metric,mean,std,seeds,a_id,l_id,alpha_hat.
// Bounds columns are empty on rows without an overlay.
std::string reportCsv(const std::vector<ReportRow>& rows);

// Runs the (dataset x seed) grid: per cell, standardize, oversample with the
// cell-derived seed, run the enabled attacks and baselines, and evaluate
// against ground truth. Writes <out>/report.csv and <out>/runs/*.json.
// Failed cells are recorded and skipped in aggregation.
ExperimentOutcome runExperiment(const ExperimentConfig& cfg);

}  // namespace smoteaudit
