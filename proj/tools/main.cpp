// Command-line harness for SMOTE oversampling, the geometric privacy
// attacks, recall bounds, and the baseline privacy evaluations.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smoteaudit/attacks.hpp"
#include "smoteaudit/baselines.hpp"
#include "smoteaudit/bounds.hpp"
#include "smoteaudit/dataset.hpp"
#include "smoteaudit/experiment.hpp"
#include "smoteaudit/knn.hpp"
#include "smoteaudit/rng.hpp"
#include "smoteaudit/smote.hpp"

namespace {

using nlohmann::json;
using namespace smoteaudit;

struct InputFlags {
  std::string csvPath;
  std::string fixtureToken;
  std::string labelColumn = "label";
  std::string minorityLabel = "1";
};

void addInputFlags(CLI::App* cmd, InputFlags& flags, bool allowFixture) {
  cmd->add_option("--input", flags.csvPath, "CSV input path");
  if (allowFixture) {
    cmd->add_option("--fixture", flags.fixtureToken,
                    "fixture token r:d:n1[:two][:outlier] instead of --input");
  }
  cmd->add_option("--label-column", flags.labelColumn,
                  "label column name (default: label)");
  cmd->add_option("--minority-label", flags.minorityLabel,
                  "label value marking the minority class (default: 1)");
}

LabeledDataset loadInput(const InputFlags& flags, std::uint64_t seed) {
  const bool haveCsv = !flags.csvPath.empty();
  const bool haveFixture = !flags.fixtureToken.empty();
  if (haveCsv == haveFixture) {
    throw std::invalid_argument("provide exactly one of --input or --fixture");
  }
  if (haveCsv) {
    return loadCsv(flags.csvPath, flags.labelColumn, flags.minorityLabel);
  }
  FixtureRequest request = parseFixtureToken(flags.fixtureToken);
  request.spec.seed = SplitRng::deriveSeed(seed, SplitRng::hashName(request.name));
  return makeFixture(request.spec);
}

struct LearnerFlags {
  std::string kind = "tree";
  LearnerConfig config;
};

void addLearnerFlags(CLI::App* cmd, LearnerFlags& flags) {
  cmd->add_option("--learner", flags.kind, "tree or logistic (default: tree)")
      ->check(CLI::IsMember({"tree", "logistic"}));
  cmd->add_option("--trees", flags.config.trees, "tree count (default: 50)");
  cmd->add_option("--depth", flags.config.maxDepth,
                  "maximum tree depth (default: 8)");
  cmd->add_option("--learning-rate", flags.config.learningRate,
                  "logistic learning rate (default: 0.1)");
  cmd->add_option("--epochs", flags.config.epochs,
                  "logistic epochs (default: 200)");
}

LearnerConfig resolveLearner(const LearnerFlags& flags) {
  LearnerConfig cfg = flags.config;
  cfg.kind = flags.kind == "logistic" ? LearnerKind::LinearLogistic
                                      : LearnerKind::TreeEnsemble;
  return cfg;
}

void emit(const json& output, const std::string& outPath) {
  if (outPath.empty()) {
    std::cout << output.dump(2) << '\n';
    return;
  }
  std::ofstream stream(outPath, std::ios::binary);
  if (!stream) {
    throw std::runtime_error("cannot write output file: " + outPath);
  }
  stream << output.dump(2) << '\n';
}

void emitText(const std::string& text, const std::string& outPath) {
  if (outPath.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream stream(outPath, std::ios::binary);
  if (!stream) {
    throw std::runtime_error("cannot write output file: " + outPath);
  }
  stream << text;
}

LabeledDataset makeSyntheticDataset(const LabeledDataset& like, Matrix features) {
  LabeledDataset syn;
  syn.labels = Eigen::VectorXi::Ones(features.rows());
  syn.features = std::move(features);
  syn.origin.assign(static_cast<size_t>(syn.features.rows()), Origin::Synthetic);
  syn.columnNames = like.columnNames;
  syn.labelName = like.labelName;
  return syn;
}

// The input's minority rows are the attacked point set; with origin flags the
// ground truth (real minority ids) is known and precision/recall is reported.
int runAttackDistinguish(const InputFlags& input, Index k, double ratio,
                         bool hullSeeds, std::uint64_t seed,
                         const std::string& outPath) {
  const LabeledDataset data = loadInput(input, seed);
  const DatasetStats stats = computeStats(data);

  IndexList truth;
  if (data.hasOrigin()) {
    for (Index i = 0; i < data.rows(); ++i) {
      if (data.labels[i] == 1 && data.origin[static_cast<size_t>(i)] == Origin::Real) {
        truth.push_back(i);
      }
    }
  }
  if (ratio <= 0.0) {
    if (!data.hasOrigin()) {
      throw std::invalid_argument(
          "--ratio is required when the input has no origin column");
    }
    if (truth.empty()) {
      throw std::invalid_argument(
          "cannot derive the imbalance ratio: no real minority rows");
    }
    ratio = static_cast<double>(stats.n0) / static_cast<double>(truth.size());
  }

  auto [scaled, params] = standardize(data);
  (void)params;
  AttackConfig attack;
  attack.k = k;
  attack.ratio = ratio;
  attack.seedMode = hullSeeds ? SeedMode::HullExtrema : SeedMode::AllPoints;
  const DistinguishResult result = distinSmoteOnDataset(scaled, attack);

  json output;
  output["attack"] = "distinguish";
  output["k"] = k;
  output["ratio"] = ratio;
  output["seed_mode"] = hullSeeds ? "hull_extrema" : "all_points";
  output["minority_rows"] = stats.n1;
  output["detected_real"] = result.detectedReal;
  output["pruned_synthetic_count"] = result.prunedSynthetic.size();
  output["degeneracy"] = {
      {"clean", result.degeneracy.clean()},
      {"duplicate_pairs", result.degeneracy.duplicatePairs.size()},
      {"collinear_triples", result.degeneracy.collinearTriples.size()},
      {"sampled_scan", result.degeneracy.sampledTripleScan}};
  if (data.hasOrigin()) {
    const MatchResult match = matchById(result.detectedReal, truth);
    output["precision"] = match.precision;
    output["recall"] = match.recall;
  }
  emit(output, outPath);
  return 0;
}

int runAttackReconstruct(const InputFlags& input, Index k, double ratio,
                         const std::string& truthPath, double matchTol,
                         std::uint64_t seed, const std::string& pointsOut,
                         const std::string& outPath) {
  const LabeledDataset data = loadInput(input, seed);
  const DatasetStats stats = computeStats(data);

  // Attack the released synthetic rows: with origin flags, the synthetic
  // minority; without them, every minority row.
  IndexList attacked;
  Index realMinority = 0;
  for (Index i = 0; i < data.rows(); ++i) {
    if (data.labels[i] != 1) continue;
    if (data.hasOrigin() && data.origin[static_cast<size_t>(i)] == Origin::Real) {
      ++realMinority;
      continue;
    }
    attacked.push_back(i);
  }
  if (attacked.empty()) {
    throw std::invalid_argument("no synthetic minority rows to attack");
  }
  if (ratio <= 0.0) {
    if (!data.hasOrigin() || realMinority == 0) {
      throw std::invalid_argument(
          "--ratio is required when the input has no real minority rows");
    }
    ratio = static_cast<double>(stats.n0) / static_cast<double>(realMinority);
  }

  const ScalingParams params = fitScaling(data.features);
  Matrix points(static_cast<Index>(attacked.size()), data.cols());
  for (Index i = 0; i < points.rows(); ++i) {
    points.row(i) = data.features.row(attacked[static_cast<size_t>(i)]);
  }
  points = params.apply(points);

  AttackConfig attack;
  attack.k = k;
  attack.ratio = ratio;
  const ReconstructionResult result = reconSmote(points, attack);

  Matrix accepted(static_cast<Index>(result.accepted.size()), data.cols());
  for (Index i = 0; i < accepted.rows(); ++i) {
    accepted.row(i) = result.accepted[static_cast<size_t>(i)].point.transpose();
  }

  json output;
  output["attack"] = "reconstruct";
  output["k"] = k;
  output["ratio"] = ratio;
  output["attacked_rows"] = attacked.size();
  output["lines"] = result.lines.size();
  output["candidates"] = result.candidates.size();
  output["accepted"] = result.accepted.size();

  if (!truthPath.empty()) {
    const LabeledDataset truth =
        loadCsv(truthPath, input.labelColumn, input.minorityLabel);
    const Matrix truthStd = params.apply(truth.minorityFeatures());
    const MatchResult match = matchByPosition(accepted, truthStd, matchTol);
    output["precision"] = match.precision;
    output["recall"] = match.recall;
    output["match_tol"] = matchTol;
  }

  if (!pointsOut.empty()) {
    const LabeledDataset reconstructed =
        makeSyntheticDataset(data, params.invert(accepted));
    saveCsv(reconstructed, pointsOut, /*withOrigin=*/false);
    output["points_csv"] = pointsOut;
  } else {
    json pts = json::array();
    const Matrix original = params.invert(accepted);
    for (Index i = 0; i < original.rows(); ++i) {
      json row = json::array();
      for (Index j = 0; j < original.cols(); ++j) row.push_back(original(i, j));
      pts.push_back(row);
    }
    output["points"] = pts;
  }
  emit(output, outPath);
  return 0;
}

std::vector<double> parseDoubleList(const std::string& text, const char* what) {
  std::vector<double> out;
  std::string piece;
  std::istringstream stream(text);
  while (std::getline(stream, piece, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("invalid ") + what + " value: '" +
                                  piece + "'");
    }
  }
  if (out.empty()) {
    throw std::invalid_argument(std::string(what) + " list is empty");
  }
  return out;
}

std::vector<Index> parseIndexList(const std::string& text, const char* what) {
  std::vector<Index> out;
  for (double v : parseDoubleList(text, what)) {
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "smoteaudit: SMOTE oversampling, geometric privacy attacks on its "
      "output, recall lower bounds, and baseline privacy metrics"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  std::string outPath;
  std::string configPath;
  int threads = 1;
  auto* seedOpt = app.add_option("--seed", seed, "master seed (default: 0)");
  auto* outOpt = app.add_option("--out", outPath, "output path or directory");
  auto* threadsOpt =
      app.add_option("--threads", threads, "worker threads (default: 1)");
  app.add_option("--config", configPath, "experiment config file");

  // generate
  auto* generate = app.add_subcommand(
      "generate", "run SMOTE and write the augmented (or synthetic-only) CSV");
  InputFlags generateInput;
  addInputFlags(generate, generateInput, true);
  Index generateK = 5;
  Index generateTarget = 0;
  bool syntheticOnly = false;
  generate->add_option("--k", generateK, "SMOTE neighbor count (default: 5)");
  generate->add_option("--target", generateTarget,
                       "synthetic row count (default: n0 - n1)");
  generate->add_flag("--synthetic-only", syntheticOnly,
                     "write only the synthetic rows");

  // attack distinguish / reconstruct
  auto* attack = app.add_subcommand("attack", "geometric privacy attacks");
  attack->require_subcommand(1);
  attack->fallthrough();
  auto* distinguish = attack->add_subcommand(
      "distinguish", "label minority rows of an augmented dataset as real or "
                     "synthetic");
  InputFlags distinguishInput;
  addInputFlags(distinguish, distinguishInput, false);
  Index distinguishK = 5;
  double distinguishRatio = 0.0;
  bool hullSeeds = false;
  distinguish->add_option("--k", distinguishK,
                          "SMOTE neighbor count assumed by the attack");
  distinguish->add_option("--ratio", distinguishRatio,
                          "imbalance ratio r (derived from origin if omitted)");
  distinguish->add_flag("--hull-seeds", hullSeeds,
                        "seed the scan from per-axis extreme points");

  auto* reconstruct = attack->add_subcommand(
      "reconstruct", "rebuild real minority rows from synthetic rows");
  InputFlags reconstructInput;
  addInputFlags(reconstruct, reconstructInput, false);
  Index reconstructK = 5;
  double reconstructRatio = 0.0;
  std::string truthPath;
  std::string pointsOut;
  double matchTol = 1e-6;
  reconstruct->add_option("--k", reconstructK,
                          "SMOTE neighbor count assumed by the attack");
  reconstruct->add_option("--ratio", reconstructRatio,
                          "imbalance ratio r (derived from origin if omitted)");
  reconstruct->add_option("--truth", truthPath,
                          "real dataset CSV for precision/recall");
  reconstruct->add_option("--points-out", pointsOut,
                          "write reconstructed points to this CSV");
  reconstruct->add_option("--match-tol", matchTol,
                          "position match tolerance, standardized space");

  // bounds
  auto* bounds = app.add_subcommand(
      "bounds", "recall lower bounds: single evaluation or sweep grids");
  Index boundsN0 = 0, boundsN1 = 0, boundsK = 5;
  double boundsAlpha = 0.0;
  std::string boundsKind = "both";
  bool sweep = false;
  std::string rGrid = "5,10,20,25,50,75,100";
  std::string kGrid = "5";
  std::string alphaGrid = "0.5";
  std::string n1Grid = "100";
  bounds->add_option("--n0", boundsN0, "majority count");
  bounds->add_option("--n1", boundsN1, "minority count");
  bounds->add_option("--k", boundsK, "SMOTE neighbor count (default: 5)");
  bounds->add_option("--alpha", boundsAlpha,
                     "mutuality probability (default: 0)");
  bounds->add_option("--kind", boundsKind, "approx, exact, or both")
      ->check(CLI::IsMember({"approx", "exact", "both"}));
  bounds->add_flag("--sweep", sweep, "emit a grid instead of one evaluation");
  bounds->add_option("--r-grid", rGrid, "imbalance ratios, comma-separated");
  bounds->add_option("--k-grid", kGrid, "neighbor counts, comma-separated");
  bounds->add_option("--alpha-grid", alphaGrid,
                     "mutuality values, comma-separated");
  bounds->add_option("--n1-grid", n1Grid, "minority counts, comma-separated");

  // baseline
  auto* baseline = app.add_subcommand("baseline", "weak privacy baselines");
  baseline->require_subcommand(1);
  baseline->fallthrough();
  auto* dcrCmd = baseline->add_subcommand(
      "dcr", "mean distance from synthetic rows to the closest real row");
  std::string synPath, realPath;
  std::string pairLabelColumn = "label";
  std::string pairMinorityLabel = "1";
  dcrCmd->add_option("--syn", synPath, "synthetic CSV")->required();
  dcrCmd->add_option("--real", realPath, "real CSV")->required();
  dcrCmd->add_option("--label-column", pairLabelColumn, "label column name");
  dcrCmd->add_option("--minority-label", pairMinorityLabel,
                     "minority label value");

  auto* linkCmd = baseline->add_subcommand(
      "linkability", "same-nearest-synthetic matching across feature splits");
  std::string linkSyn, linkReal;
  std::string linkLabelColumn = "label";
  std::string linkMinorityLabel = "1";
  int linkSplits = 5;
  linkCmd->add_option("--syn", linkSyn, "synthetic CSV")->required();
  linkCmd->add_option("--real", linkReal, "real CSV")->required();
  linkCmd->add_option("--splits", linkSplits,
                      "random feature bipartitions (default: 5)");
  linkCmd->add_option("--label-column", linkLabelColumn, "label column name");
  linkCmd->add_option("--minority-label", linkMinorityLabel,
                      "minority label value");

  auto* naiveCmd = baseline->add_subcommand(
      "distinguish",
      "classifier baseline for real-vs-synthetic on minority rows");
  InputFlags naiveInput;
  addInputFlags(naiveCmd, naiveInput, false);
  LearnerFlags naiveLearner;
  addLearnerFlags(naiveCmd, naiveLearner);

  // mia
  auto* mia = app.add_subcommand(
      "mia", "membership inference game against SMOTE output");
  InputFlags miaInput;
  addInputFlags(mia, miaInput, true);
  std::string miaMode = "features";
  Index miaTarget = -1;
  bool miaOutlier = false;
  Index miaTrainWorlds = 100;
  Index miaTestWorlds = 50;
  Index miaK = 5;
  int miaShuffles = 0;
  LearnerFlags miaLearner;
  mia->add_option("--mode", miaMode,
                  "features, augmented, or real (default: features)")
      ->check(CLI::IsMember({"features", "augmented", "real"}));
  mia->add_option("--target", miaTarget, "target row id (minority row)");
  mia->add_flag("--target-outlier", miaOutlier,
                "target the minority row farthest from the minority mean");
  mia->add_option("--worlds-train", miaTrainWorlds,
                  "train worlds per side (default: 100)");
  mia->add_option("--worlds-test", miaTestWorlds,
                  "test worlds per side (default: 50)");
  mia->add_option("--k", miaK, "SMOTE neighbor count (default: 5)");
  mia->add_option("--shuffled-control", miaShuffles,
                  "also run N label-shuffled control repetitions");
  addLearnerFlags(mia, miaLearner);

  // experiment
  auto* experiment = app.add_subcommand(
      "experiment", "run the (dataset x seed) grid from a config file");

  // validate
  auto* validate = app.add_subcommand(
      "validate", "report assumption checks for a dataset");
  InputFlags validateInput;
  addInputFlags(validate, validateInput, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      const LabeledDataset real = loadInput(generateInput, seed);
      auto [scaled, params] = standardize(real);
      SmoteConfig cfg;
      cfg.k = generateK;
      cfg.target = generateTarget;
      cfg.seed = SplitRng::deriveSeed(seed, 0x5E0);
      const SmoteResult result = smoteOversample(scaled, cfg);
      const LabeledDataset synthetic =
          makeSyntheticDataset(real, params.invert(result.synthetic.features));
      if (outPath.empty()) {
        throw std::invalid_argument("generate requires --out CSV path");
      }
      const LabeledDataset written =
          syntheticOnly ? synthetic : augment(real, synthetic);
      saveCsv(written, outPath, /*withOrigin=*/true);
      std::cout << "wrote " << written.rows() << " rows (" << synthetic.rows()
                << " synthetic) to " << outPath << '\n';
      return 0;
    }

    if (distinguish->parsed()) {
      return runAttackDistinguish(distinguishInput, distinguishK,
                                  distinguishRatio, hullSeeds, seed, outPath);
    }
    if (reconstruct->parsed()) {
      return runAttackReconstruct(reconstructInput, reconstructK,
                                  reconstructRatio, truthPath, matchTol, seed,
                                  pointsOut, outPath);
    }

    if (bounds->parsed()) {
      SweepGrid grid;
      if (sweep) {
        grid.ratios = parseDoubleList(rGrid, "r-grid");
        grid.ks = parseIndexList(kGrid, "k-grid");
        grid.alphas = parseDoubleList(alphaGrid, "alpha-grid");
        grid.n1s = parseIndexList(n1Grid, "n1-grid");
      } else {
        if (boundsN0 <= 0 || boundsN1 <= 0) {
          throw std::invalid_argument(
              "bounds needs --n0 and --n1 (or --sweep)");
        }
        grid.ratios = {static_cast<double>(boundsN0) /
                       static_cast<double>(boundsN1)};
        grid.ks = {boundsK};
        grid.alphas = {boundsAlpha};
        grid.n1s = {boundsN1};
      }
      const BoundKind kind = boundsKind == "approx" ? BoundKind::Approximate
                             : boundsKind == "exact" ? BoundKind::Exact
                                                     : BoundKind::Both;
      emitText(sweepCsv(sweepBounds(grid), kind), outPath);
      return 0;
    }

    if (dcrCmd->parsed()) {
      const LabeledDataset syn =
          loadCsv(synPath, pairLabelColumn, pairMinorityLabel);
      const LabeledDataset real =
          loadCsv(realPath, pairLabelColumn, pairMinorityLabel);
      json output;
      output["metric"] = "dcr";
      output["mean_distance"] = dcr(syn, real);
      output["synthetic_rows"] = syn.rows();
      output["real_rows"] = real.rows();
      emit(output, outPath);
      return 0;
    }

    if (linkCmd->parsed()) {
      const LabeledDataset syn =
          loadCsv(linkSyn, linkLabelColumn, linkMinorityLabel);
      const LabeledDataset real =
          loadCsv(linkReal, linkLabelColumn, linkMinorityLabel);
      json output;
      output["metric"] = "linkability";
      output["accuracy"] =
          linkabilityMeanOverSplits(syn, real, linkSplits, seed);
      output["splits"] = linkSplits;
      emit(output, outPath);
      return 0;
    }

    if (naiveCmd->parsed()) {
      const LabeledDataset aug = loadInput(naiveInput, seed);
      const NaiveDistinguishResult result =
          naiveDistinguish(aug, resolveLearner(naiveLearner), seed);
      json output;
      output["metric"] = "naive_distinguish";
      output["precision"] = result.precision;
      output["recall"] = result.recall;
      output["evaluated_rows"] = result.evaluated;
      output["predicted_real"] = result.predictedReal;
      emit(output, outPath);
      return 0;
    }

    if (mia->parsed()) {
      const LabeledDataset real = loadInput(miaInput, seed);
      MiaConfig cfg;
      cfg.targetRow = miaTarget;
      cfg.targetOutlier = miaOutlier;
      cfg.trainWorldsPerSide = miaTrainWorlds;
      cfg.testWorldsPerSide = miaTestWorlds;
      cfg.mode = miaMode == "features"    ? MiaMode::SyntheticFeatures
                 : miaMode == "augmented" ? MiaMode::AugmentedClassifier
                                          : MiaMode::RealClassifier;
      cfg.smote.k = miaK;
      cfg.learner = resolveLearner(miaLearner);
      cfg.seed = seed;
      const MiaResult result = miaGame(real, cfg);
      json output;
      output["metric"] = "mia_auc";
      output["mode"] = miaMode;
      output["auc"] = result.auc;
      output["target_row"] = result.targetRow;
      output["in_scores"] = result.inScores;
      output["out_scores"] = result.outScores;
      if (miaShuffles > 0) {
        output["shuffled_control_mean_auc"] =
            miaShuffledControlMean(real, cfg, miaShuffles);
        output["shuffled_control_repetitions"] = miaShuffles;
      }
      emit(output, outPath);
      return 0;
    }

    if (experiment->parsed()) {
      if (configPath.empty()) {
        throw std::invalid_argument("experiment requires --config FILE");
      }
      ExperimentConfig cfg = loadExperimentConfig(configPath);
      if (seedOpt->count() > 0) cfg.masterSeed = seed;
      if (outOpt->count() > 0) cfg.outDir = outPath;
      if (threadsOpt->count() > 0) cfg.threads = threads;
      const ExperimentOutcome outcome = runExperiment(cfg);
      std::cout << "report: " << cfg.outDir << "/report.csv ("
                << outcome.rows.size() << " rows)\n";
      if (!outcome.failedCells.empty()) {
        std::cerr << outcome.failedCells.size() << " cell(s) failed:\n";
        for (const std::string& cell : outcome.failedCells) {
          std::cerr << "  " << cell << '\n';
        }
        return 2;
      }
      return 0;
    }

    if (validate->parsed()) {
      const LabeledDataset data = loadInput(validateInput, seed);
      const AssumptionReport report =
          validateAssumptions(data, GeometryConfig{});
      json output;
      output["pass"] = report.pass();
      output["minority_rows"] = report.minorityCount;
      output["integer_only_columns"] = report.integerColumns;
      json dups = json::array();
      for (const auto& [a, b] : report.duplicateMinorityPairs) {
        dups.push_back({a, b});
      }
      output["duplicate_minority_pairs"] = dups;
      json triples = json::array();
      for (const auto& triple : report.collinearMinorityTriples) {
        triples.push_back({triple[0], triple[1], triple[2]});
      }
      output["collinear_minority_triples"] = triples;
      output["sampled_triple_scan"] = report.sampledTripleScan;
      for (const std::string& warning : data.warnings) {
        output["warnings"].push_back(warning);
      }
      emit(output, outPath);
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }

  std::cerr << "error: no subcommand handled\n";
  return 1;
}
