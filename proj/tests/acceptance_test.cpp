// Exit gate for the library: each numbered check prints one [PASS]/[FAIL]
// line and the process exits nonzero if any check fails. argv[1] must be the
// path to the command-line binary (used by the rerun-determinism check).

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "smoteaudit/attacks.hpp"
#include "smoteaudit/baselines.hpp"
#include "smoteaudit/bounds.hpp"
#include "smoteaudit/dataset.hpp"
#include "smoteaudit/experiment.hpp"
#include "smoteaudit/knn.hpp"
#include "smoteaudit/rng.hpp"
#include "smoteaudit/smote.hpp"

using namespace smoteaudit;
namespace fs = std::filesystem;

namespace {

double elapsedSeconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

// The default collinearity cut (1e-9) is sized for one audit of one dataset.
// This gate tests on the order of 1e8 near-random triples in dimension two,
// where the expected count of spuriously collinear triples at 1e-9 is near
// one, while genuine interpolation triples sit at machine precision
// (~1e-15). Tightening the cut to 1e-11 keeps the spurious rate negligible
// without touching true positives.
GeometryConfig gateGeometry() {
  GeometryConfig geo;
  geo.collinearTol = 1e-11;
  return geo;
}

constexpr double kMatchTol = 1e-6;
constexpr Index kAttackK = 5;

struct GridSpec {
  double r;
  Index d;
  Index n1;
};

// The benchmark grid: imbalance 9..130, dimension 2..21, minority 20 or 100.
const std::vector<GridSpec> kGrid = {
    {9, 2, 100},  {12, 21, 100}, {19, 8, 100}, {26, 21, 100},
    {42, 6, 100}, {130, 2, 20},  {9, 6, 20},   {26, 8, 20}};
constexpr int kGridSeeds = 25;

const std::vector<double> kSweepRatios = {5, 10, 20, 25, 50, 75, 100};
constexpr Index kSweepD = 8;
constexpr Index kSweepN1 = 50;
constexpr int kSweepSeeds = 15;

struct ConfigStats {
  std::string name;
  double r = 0.0;
  Index n0 = 0;
  Index n1 = 0;
  int seeds = 0;
  int distinguishPerfect = 0;   // seeds with precision == recall == 1.0
  int reconCleanSeeds = 0;      // seeds whose accepted points all matched
  Index acceptedTotal = 0;
  double reconRecallSum = 0.0;
  bool smoteContractOk = true;
  std::string smoteContractError;
  double alphaHat = 0.0;
  double aId = 0.0;
  double lId = 0.0;
  double distinguishSeconds = 0.0;

  double meanReconRecall() const {
    return seeds > 0 ? reconRecallSum / seeds : 0.0;
  }
};

// Runs one fixture config end to end: draw the fixture once, then per seed
// oversample, optionally run the separation attack, and always run the
// reconstruction attack against the standardized real minority rows.
ConfigStats runConfig(const GridSpec& grid, int seeds, bool withDistinguish) {
  ConfigStats stats;
  stats.r = grid.r;
  stats.n1 = grid.n1;
  stats.n0 = static_cast<Index>(
      std::llround(grid.r * static_cast<double>(grid.n1)));
  stats.seeds = seeds;

  FixtureSpec spec;
  spec.n0 = stats.n0;
  spec.n1 = grid.n1;
  spec.d = grid.d;
  stats.name = spec.name();
  spec.seed = SplitRng::deriveSeed(0xACCE5501u, SplitRng::hashName(stats.name));

  const LabeledDataset ds = makeFixture(spec);
  const auto [standardized, scaling] = standardize(ds);
  (void)scaling;
  const Matrix realMinority = standardized.minorityFeatures();
  const IndexList minorityIds = standardized.minorityRows();

  const KnnGraph graph = buildKnnGraph(realMinority, kAttackK);
  stats.alphaHat = mutualityFraction(graph);
  const BoundInputs inputs{stats.n0, stats.n1, kAttackK, stats.alphaHat};
  stats.aId = approxRecallBound(inputs).bound;
  stats.lId = exactRecallBound(inputs).bound;

  AttackConfig attack;
  attack.k = kAttackK;
  attack.ratio = grid.r;
  attack.geometry = gateGeometry();

  for (int s = 0; s < seeds; ++s) {
    SmoteConfig smote;
    smote.k = kAttackK;
    smote.seed = SplitRng::deriveSeed(spec.seed, 7777u + static_cast<std::uint64_t>(s));
    const SmoteResult generated = smoteOversample(standardized, smote);

    // Oversampler contract: row count, provenance fidelity, open weights.
    if (generated.synthetic.rows() != stats.n0 - stats.n1) {
      stats.smoteContractOk = false;
      stats.smoteContractError = stats.name + ": synthetic row count " +
                                 std::to_string(generated.synthetic.rows());
    }
    for (Index i = 0; i < generated.synthetic.rows(); ++i) {
      const ProvenanceRecord& rec =
          generated.provenance[static_cast<size_t>(i)];
      if (!(rec.weight > 0.0 && rec.weight < 1.0)) {
        stats.smoteContractOk = false;
        stats.smoteContractError = stats.name + ": weight out of (0,1)";
        break;
      }
      const Vector expected =
          realMinority.row(rec.source).transpose() +
          rec.weight * (realMinority.row(rec.neighbor).transpose() -
                        realMinority.row(rec.source).transpose());
      const Vector actual = generated.synthetic.features.row(i).transpose();
      if ((actual - expected).norm() > 1e-12 * (1.0 + actual.norm())) {
        stats.smoteContractOk = false;
        stats.smoteContractError = stats.name + ": provenance residual";
        break;
      }
    }

    const LabeledDataset aug = augment(standardized, generated.synthetic);

    if (withDistinguish) {
      const auto start = std::chrono::steady_clock::now();
      const DistinguishResult detected = distinSmoteOnDataset(aug, attack);
      stats.distinguishSeconds += elapsedSeconds(start);
      const MatchResult match = matchById(detected.detectedReal, minorityIds);
      if (match.precision == 1.0 && match.recall == 1.0) {
        ++stats.distinguishPerfect;
      }
    }

    const ReconstructionResult recon =
        reconSmote(generated.synthetic.features, attack);
    Matrix accepted(static_cast<Index>(recon.accepted.size()), grid.d);
    for (Index i = 0; i < accepted.rows(); ++i) {
      accepted.row(i) = recon.accepted[static_cast<size_t>(i)].point.transpose();
    }
    const MatchResult match = matchByPosition(accepted, realMinority, kMatchTol);
    stats.acceptedTotal += accepted.rows();
    if (accepted.rows() == 0 || match.precision == 1.0) {
      ++stats.reconCleanSeeds;
    }
    stats.reconRecallSum += match.recall;
  }
  return stats;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool report(int id, const std::string& label, bool pass,
            const std::string& detail) {
  std::printf("[%s] %d. %s%s%s\n", pass ? "PASS" : "FAIL", id, label.c_str(),
              detail.empty() ? "" : " — ", detail.c_str());
  std::fflush(stdout);
  return pass;
}

std::string fmt(const char* format, ...) {
  char buffer[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buffer, sizeof(buffer), format, args);
  va_end(args);
  return buffer;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cliPath = argc > 1 ? argv[1] : "";
  int failures = 0;
  const auto wallStart = std::chrono::steady_clock::now();

  auto runCheck = [&failures](int id, const std::string& label,
                              const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool pass = false;
    try {
      pass = body(detail);
    } catch (const std::exception& ex) {
      pass = false;
      detail = std::string("exception: ") + ex.what();
    }
    if (!report(id, label, pass, detail)) ++failures;
  };

  // Shared benchmark grid for checks 1, 2, 3, and 5.
  std::vector<ConfigStats> grid;
  try {
    for (const GridSpec& spec : kGrid) {
      grid.push_back(runConfig(spec, kGridSeeds, true));
    }
  } catch (const std::exception& ex) {
    std::printf("[FAIL] 0. benchmark grid did not run — exception: %s\n",
                ex.what());
    return 1;
  }

  runCheck(1, "separation attack labels every minority row correctly",
           [&](std::string& detail) {
             int perfect = 0, total = 0;
             double seconds = 0.0;
             std::string worst;
             for (const ConfigStats& c : grid) {
               perfect += c.distinguishPerfect;
               total += c.seeds;
               seconds += c.distinguishSeconds;
               if (c.distinguishPerfect != c.seeds && worst.empty()) {
                 worst = fmt("; first imperfect: %s (%d/%d)", c.name.c_str(),
                             c.distinguishPerfect, c.seeds);
               }
             }
             const bool exact = perfect == total;
             const bool fast = seconds < 180.0;
             detail = fmt("%d/%d seeds exact, %.1fs attack time%s", perfect,
                          total, seconds, worst.c_str());
             return exact && fast;
           });

  runCheck(2, "reconstruction attack returns only true minority points",
           [&](std::string& detail) {
             int clean = 0, total = 0;
             Index accepted = 0;
             std::string worst;
             for (const ConfigStats& c : grid) {
               clean += c.reconCleanSeeds;
               total += c.seeds;
               accepted += c.acceptedTotal;
               if (c.reconCleanSeeds != c.seeds && worst.empty()) {
                 worst = fmt("; first impure: %s", c.name.c_str());
               }
             }
             detail = fmt("%d/%d seeds clean at tolerance %.0e, %lld points%s",
                          clean, total, kMatchTol,
                          static_cast<long long>(accepted), worst.c_str());
             return clean == total;
           });

  runCheck(
      3, "reconstruction recall clears both lower bounds and rises with imbalance",
      [&](std::string& detail) {
        bool ok = true;
        std::string note;
        for (const ConfigStats& c : grid) {
          const double mean = c.meanReconRecall();
          if (mean < c.lId || mean < c.aId) {
            ok = false;
            note += fmt("; %s mean %.4f < bound (approx %.4f, exact %.4f)",
                        c.name.c_str(), mean, c.aId, c.lId);
          }
          if (c.r >= 20.0 && mean < 0.99) {
            ok = false;
            note += fmt("; %s mean %.4f < 0.99 at r=%g", c.name.c_str(), mean,
                        c.r);
          }
        }

        std::vector<double> sweepMeans;
        for (double r : kSweepRatios) {
          const ConfigStats c =
              runConfig({r, kSweepD, kSweepN1}, kSweepSeeds, false);
          sweepMeans.push_back(c.meanReconRecall());
        }
        int inversions = 0;
        double worstDip = 0.0;
        for (size_t i = 1; i < sweepMeans.size(); ++i) {
          const double dip = sweepMeans[i - 1] - sweepMeans[i];
          if (dip > 1e-12) {
            ++inversions;
            worstDip = std::max(worstDip, dip);
          }
        }
        if (inversions > 1 || worstDip > 0.02) {
          ok = false;
          note += fmt("; sweep not monotone (%d inversions, worst %.4f)",
                      inversions, worstDip);
        }
        std::string sweep = "sweep means";
        for (double m : sweepMeans) sweep += fmt(" %.3f", m);
        detail = sweep + note;
        return ok;
      });

  runCheck(4, "bound calculator reference values and limits", [&](std::string&
                                                                      detail) {
    bool ok = true;
    std::string note;

    const BoundInputs reference{2600, 100, 5, 0.0};
    const double approx = approxRecallBound(reference).bound;
    if (std::abs(approx - 0.79225) > 1e-4) {
      ok = false;
      note += fmt("; reference bound %.6f off 0.79225", approx);
    }

    if (binomTailGe3(4, 0.5) != 0.3125) {
      ok = false;
      note += fmt("; binomial tail(4, 0.5) = %.10f", binomTailGe3(4, 0.5));
    }

    for (Index n1 : {Index{20}, Index{100}}) {
      for (double r : {5.0, 10.0, 20.0, 25.0, 50.0, 75.0, 100.0}) {
        BoundInputs in;
        in.n1 = n1;
        in.n0 = static_cast<Index>(r * static_cast<double>(n1));
        in.k = 5;
        in.alpha = 0.0;
        const double a = approxRecallBound(in).bound;
        const double e = exactRecallBound(in).bound;
        if (a < 1e-12 && e < 1e-12) continue;
        if (std::abs(e - a) > 0.01 * std::max(e, a)) {
          ok = false;
          note += fmt("; approx/exact diverge at n1=%lld r=%g",
                      static_cast<long long>(n1), r);
        }
      }
    }

    double previous = -1.0;
    for (int step = 0; step <= 20; ++step) {
      BoundInputs in{2600, 100, 5, step / 20.0};
      const double bound = exactRecallBound(in).bound;
      if (bound < previous - 1e-12) {
        ok = false;
        note += fmt("; exact bound decreases at alpha=%.2f", in.alpha);
      }
      previous = bound;
    }
    detail = fmt("reference %.5f%s", approx, note.c_str());
    return ok;
  });

  runCheck(5, "oversampler contract: counts, provenance, segment uniformity",
           [&](std::string& detail) {
             bool ok = true;
             std::string note;
             for (const ConfigStats& c : grid) {
               if (!c.smoteContractOk) {
                 ok = false;
                 note += "; " + c.smoteContractError;
               }
             }

             FixtureSpec spec;
             spec.n0 = 60;
             spec.n1 = 20;
             spec.d = 4;
             spec.seed = 171717;
             const LabeledDataset ds = makeFixture(spec);
             SmoteConfig smote;
             smote.k = 5;
             smote.target = 100000;
             smote.seed = 0x5EED01;
             const SmoteResult generated = smoteOversample(ds, smote);
             std::map<std::pair<Index, Index>, Index> counts;
             for (const ProvenanceRecord& rec : generated.provenance) {
               ++counts[{rec.source, rec.neighbor}];
             }
             const double segments =
                 static_cast<double>(spec.n1) * static_cast<double>(smote.k);
             const double p = 1.0 / segments;
             const double expected = smote.target * p;
             const double sigma =
                 std::sqrt(smote.target * p * (1.0 - p));
             double maxDev = 0.0;
             if (counts.size() != static_cast<size_t>(segments)) {
               ok = false;
               note += fmt("; %zu of %.0f segments drawn", counts.size(),
                           segments);
             }
             for (const auto& [segment, count] : counts) {
               maxDev = std::max(
                   maxDev, std::abs(static_cast<double>(count) - expected));
             }
             if (maxDev > 3.0 * sigma) {
               ok = false;
               note += fmt("; worst segment deviates %.1f > 3 sigma = %.1f",
                           maxDev, 3.0 * sigma);
             }
             detail = fmt("grid contract held, worst segment dev %.1f (3s=%.1f)%s",
                          maxDev, 3.0 * sigma, note.c_str());
             return ok;
           });

  runCheck(6, "weak baselines underestimate the leakage", [&](std::string&
                                                                  detail) {
    bool ok = true;
    std::string note;

    // Classifier baseline on two oversampled fixtures.
    const GridSpec naiveSpecs[] = {{26, 8, 20}, {12, 21, 100}};
    std::string naiveNums;
    for (const GridSpec& g : naiveSpecs) {
      FixtureSpec spec;
      spec.n0 = static_cast<Index>(std::llround(g.r * static_cast<double>(g.n1)));
      spec.n1 = g.n1;
      spec.d = g.d;
      spec.seed = SplitRng::deriveSeed(0xBA5E01, SplitRng::hashName(spec.name()));
      const LabeledDataset ds = makeFixture(spec);
      const auto [standardized, params] = standardize(ds);
      (void)params;
      SmoteConfig smote;
      smote.k = 5;
      smote.seed = SplitRng::deriveSeed(spec.seed, 1);
      const SmoteResult generated = smoteOversample(standardized, smote);
      const LabeledDataset aug = augment(standardized, generated.synthetic);
      const NaiveDistinguishResult naive =
          naiveDistinguish(aug, LearnerConfig{}, SplitRng::deriveSeed(spec.seed, 2));
      naiveNums += fmt(" p=%.2f r=%.2f", naive.precision, naive.recall);
      if (naive.precision > 0.2 || naive.recall > 0.2) {
        ok = false;
        note += fmt("; classifier baseline too strong on %s", spec.name().c_str());
      }
    }

    // Linkability on independent synthetic data sits at the 1/|syn| chance
    // rate: with independent feature halves the two nearest-neighbor lookups
    // are independent uniform picks over the 8 synthetic rows.
    SplitRng rng(0x11AB01);
    const Index synRows = 8, realRows = 40, dim = 8;
    IndexList subsetA, subsetB;
    for (Index j = 0; j < dim / 2; ++j) subsetA.push_back(j);
    for (Index j = dim / 2; j < dim; ++j) subsetB.push_back(j);
    const int reps = 30;
    double successSum = 0.0;
    for (int repeat = 0; repeat < reps; ++repeat) {
      LabeledDataset syn, real;
      syn.features.resize(synRows, dim);
      real.features.resize(realRows, dim);
      for (Index i = 0; i < synRows; ++i)
        for (Index j = 0; j < dim; ++j) syn.features(i, j) = rng.normal();
      for (Index i = 0; i < realRows; ++i)
        for (Index j = 0; j < dim; ++j) real.features(i, j) = rng.normal();
      syn.labels = Eigen::VectorXi::Ones(synRows);
      real.labels = Eigen::VectorXi::Ones(realRows);
      successSum += linkability(syn, real, subsetA, subsetB);
    }
    const double linkMean = successSum / reps;
    const double chance = 1.0 / static_cast<double>(synRows);
    const double stderrMean =
        std::sqrt(chance * (1.0 - chance) /
                  static_cast<double>(reps * realRows));
    if (std::abs(linkMean - chance) > 3.0 * stderrMean) {
      ok = false;
      note += fmt("; linkability %.4f vs chance %.4f (3s=%.4f)", linkMean,
                  chance, 3.0 * stderrMean);
    }

    // Distance-to-closest-record collapses to zero on a verbatim copy.
    FixtureSpec dcrSpec;
    dcrSpec.n0 = 60;
    dcrSpec.n1 = 20;
    dcrSpec.d = 4;
    dcrSpec.seed = 9;
    const LabeledDataset dcrData = makeFixture(dcrSpec);
    if (dcr(dcrData, dcrData) != 0.0) {
      ok = false;
      note += "; copy-paste dcr is nonzero";
    }

    detail = fmt("naive%s, link %.4f (chance %.4f)%s", naiveNums.c_str(),
                 linkMean, chance, note.c_str());
    return ok;
  });

  runCheck(7, "membership inference behaviors", [&](std::string& detail) {
    bool ok = true;
    std::string note;

    FixtureSpec spec;
    spec.n0 = 600;
    spec.n1 = 20;
    spec.d = 6;
    spec.plantedOutlier = true;
    spec.seed = 0xF17AA;
    const LabeledDataset real = makeFixture(spec);

    MiaConfig shuffled;
    shuffled.targetOutlier = true;
    shuffled.trainWorldsPerSide = 50;
    shuffled.testWorldsPerSide = 25;
    shuffled.smote.k = 5;
    shuffled.seed = 0x517A01;
    const double control = miaShuffledControlMean(real, shuffled, 30);
    if (control < 0.35 || control > 0.65) {
      ok = false;
      note += fmt("; shuffled control %.3f outside [0.35, 0.65]", control);
    }

    MiaConfig features;
    features.targetOutlier = true;
    features.trainWorldsPerSide = 100;
    features.testWorldsPerSide = 50;
    features.smote.k = 5;
    features.seed = 0x517B02;
    const MiaResult outlierGame = miaGame(real, features);
    if (outlierGame.auc < 0.7) {
      ok = false;
      note += fmt("; outlier AUC %.3f < 0.7", outlierGame.auc);
    }

    double augSum = 0.0, realSum = 0.0;
    const int masters = 10;
    for (int m = 0; m < masters; ++m) {
      MiaConfig game;
      game.targetOutlier = true;
      game.trainWorldsPerSide = 10;  // unused by the classifier modes
      game.testWorldsPerSide = 15;
      game.smote.k = 5;
      // Deep, well-averaged ensembles: every in-world forest must carve out
      // the synthetic trail the oversampler lays toward the planted record,
      // or its score ties the out-worlds at zero and inverts a pair.
      game.learner.trees = 64;
      game.learner.maxDepth = 10;
      game.seed = SplitRng::deriveSeed(0x700AA, static_cast<std::uint64_t>(m));
      game.learner.seed = SplitRng::deriveSeed(game.seed, 1);
      game.mode = MiaMode::AugmentedClassifier;
      augSum += miaGame(real, game).auc;
      game.mode = MiaMode::RealClassifier;
      realSum += miaGame(real, game).auc;
    }
    const double augMean = augSum / masters;
    const double realMean = realSum / masters;
    if (augMean < realMean) {
      ok = false;
      note += fmt("; oversampling did not raise the signal (%.3f < %.3f)",
                  augMean, realMean);
    }

    detail = fmt("control %.3f, outlier AUC %.3f, augmented %.3f vs real %.3f%s",
                 control, outlierGame.auc, augMean, realMean, note.c_str());
    return ok;
  });

  runCheck(8, "experiment reruns are byte-identical", [&](std::string& detail) {
    if (cliPath.empty()) {
      detail = "missing command-line binary path (argv[1])";
      return false;
    }
    const fs::path cfgPath("acceptance_cli.cfg");
    const fs::path outDir("acceptance_cli_out");
    fs::remove_all(outDir);
    {
      std::ofstream cfg(cfgPath, std::ios::binary);
      cfg << "master_seed = 3\n"
             "seeds = 2\n"
             "smote.k = 5\n"
             "fixture.grid = 9:2:20, 26:3:20\n"
             "out = " << outDir.string() << "\n";
    }
    const std::string command =
        cliPath + " experiment --config " + cfgPath.string() + " > /dev/null";
    if (std::system(command.c_str()) != 0) {
      detail = "first run failed: " + command;
      return false;
    }
    const std::string first = slurp(outDir / "report.csv");
    if (first.empty()) {
      detail = "first run wrote no report.csv";
      return false;
    }
    if (std::system(command.c_str()) != 0) {
      detail = "second run failed";
      return false;
    }
    const std::string second = slurp(outDir / "report.csv");
    const bool identical = first == second;
    detail = fmt("%zu bytes, %s", first.size(),
                 identical ? "identical" : "DIFFER");
    return identical;
  });

  std::printf("%s: %d/8 checks passed in %.1fs\n",
              failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              8 - failures, elapsedSeconds(wallStart));
  return failures == 0 ? 0 : 1;
}
