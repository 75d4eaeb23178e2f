#include "smoteaudit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "smoteaudit/attacks.hpp"
#include "smoteaudit/baselines.hpp"
#include "smoteaudit/bounds.hpp"
#include "smoteaudit/knn.hpp"
#include "smoteaudit/rng.hpp"
#include "smoteaudit/smote.hpp"

namespace smoteaudit {

namespace {

constexpr Index kExhaustiveMinority = 500;
constexpr Index kSampledTriples = 100000;
constexpr Index kMaxReportedTriples = 16;

double elapsedSeconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

std::string trimCopy(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> splitTrimmed(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::string piece;
  std::istringstream stream(s);
  while (std::getline(stream, piece, delim)) {
    out.push_back(trimCopy(piece));
  }
  if (!s.empty() && s.back() == delim) out.push_back("");
  return out;
}

double parseDouble(const std::string& key, const std::string& value) {
  double parsed = 0.0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto result = std::from_chars(begin, end, parsed);
  if (result.ec != std::errc{} || result.ptr != end) {
    throw std::invalid_argument("config: key '" + key +
                                "' needs a real number, got '" + value + "'");
  }
  return parsed;
}

std::uint64_t parseU64(const std::string& key, const std::string& value) {
  std::uint64_t parsed = 0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto result = std::from_chars(begin, end, parsed);
  if (result.ec != std::errc{} || result.ptr != end) {
    throw std::invalid_argument("config: key '" + key +
                                "' needs a nonnegative integer, got '" + value +
                                "'");
  }
  return parsed;
}

Index parseCount(const std::string& key, const std::string& value) {
  return static_cast<Index>(parseU64(key, value));
}

bool parseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") {
    return true;
  }
  if (value == "false" || value == "0" || value == "no" || value == "off") {
    return false;
  }
  throw std::invalid_argument("config: key '" + key +
                              "' needs a boolean, got '" + value + "'");
}

void appendCsvNumber(std::string& out, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  out += buf;
}

struct DatasetContext {
  std::string name;
  LabeledDataset data;
  DatasetStats stats;
  LabeledDataset standardized;
  LabeledDataset realMinorityStd;  // standardized minority rows only
  IndexList minorityIds;
  bool hasBounds = false;
  double alphaHat = 0.0;
  double aId = 0.0;
  double lId = 0.0;
};

struct CellResult {
  bool ok = false;
  std::string error;
  std::vector<std::pair<std::string, double>> metrics;
  Index syntheticRows = 0;
  Index reconLines = 0;
  Index reconAccepted = 0;
  double smoteSeconds = 0.0;
  double distinguishSeconds = 0.0;
  double reconstructSeconds = 0.0;
  double baselinesSeconds = 0.0;
  double totalSeconds = 0.0;
};

struct CellTask {
  const DatasetContext* ctx = nullptr;
  std::uint64_t seedValue = 0;
  std::uint64_t cellSeed = 0;
};

CellResult runCell(const CellTask& task, const ExperimentConfig& cfg) {
  CellResult out;
  const DatasetContext& ctx = *task.ctx;
  const auto cellStart = std::chrono::steady_clock::now();
  try {
    auto stageStart = std::chrono::steady_clock::now();
    SmoteConfig smote;
    smote.k = cfg.smoteK;
    smote.seed = task.cellSeed;
    const SmoteResult generated = smoteOversample(ctx.standardized, smote);
    const LabeledDataset aug = augment(ctx.standardized, generated.synthetic);
    out.syntheticRows = generated.synthetic.rows();
    out.smoteSeconds = elapsedSeconds(stageStart);

    AttackConfig attack;
    attack.k = cfg.smoteK;
    attack.ratio = ctx.stats.r;
    attack.geometry = cfg.geometry;

    if (cfg.runDistinguish) {
      stageStart = std::chrono::steady_clock::now();
      const DistinguishResult detected = distinSmoteOnDataset(aug, attack);
      const MatchResult match =
          matchById(detected.detectedReal, ctx.minorityIds);
      out.metrics.emplace_back("distinguish.precision", match.precision);
      out.metrics.emplace_back("distinguish.recall", match.recall);
      out.distinguishSeconds = elapsedSeconds(stageStart);
    }

    if (cfg.runReconstruct) {
      stageStart = std::chrono::steady_clock::now();
      const ReconstructionResult recon =
          reconSmote(generated.synthetic.features, attack);
      Matrix accepted(static_cast<Index>(recon.accepted.size()),
                      ctx.data.cols());
      for (Index i = 0; i < accepted.rows(); ++i) {
        accepted.row(i) = recon.accepted[static_cast<size_t>(i)].point.transpose();
      }
      const MatchResult match = matchByPosition(
          accepted, ctx.realMinorityStd.features, cfg.matchTol);
      out.metrics.emplace_back("reconstruct.precision", match.precision);
      out.metrics.emplace_back("reconstruct.recall", match.recall);
      out.reconLines = static_cast<Index>(recon.lines.size());
      out.reconAccepted = static_cast<Index>(recon.accepted.size());
      out.reconstructSeconds = elapsedSeconds(stageStart);
    }

    if (cfg.runBaselines) {
      stageStart = std::chrono::steady_clock::now();
      out.metrics.emplace_back(
          "dcr.mean_distance", dcr(generated.synthetic, ctx.realMinorityStd));
      out.metrics.emplace_back(
          "linkability.accuracy",
          linkabilityMeanOverSplits(
              generated.synthetic, ctx.realMinorityStd, 5,
              SplitRng::deriveSeed(task.cellSeed, 0x11FA)));
      const NaiveDistinguishResult naive = naiveDistinguish(
          aug, LearnerConfig{}, SplitRng::deriveSeed(task.cellSeed, 0xBA5E));
      out.metrics.emplace_back("naive_distinguish.precision", naive.precision);
      out.metrics.emplace_back("naive_distinguish.recall", naive.recall);
      out.baselinesSeconds = elapsedSeconds(stageStart);
    }
    out.ok = true;
  } catch (const std::exception& ex) {
    out.ok = false;
    out.error = ex.what();
  }
  out.totalSeconds = elapsedSeconds(cellStart);
  return out;
}

std::vector<std::pair<std::string, std::string>> metricOrder(
    const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> order;
  if (cfg.runDistinguish) {
    order.emplace_back("distinguish", "precision");
    order.emplace_back("distinguish", "recall");
  }
  if (cfg.runReconstruct) {
    order.emplace_back("reconstruct", "precision");
    order.emplace_back("reconstruct", "recall");
  }
  if (cfg.runBaselines) {
    order.emplace_back("dcr", "mean_distance");
    order.emplace_back("linkability", "accuracy");
    order.emplace_back("naive_distinguish", "precision");
    order.emplace_back("naive_distinguish", "recall");
  }
  return order;
}

double stageSeconds(const CellResult& cell, const std::string& method) {
  if (method == "distinguish") return cell.distinguishSeconds;
  if (method == "reconstruct") return cell.reconstructSeconds;
  return cell.baselinesSeconds;
}

}  // namespace

FixtureRequest parseFixtureToken(const std::string& token) {
  const std::vector<std::string> fields = splitTrimmed(token, ':');
  if (fields.size() < 3 || fields.size() > 5) {
    throw std::invalid_argument(
        "fixture tokens are r:d:n1 with optional ':two' and ':outlier', "
        "got '" +
        token + "'");
  }
  const double r = parseDouble("fixture r", fields[0]);
  FixtureSpec spec;
  spec.d = parseCount("fixture d", fields[1]);
  spec.n1 = parseCount("fixture n1", fields[2]);
  spec.n0 = static_cast<Index>(std::llround(r * static_cast<double>(spec.n1)));
  if (spec.n1 < 1 || spec.n0 <= spec.n1 || spec.d < 2) {
    throw std::invalid_argument("fixture token '" + token +
                                "' needs d >= 2 and n0 > n1 >= 1");
  }
  for (size_t f = 3; f < fields.size(); ++f) {
    if (fields[f] == "two") {
      spec.layout = ClusterLayout::TwoGaussian;
    } else if (fields[f] == "single") {
      spec.layout = ClusterLayout::SingleGaussian;
    } else if (fields[f] == "outlier") {
      spec.plantedOutlier = true;
    } else {
      throw std::invalid_argument("unknown fixture token flag '" + fields[f] +
                                  "'");
    }
  }
  return FixtureRequest{spec.name(), spec};
}

AssumptionReport validateAssumptions(const LabeledDataset& ds,
                                     const GeometryConfig& geometry) {
  geometry.validate();
  ds.validate();
  AssumptionReport report;

  for (Index j = 0; j < ds.cols(); ++j) {
    bool allInteger = ds.rows() > 0;
    for (Index i = 0; i < ds.rows() && allInteger; ++i) {
      allInteger = ds.features(i, j) == std::rint(ds.features(i, j));
    }
    if (allInteger) report.integerColumns.push_back(j);
  }

  const IndexList minority = ds.minorityRows();
  report.minorityCount = static_cast<Index>(minority.size());
  if (minority.size() < 2) return report;
  const Matrix raw = ds.minorityFeatures();

  std::vector<Index> order(minority.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    for (Index j = 0; j < raw.cols(); ++j) {
      if (raw(a, j) != raw(b, j)) return raw(a, j) < raw(b, j);
    }
    return a < b;
  });
  for (size_t t = 1; t < order.size(); ++t) {
    if (raw.row(order[t - 1]) == raw.row(order[t])) {
      const Index a = minority[static_cast<size_t>(order[t - 1])];
      const Index b = minority[static_cast<size_t>(order[t])];
      report.duplicateMinorityPairs.emplace_back(std::min(a, b),
                                                 std::max(a, b));
    }
  }
  std::sort(report.duplicateMinorityPairs.begin(),
            report.duplicateMinorityPairs.end());

  const Index n1 = raw.rows();
  if (n1 < 3) return report;
  const Matrix scaled = fitScaling(ds.features).apply(raw);
  auto record = [&](Index a, Index b, Index c) {
    if (static_cast<Index>(report.collinearMinorityTriples.size()) <
        kMaxReportedTriples) {
      report.collinearMinorityTriples.push_back(
          {minority[static_cast<size_t>(a)], minority[static_cast<size_t>(b)],
           minority[static_cast<size_t>(c)]});
    }
  };
  if (n1 <= kExhaustiveMinority) {
    for (Index a = 0; a + 2 < n1; ++a) {
      for (Index b = a + 1; b + 1 < n1; ++b) {
        for (Index c = b + 1; c < n1; ++c) {
          if (collinear(scaled.row(a), scaled.row(b), scaled.row(c),
                        geometry)) {
            record(a, b, c);
          }
        }
      }
    }
  } else {
    report.sampledTripleScan = true;
    SplitRng rng(0xA55E55ED);
    for (Index t = 0; t < kSampledTriples; ++t) {
      const Index a = static_cast<Index>(rng.uniformIndex(n1));
      Index b = static_cast<Index>(rng.uniformIndex(n1 - 1));
      if (b >= a) ++b;
      Index c = static_cast<Index>(rng.uniformIndex(n1 - 2));
      if (c >= std::min(a, b)) ++c;
      if (c >= std::max(a, b)) ++c;
      if (collinear(scaled.row(a), scaled.row(b), scaled.row(c), geometry)) {
        record(a, b, c);
      }
    }
  }
  return report;
}

void ExperimentConfig::validate() const {
  geometry.validate();
  if (smoteK < 1) {
    throw std::invalid_argument("ExperimentConfig: smote.k must be positive");
  }
  if (!(matchTol > 0.0)) {
    throw std::invalid_argument("ExperimentConfig: match_tol must be positive");
  }
  if (threads < 1) {
    throw std::invalid_argument("ExperimentConfig: threads must be positive");
  }
  if (seedValues.empty()) {
    throw std::invalid_argument("ExperimentConfig: at least one seed");
  }
  std::set<std::uint64_t> uniqueSeeds(seedValues.begin(), seedValues.end());
  if (uniqueSeeds.size() != seedValues.size()) {
    throw std::invalid_argument("ExperimentConfig: seed values must be unique");
  }
  if (fixtures.empty() && csvs.empty()) {
    throw std::invalid_argument("ExperimentConfig: at least one dataset");
  }
  std::set<std::string> names;
  for (const FixtureRequest& f : fixtures) names.insert(f.name);
  for (const CsvRequest& c : csvs) names.insert(c.name);
  if (names.size() != fixtures.size() + csvs.size()) {
    throw std::invalid_argument("ExperimentConfig: dataset names must be unique");
  }
  if (outDir.empty()) {
    throw std::invalid_argument("ExperimentConfig: output directory required");
  }
}

ExperimentConfig parseExperimentConfig(const std::string& text) {
  ExperimentConfig cfg;
  bool seedsSet = false;
  std::istringstream stream(text);
  std::string line;
  int lineNumber = 0;
  while (std::getline(stream, line)) {
    ++lineNumber;
    const std::string stripped = trimCopy(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineNumber) +
                                  ": expected key = value");
    }
    const std::string key = trimCopy(stripped.substr(0, eq));
    const std::string value = trimCopy(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config line " + std::to_string(lineNumber) +
                                  ": empty key or value");
    }

    if (key == "master_seed") {
      cfg.masterSeed = parseU64(key, value);
    } else if (key == "seeds") {
      const Index count = parseCount(key, value);
      if (count < 1) {
        throw std::invalid_argument("config: seeds must be at least 1");
      }
      cfg.seedValues.clear();
      for (Index s = 0; s < count; ++s) {
        cfg.seedValues.push_back(static_cast<std::uint64_t>(s));
      }
      seedsSet = true;
    } else if (key == "seed_list") {
      cfg.seedValues.clear();
      for (const std::string& piece : splitTrimmed(value, ',')) {
        cfg.seedValues.push_back(parseU64(key, piece));
      }
      seedsSet = true;
    } else if (key == "smote.k") {
      cfg.smoteK = parseCount(key, value);
    } else if (key == "match_tol") {
      cfg.matchTol = parseDouble(key, value);
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(parseCount(key, value));
    } else if (key == "out") {
      cfg.outDir = value;
    } else if (key == "run.distinguish") {
      cfg.runDistinguish = parseBool(key, value);
    } else if (key == "run.reconstruct") {
      cfg.runReconstruct = parseBool(key, value);
    } else if (key == "run.baselines") {
      cfg.runBaselines = parseBool(key, value);
    } else if (key == "run.bounds_overlay") {
      cfg.boundsOverlay = parseBool(key, value);
    } else if (key == "geometry.collinear_tol") {
      cfg.geometry.collinearTol = parseDouble(key, value);
    } else if (key == "geometry.intersect_tol") {
      cfg.geometry.intersectTol = parseDouble(key, value);
    } else if (key == "geometry.merge_radius") {
      cfg.geometry.mergeRadius = parseDouble(key, value);
    } else if (key == "geometry.parallel_tol") {
      cfg.geometry.parallelTol = parseDouble(key, value);
    } else if (key == "fixture.grid") {
      for (const std::string& entry : splitTrimmed(value, ',')) {
        cfg.fixtures.push_back(parseFixtureToken(entry));
      }
    } else if (key == "csv") {
      const std::vector<std::string> fields = splitTrimmed(value, ':');
      if (fields.size() != 4) {
        throw std::invalid_argument(
            "config: csv entries are name:path:label_column:minority_label");
      }
      cfg.csvs.push_back(CsvRequest{fields[0], fields[1], fields[2], fields[3]});
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineNumber) +
                                  ": unknown key '" + key + "'");
    }
  }
  if (!seedsSet) cfg.seedValues = {0};
  cfg.validate();
  return cfg;
}

ExperimentConfig loadExperimentConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parseExperimentConfig(buffer.str());
}

std::string reportCsv(const std::vector<ReportRow>& rows) {
  std::string out = "dataset,r,method,metric,mean,std,seeds,a_id,l_id,alpha_hat\n";
  for (const ReportRow& row : rows) {
    out += row.dataset;
    out += ',';
    appendCsvNumber(out, row.r);
    out += ',';
    out += row.method;
    out += ',';
    out += row.metric;
    out += ',';
    appendCsvNumber(out, row.mean);
    out += ',';
    appendCsvNumber(out, row.stddev);
    out += ',';
    out += std::to_string(row.seeds);
    out += ',';
    if (row.hasBounds) {
      appendCsvNumber(out, row.aId);
      out += ',';
      appendCsvNumber(out, row.lId);
      out += ',';
      appendCsvNumber(out, row.alphaHat);
    } else {
      out += ",,";
    }
    out += '\n';
  }
  return out;
}

ExperimentOutcome runExperiment(const ExperimentConfig& cfg) {
  cfg.validate();

  std::vector<DatasetContext> contexts;
  contexts.reserve(cfg.fixtures.size() + cfg.csvs.size());
  for (const FixtureRequest& request : cfg.fixtures) {
    DatasetContext ctx;
    ctx.name = request.name;
    FixtureSpec spec = request.spec;
    spec.seed = SplitRng::deriveSeed(cfg.masterSeed,
                                     SplitRng::hashName(request.name));
    ctx.data = makeFixture(spec);
    contexts.push_back(std::move(ctx));
  }
  for (const CsvRequest& request : cfg.csvs) {
    DatasetContext ctx;
    ctx.name = request.name;
    ctx.data = loadCsv(request.path, request.labelColumn, request.minorityLabel);
    contexts.push_back(std::move(ctx));
  }

  for (DatasetContext& ctx : contexts) {
    ctx.stats = computeStats(ctx.data);
    auto [scaled, params] = standardize(ctx.data);
    (void)params;
    ctx.standardized = std::move(scaled);
    ctx.minorityIds = ctx.data.minorityRows();
    ctx.realMinorityStd.features = ctx.standardized.minorityFeatures();
    ctx.realMinorityStd.labels =
        Eigen::VectorXi::Ones(ctx.realMinorityStd.features.rows());
    ctx.realMinorityStd.columnNames = ctx.data.columnNames;
    ctx.realMinorityStd.labelName = ctx.data.labelName;
    if (cfg.boundsOverlay && cfg.runReconstruct) {
      try {
        const KnnGraph graph =
            buildKnnGraph(ctx.realMinorityStd.features, cfg.smoteK);
        ctx.alphaHat = mutualityFraction(graph);
        const BoundInputs inputs{ctx.stats.n0, ctx.stats.n1, cfg.smoteK,
                                 ctx.alphaHat};
        ctx.aId = approxRecallBound(inputs).bound;
        ctx.lId = exactRecallBound(inputs).bound;
        ctx.hasBounds = true;
      } catch (const std::exception&) {
        ctx.hasBounds = false;
      }
    }
  }

  std::vector<CellTask> tasks;
  tasks.reserve(contexts.size() * cfg.seedValues.size());
  for (const DatasetContext& ctx : contexts) {
    const std::uint64_t datasetSeed =
        SplitRng::deriveSeed(cfg.masterSeed, SplitRng::hashName(ctx.name));
    for (std::uint64_t seedValue : cfg.seedValues) {
      tasks.push_back(
          CellTask{&ctx, seedValue, SplitRng::deriveSeed(datasetSeed, seedValue)});
    }
  }

  std::vector<CellResult> results(tasks.size());
  const int workers = std::max(
      1, std::min<int>(cfg.threads, static_cast<int>(tasks.size())));
  if (workers == 1) {
    for (size_t t = 0; t < tasks.size(); ++t) {
      results[t] = runCell(tasks[t], cfg);
    }
  } else {
    std::atomic<size_t> nextTask{0};
    auto work = [&]() {
      while (true) {
        const size_t t = nextTask.fetch_add(1);
        if (t >= tasks.size()) break;
        results[t] = runCell(tasks[t], cfg);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& worker : pool) worker.join();
  }

  ExperimentOutcome outcome;
  for (size_t t = 0; t < tasks.size(); ++t) {
    if (!results[t].ok) {
      outcome.failedCells.push_back(tasks[t].ctx->name + " seed=" +
                                    std::to_string(tasks[t].seedValue) + ": " +
                                    results[t].error);
    }
  }

  const auto order = metricOrder(cfg);
  size_t taskBase = 0;
  for (const DatasetContext& ctx : contexts) {
    const size_t cellCount = cfg.seedValues.size();
    for (const auto& [method, metric] : order) {
      const std::string key = method + "." + metric;
      std::vector<double> values;
      double seconds = 0.0;
      for (size_t c = 0; c < cellCount; ++c) {
        const CellResult& cell = results[taskBase + c];
        if (!cell.ok) continue;
        for (const auto& [name, value] : cell.metrics) {
          if (name == key) {
            values.push_back(value);
            break;
          }
        }
        seconds += stageSeconds(cell, method);
      }
      if (values.empty()) continue;
      ReportRow row;
      row.dataset = ctx.name;
      row.r = ctx.stats.r;
      row.method = method;
      row.metric = metric;
      row.seeds = static_cast<Index>(values.size());
      const double mean =
          std::accumulate(values.begin(), values.end(), 0.0) /
          static_cast<double>(values.size());
      row.mean = mean;
      if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        row.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
      }
      if (method == "reconstruct" && ctx.hasBounds) {
        row.hasBounds = true;
        row.aId = ctx.aId;
        row.lId = ctx.lId;
        row.alphaHat = ctx.alphaHat;
      }
      row.wallSeconds = seconds;
      outcome.rows.push_back(std::move(row));
    }
    taskBase += cellCount;
  }

  outcome.reportCsvText = reportCsv(outcome.rows);

  namespace fs = std::filesystem;
  const fs::path outRoot(cfg.outDir);
  fs::create_directories(outRoot / "runs");
  {
    std::ofstream report(outRoot / "report.csv", std::ios::binary);
    if (!report) {
      throw std::runtime_error("cannot write report.csv under " + cfg.outDir);
    }
    report << outcome.reportCsvText;
  }

  for (size_t t = 0; t < tasks.size(); ++t) {
    const CellTask& task = tasks[t];
    const CellResult& cell = results[t];
    nlohmann::json j;
    j["dataset"] = task.ctx->name;
    j["seed"] = task.seedValue;
    j["cell_seed"] = task.cellSeed;
    j["ok"] = cell.ok;
    if (!cell.ok) j["error"] = cell.error;
    j["counts"] = {{"n0", task.ctx->stats.n0},
                   {"n1", task.ctx->stats.n1},
                   {"d", task.ctx->stats.d},
                   {"synthetic", cell.syntheticRows}};
    nlohmann::json metrics = nlohmann::json::object();
    for (const auto& [name, value] : cell.metrics) metrics[name] = value;
    j["metrics"] = metrics;
    if (cfg.runReconstruct && cell.ok) {
      j["reconstruct_detail"] = {{"lines", cell.reconLines},
                                 {"accepted", cell.reconAccepted}};
    }
    j["timings_s"] = {{"smote", cell.smoteSeconds},
                      {"distinguish", cell.distinguishSeconds},
                      {"reconstruct", cell.reconstructSeconds},
                      {"baselines", cell.baselinesSeconds},
                      {"total", cell.totalSeconds}};
    const fs::path file =
        outRoot / "runs" /
        (task.ctx->name + "_seed" + std::to_string(task.seedValue) + ".json");
    std::ofstream stream(file, std::ios::binary);
    if (!stream) {
      throw std::runtime_error("cannot write run artifact: " + file.string());
    }
    stream << j.dump(2) << '\n';
  }

  return outcome;
}

}  // namespace smoteaudit
