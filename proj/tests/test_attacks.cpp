#include <doctest.h>

#include <algorithm>
#include <array>
#include <stdexcept>
#include <vector>

#include "smoteaudit/attacks.hpp"
#include "smoteaudit/dataset.hpp"
#include "smoteaudit/smote.hpp"

using namespace smoteaudit;

namespace {

LabeledDataset fixture(Index n0, Index n1, Index d, std::uint64_t seed) {
  FixtureSpec spec;
  spec.n0 = n0;
  spec.n1 = n1;
  spec.d = d;
  spec.seed = seed;
  return makeFixture(spec);
}

// A standardized dataset augmented with interpolation oversampling, plus the
// ids of the real minority rows inside the augmented dataset.
struct AugmentedCase {
  LabeledDataset aug;
  IndexList realMinorityIds;
  double ratio = 0.0;
};

AugmentedCase makeAugmentedCase(Index n0, Index n1, Index d,
                                std::uint64_t dataSeed, std::uint64_t smoteSeed) {
  const LabeledDataset real = fixture(n0, n1, d, dataSeed);
  auto [scaled, params] = standardize(real);
  SmoteConfig cfg;
  cfg.k = 5;
  cfg.seed = smoteSeed;
  const SmoteResult result = smoteOversample(scaled, cfg);

  AugmentedCase out;
  out.aug = augment(scaled, result.synthetic);
  for (Index i = 0; i < out.aug.rows(); ++i) {
    if (out.aug.labels(i) == 1 && out.aug.origin[static_cast<size_t>(i)] == Origin::Real) {
      out.realMinorityIds.push_back(i);
    }
  }
  out.ratio = static_cast<double>(n0) / static_cast<double>(n1);
  return out;
}

// Four tetrahedron vertices in 3-d plus three interior interpolation points
// per edge: every vertex lies on three detectable lines, and no two
// non-incident edge lines come close to intersecting.
struct Tetrahedron {
  Matrix points;    // 18 x 3 synthetic interpolation points
  Matrix vertices;  // 4 x 3 real endpoints
};

Tetrahedron makeTetrahedron() {
  Tetrahedron t;
  t.vertices.resize(4, 3);
  t.vertices << 0, 0, 0,
                1, 0, 0,
                0, 1, 0,
                0, 0, 1;
  const std::array<std::pair<int, int>, 6> edges{
      {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  const std::array<double, 3> weights{0.25, 0.5, 0.75};
  t.points.resize(18, 3);
  Index row = 0;
  for (const auto& [a, b] : edges) {
    for (double u : weights) {
      t.points.row(row++) =
          t.vertices.row(a) + u * (t.vertices.row(b) - t.vertices.row(a));
    }
  }
  return t;
}

}  // namespace

TEST_CASE("attack config computes the neighbor budget and validates") {
  AttackConfig cfg;
  cfg.k = 5;
  cfg.ratio = 12.0;
  CHECK(cfg.neighborBudget(600) == 120);  // ceil(2 * 5 * 12)
  CHECK(cfg.neighborBudget(50) == 49);    // capped at n - 1

  AttackConfig frac;
  frac.k = 3;
  frac.ratio = 2.3;
  CHECK(frac.neighborBudget(1000) == 14);  // ceil(13.8)

  AttackConfig badK;
  badK.k = 2;
  badK.ratio = 2.0;
  CHECK_THROWS_AS(badK.validate(), std::invalid_argument);
  AttackConfig badRatio;
  badRatio.k = 5;
  badRatio.ratio = 1.0;
  CHECK_THROWS_AS(badRatio.validate(), std::invalid_argument);
  AttackConfig ok;
  ok.k = 3;
  ok.ratio = 1.5;
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("distinguishing separates real from synthetic rows exactly") {
  const AugmentedCase c = makeAugmentedCase(600, 50, 4, 3, 31);
  AttackConfig cfg;
  cfg.k = 5;
  cfg.ratio = c.ratio;
  const DistinguishResult result = distinSmoteOnDataset(c.aug, cfg);

  const MatchResult match = matchById(result.detectedReal, c.realMinorityIds);
  CHECK(match.precision == 1.0);
  CHECK(match.recall == 1.0);

  // detectedReal and prunedSynthetic partition the minority rows, ascending.
  IndexList all = result.detectedReal;
  all.insert(all.end(), result.prunedSynthetic.begin(),
             result.prunedSynthetic.end());
  std::sort(all.begin(), all.end());
  CHECK(all == c.aug.minorityRows());
  CHECK(std::is_sorted(result.detectedReal.begin(), result.detectedReal.end()));
  CHECK(std::is_sorted(result.prunedSynthetic.begin(),
                       result.prunedSynthetic.end()));
  CHECK(result.degeneracy.clean());
}

TEST_CASE("distinguishing keeps everything when nothing is synthetic") {
  const LabeledDataset real = fixture(60, 20, 3, 5);
  auto [scaled, params] = standardize(real);
  AttackConfig cfg;
  cfg.k = 5;
  cfg.ratio = 3.0;
  const DistinguishResult result = distinSmoteOnDataset(scaled, cfg);
  CHECK(result.detectedReal == scaled.minorityRows());
  CHECK(result.prunedSynthetic.empty());
}

TEST_CASE("hull extrema seeding matches all-points seeding on clean data") {
  const AugmentedCase c = makeAugmentedCase(240, 20, 3, 11, 13);
  AttackConfig cfg;
  cfg.k = 5;
  cfg.ratio = c.ratio;
  const DistinguishResult allPoints = distinSmoteOnDataset(c.aug, cfg);
  cfg.seedMode = SeedMode::HullExtrema;
  const DistinguishResult extrema = distinSmoteOnDataset(c.aug, cfg);
  CHECK(allPoints.detectedReal == extrema.detectedReal);
  CHECK(allPoints.prunedSynthetic == extrema.prunedSynthetic);
}

TEST_CASE("duplicate rows are reported in the degeneracy summary") {
  // Hand-built dataset: 8 minority rows in general position except rows
  // 3 and 6 (ids within the minority subset) are identical, plus majority.
  LabeledDataset ds;
  ds.features.resize(12, 2);
  ds.features << 10, 10,   // majority
                 11, 10,
                 10, 11,
                 12, 11,
                 0.0, 0.0,     // minority block
                 1.0, 0.3,
                 0.2, 1.1,
                 1.4, 1.4,     // duplicate A
                 2.3, 0.6,
                 0.7, 2.2,
                 1.4, 1.4,     // duplicate B
                 2.9, 2.0;
  ds.labels.resize(12);
  ds.labels << 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1;

  AttackConfig cfg;
  cfg.k = 3;
  cfg.ratio = 1.5;
  const DistinguishResult result = distinSmoteOnDataset(ds, cfg);
  REQUIRE(result.degeneracy.duplicatePairs.size() == 1);
  CHECK(result.degeneracy.duplicatePairs[0] == std::pair<Index, Index>{7, 10});
  CHECK_FALSE(result.degeneracy.clean());
  // A coincident pair is collinear with everything, so exactly one copy is
  // pruned; which copy depends only on the deterministic scan order.
  REQUIRE(result.prunedSynthetic.size() == 1);
  const Index pruned = result.prunedSynthetic[0];
  CHECK((pruned == 7 || pruned == 10));
}

TEST_CASE("reconstruction recovers every tetrahedron vertex") {
  const Tetrahedron t = makeTetrahedron();
  AttackConfig cfg;
  cfg.k = 5;
  cfg.ratio = 2.0;
  const ReconstructionResult result = reconSmote(t.points, cfg);

  // Six edge lines, three interpolation points each.
  REQUIRE(result.lines.size() == 6);
  for (const Line& line : result.lines) CHECK(line.members.size() == 3);

  // Twelve incident line pairs meet at the four vertices; the three
  // non-incident pairs are skew and produce nothing.
  REQUIRE(result.candidates.size() == 4);
  REQUIRE(result.accepted.size() == 4);
  for (const Candidate& c : result.accepted) {
    CHECK(c.supports.size() == 3);
  }

  // Accepted candidates are a subset of the merged candidates.
  for (const Candidate& a : result.accepted) {
    bool found = false;
    for (const Candidate& c : result.candidates) {
      if (c.point.size() == a.point.size() && c.point == a.point &&
          c.supports == a.supports) {
        found = true;
        break;
      }
    }
    CHECK(found);
  }

  Matrix predicted(static_cast<Index>(result.accepted.size()), 3);
  for (size_t i = 0; i < result.accepted.size(); ++i) {
    predicted.row(static_cast<Index>(i)) = result.accepted[i].point.transpose();
  }
  const MatchResult match = matchByPosition(predicted, t.vertices, 1e-6);
  CHECK(match.precision == 1.0);
  CHECK(match.recall == 1.0);
}

TEST_CASE("reconstruction on oversampled data has perfect precision") {
  const LabeledDataset real = fixture(780, 30, 6, 5);
  auto [scaled, params] = standardize(real);
  SmoteConfig smoteCfg;
  smoteCfg.k = 5;
  smoteCfg.seed = 77;
  const SmoteResult smote = smoteOversample(scaled, smoteCfg);

  AttackConfig cfg;
  cfg.k = 5;
  cfg.ratio = 26.0;
  const ReconstructionResult result = reconSmote(smote.synthetic.features, cfg);
  REQUIRE(!result.accepted.empty());

  Matrix predicted(static_cast<Index>(result.accepted.size()),
                   scaled.features.cols());
  for (size_t i = 0; i < result.accepted.size(); ++i) {
    predicted.row(static_cast<Index>(i)) = result.accepted[i].point.transpose();
  }
  const Matrix truth = scaled.minorityFeatures();
  const MatchResult match = matchByPosition(predicted, truth, 1e-6);
  CHECK(match.precision == 1.0);
  CHECK(match.recall >= 0.5);
  for (const Candidate& c : result.accepted) CHECK(c.supports.size() >= 3);
}

TEST_CASE("reconstruction returns nothing without collinear structure") {
  const LabeledDataset real = fixture(90, 30, 3, 21);
  auto [scaled, params] = standardize(real);
  AttackConfig cfg;
  cfg.k = 5;
  cfg.ratio = 3.0;
  const ReconstructionResult result = reconSmote(scaled.minorityFeatures(), cfg);
  CHECK(result.lines.empty());
  CHECK(result.candidates.empty());
  CHECK(result.accepted.empty());

  Matrix tiny(2, 3);
  tiny << 0, 0, 0,
          1, 1, 1;
  const ReconstructionResult small = reconSmote(tiny, cfg);
  CHECK(small.lines.empty());
  CHECK(small.accepted.empty());
}

TEST_CASE("id matching scores set overlap") {
  const MatchResult match = matchById({1, 2, 3}, {2, 3, 4});
  CHECK(match.precision == doctest::Approx(2.0 / 3.0));
  CHECK(match.recall == doctest::Approx(2.0 / 3.0));
  CHECK(match.pairs.size() == 2);

  const MatchResult empty = matchById({}, {1, 2});
  CHECK(empty.precision == 0.0);
  CHECK(empty.recall == 0.0);

  const MatchResult perfect = matchById({4, 7}, {4, 7});
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
}

TEST_CASE("position matching is greedy one-to-one within tolerance") {
  {
    Matrix predicted(2, 2);
    predicted << 0, 1e-9,
                 9, 9;
    Matrix truth(2, 2);
    truth << 0, 0,
             5, 5;
    const MatchResult match = matchByPosition(predicted, truth, 1e-6);
    CHECK(match.precision == 0.5);
    CHECK(match.recall == 0.5);
    REQUIRE(match.pairs.size() == 1);
    CHECK(match.pairs[0] == std::pair<Index, Index>{0, 0});
  }
  {
    // Greedy by ascending distance: the closer prediction claims the only
    // truth point, the farther one goes unmatched.
    Matrix predicted(2, 1);
    predicted << 0.0,
                 0.9;
    Matrix truth(1, 1);
    truth << 1.0;
    const MatchResult match = matchByPosition(predicted, truth, 2.0);
    CHECK(match.precision == 0.5);
    CHECK(match.recall == 1.0);
    REQUIRE(match.pairs.size() == 1);
    CHECK(match.pairs[0] == std::pair<Index, Index>{1, 0});
  }
  {
    Matrix truth(1, 2);
    truth << 0, 0;
    const MatchResult match = matchByPosition(Matrix(0, 2), truth, 1.0);
    CHECK(match.precision == 0.0);
    CHECK(match.recall == 0.0);
  }
}
