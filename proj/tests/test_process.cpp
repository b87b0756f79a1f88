#include "mosaic/process.hpp"
#include "mosaic/stats.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace mosaic;

namespace {

ProcessSpec cross(double gamma) { return ProcessSpec(gamma, cross_measure(3)); }

ProcessSpec asymmetric() {
  return ProcessSpec(1.0, make_even({{Vec::Unit(3, 0), 0.6}, {Vec::Unit(3, 1), 0.2}, {Vec::Unit(3, 2), 0.2}}));
}

double extent(const Polytope& P, const Vec& u) { return support(P, u) + support(P, -u); }

}  // namespace

TEST(Stream, DistanceCountIsPoisson) {
  const auto spec = cross(2.0);
  const RandomStream base(1);
  std::vector<double> n;
  for (int i = 0; i < 4000; ++i) {
    RandomStream rng = base.substream(i);
    n.push_back(static_cast<double>(sample_hyperplanes(spec, 1.5, rng).size()));
  }
  const auto m = stats::mean_stderr(n);
  EXPECT_NEAR(m.mean, 2 * 2.0 * 1.5, 4 * m.stderr_);
}

TEST(Stream, SameSeedSameCell) {
  const auto spec = cross(3.0);
  RandomStream a(42), b(42);
  const auto P = zero_cell(spec, a), Q = zero_cell(spec, b);
  EXPECT_EQ(volume(P), volume(Q));
  EXPECT_EQ(a.counter(), b.counter());
}

TEST(Section, ParametersForCrossMeasure) {
  const auto sec = section_params(cross(3.0), Subspace::coordinate(3, {0, 1}));
  EXPECT_NEAR(sec.gamma_section, 2.0, 1e-14);  // 2 gamma / 3
  EXPECT_NEAR(sec.phi_section.total_mass(), 1.0, 1e-14);
  EXPECT_EQ(sec.phi_section.size(), 4u);
}

TEST(Section, HitCountMatchesIntensity) {
  const auto spec = asymmetric();
  RandomStream pick(2);
  for (int rep = 0; rep < 3; ++rep) {
    const auto L = random_subspace(3, 2, pick);
    const double expected = 2 * 2.0 * section_params(spec, L).gamma_section;
    const RandomStream base(10 + rep);
    std::vector<double> n;
    for (int i = 0; i < 4000; ++i) {
      RandomStream rng = base.substream(i);
      n.push_back(count_section_hits(spec, L, 2.0, rng));
    }
    const auto m = stats::mean_stderr(n);
    EXPECT_NEAR(m.mean, expected, 4 * m.stderr_);
  }
}

TEST(Section, BothRoutesGiveTheSameCellLaw) {
  const auto spec = asymmetric();
  RandomStream pick(3);
  const auto L = random_subspace(3, 2, pick);
  const RandomStream a(4), b(5);
  std::vector<double> va, vb;
  for (int i = 0; i < 3000; ++i) {
    RandomStream ra = a.substream(i), rb = b.substream(i);
    va.push_back(volume(zero_cell_in_section(spec, L, ra)));
    vb.push_back(volume(section_of_zero_cell(spec, L, rb)));
  }
  EXPECT_GT(stats::ks_two_sample(va, vb).p_value, 1e-3);
}

TEST(ZeroCell, CrossWidthsAreGamma2) {
  // For cross phi with gamma = 3 the planes x1 = c form a rate-1 Poisson
  // process, so the e1-extent of Z_0 is Gamma(2, 1).
  const auto spec = cross(3.0);
  const RandomStream base(6);
  std::vector<double> w;
  for (int i = 0; i < 3000; ++i) {
    RandomStream rng = base.substream(i);
    const auto P = zero_cell(spec, rng);
    EXPECT_FALSE(P.clipped());
    w.push_back(extent(P, Vec::Unit(3, 0)));
  }
  const auto ks = stats::ks_one_sample(w, [](double x) { return 1.0 - std::exp(-x) * (1.0 + x); });
  EXPECT_GT(ks.p_value, 1e-3);
}

TEST(ZeroCell, ScalingCovariance) {
  // X with intensity c gamma has the law of X / c.
  const auto s1 = cross(1.0), s4 = cross(4.0);
  const RandomStream a(7), b(8);
  std::vector<double> v1, v4;
  for (int i = 0; i < 3000; ++i) {
    RandomStream ra = a.substream(i), rb = b.substream(i);
    v1.push_back(volume(zero_cell(s1, ra)));
    v4.push_back(64.0 * volume(zero_cell(s4, rb)));
  }
  EXPECT_GT(stats::ks_two_sample(v1, v4).p_value, 1e-3);
}

TEST(FlatDistribution, ClosedFormWeights) {
  const auto qc = intersection_direction_distribution(cross(1.0), 2);
  ASSERT_EQ(qc.size(), 3u);
  for (const auto& e : qc.entries) EXPECT_NEAR(e.weight, 1.0 / 3.0, 1e-14);
  const auto qa = intersection_direction_distribution(asymmetric(), 1);
  ASSERT_EQ(qa.size(), 3u);
  // Line along e3 comes from the pair (e1, e2): weight 0.6 * 0.2 / 0.28 = 3/7.
  EXPECT_NEAR(qa.entries[qa.find(Subspace::coordinate(3, {2}))].weight, 3.0 / 7.0, 1e-14);
  EXPECT_NEAR(qa.entries[qa.find(Subspace::coordinate(3, {1}))].weight, 3.0 / 7.0, 1e-14);
  EXPECT_NEAR(qa.entries[qa.find(Subspace::coordinate(3, {0}))].weight, 1.0 / 7.0, 1e-14);
  const auto q2 = intersection_direction_distribution(asymmetric(), 2);
  EXPECT_NEAR(q2.entries[q2.find(Subspace::coordinate(3, {1, 2}))].weight, 0.6, 1e-14);
  EXPECT_THROW(intersection_direction_distribution(asymmetric(), 3), InvalidArgument);
}

TEST(FlatDistribution, NonOrthogonalPairsWeightedBySine) {
  Vec u(3);
  u << 1, 1, 0;
  const ProcessSpec spec(1.0, make_even({{Vec::Unit(3, 0), 1.0 / 3}, {u, 1.0 / 3}, {Vec::Unit(3, 2), 1.0 / 3}}));
  const auto q = intersection_direction_distribution(spec, 1);
  // Equal axis masses; nabla(e1, u) = sin 45 deg, the other two pairs are orthogonal.
  const double s = std::sqrt(0.5);
  const auto e3 = q.find(Subspace::coordinate(3, {2}));
  ASSERT_GE(e3, 0);
  EXPECT_NEAR(q.entries[e3].weight, s / (s + 2.0), 1e-14);
}

TEST(FlatDistribution, CountingOracleAgrees) {
  for (const auto& spec : {cross(3.0), asymmetric()}) {
    for (int k : {1, 2}) {
      const auto q = intersection_direction_distribution(spec, k);
      RandomStream rng(9 + k);
      const auto c = oracle::count_intersection_flats(spec, q, k, 4.0 / spec.gamma, 20000, rng);
      EXPECT_EQ(c.unmatched, 0u);
      EXPECT_LT(oracle::total_variation(c, q), 0.03);
    }
  }
}

TEST(TypicalFace, DirectionInSupportAndSizeBiasedArea) {
  const auto spec = cross(3.0);
  const auto q = intersection_direction_distribution(spec, 2);
  const RandomStream base(11);
  std::vector<double> v;
  for (int i = 0; i < 4000; ++i) {
    RandomStream rng = base.substream(i);
    const auto f = sample_weighted_typical_face(spec, q, rng);
    EXPECT_TRUE(q.in_support(f.face.carrier()));
    EXPECT_EQ(f.flat_index, q.find(f.face.carrier()));
    v.push_back(volume(f.face));
  }
  // Sides are independent Gamma(2, 1): E V = 4.
  const auto m = stats::mean_stderr(v);
  EXPECT_NEAR(m.mean, 4.0, 4 * m.stderr_);
}
