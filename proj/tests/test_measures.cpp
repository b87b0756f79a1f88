#include "mosaic/measures.hpp"
#include "mosaic/process_spec.hpp"
#include "mosaic/random.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mosaic;

namespace {

using oracle::random_even_measure;

// m(phi) by brute force over a fine angular grid (d = 2) or a spherical
// Fibonacci lattice refined locally (d = 3).
double m_grid_oracle(const SphericalMeasure& phi) {
  double best = 1e300;
  if (phi.dim() == 2) {
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double t = kPi * i / n;
      Vec u(2);
      u << std::cos(t), std::sin(t);
      best = std::min(best, phi.integrate_abs(u));
    }
    return best;
  }
  const int n = 200000;
  Vec arg;
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (i + 0.5) / n;
    const double r = std::sqrt(1 - z * z);
    const double a = i * kPi * (3.0 - std::sqrt(5.0));
    Vec u(3);
    u << r * std::cos(a), r * std::sin(a), z;
    const double f = phi.integrate_abs(u);
    if (f < best) {
      best = f;
      arg = u;
    }
  }
  // Local random refinement around the lattice minimiser.
  RandomStream rng(99);
  double step = 0.02;
  for (int it = 0; it < 20000; ++it) {
    Vec u = (arg + step * rng.gaussian_vector(3)).normalized();
    const double f = phi.integrate_abs(u);
    if (f < best) {
      best = f;
      arg = u;
    }
    if (it % 2000 == 1999) step *= 0.3;
  }
  return best;
}

}  // namespace

TEST(SphericalMeasure, RejectsBadAtoms) {
  Vec u(2);
  u << 1, 0;
  EXPECT_THROW(SphericalMeasure(2, {{u, -1.0}}), InvalidArgument);
  EXPECT_THROW(SphericalMeasure(2, {{2.0 * u, 1.0}}), InvalidArgument);
  EXPECT_THROW(make_even({}), InvalidArgument);
}

TEST(SphericalMeasure, MakeEvenIsEvenAndKeepsMass) {
  RandomStream rng(1);
  const auto mu = random_even_measure(3, 5, rng);
  EXPECT_TRUE(mu.is_even());
  EXPECT_NEAR(mu.first_moment().norm(), 0.0, 1e-14);
}

TEST(Nondegeneracy, CrossMeasureClosedForm) {
  // For +-e_i with mass 1/(2d) each, m = min_u sum |u_i| / d = 1/d.
  for (int d : {2, 3, 4}) EXPECT_NEAR(nondegeneracy_m(cross_measure(d)), 1.0 / d, 1e-14);
}

TEST(Nondegeneracy, MatchesGridOracle) {
  RandomStream rng(7);
  for (int d : {2, 3}) {
    for (int rep = 0; rep < 4; ++rep) {
      const auto phi = random_even_measure(d, 3 + rep, rng);
      const double exact = nondegeneracy_m(phi);
      const double grid = m_grid_oracle(phi);
      EXPECT_LE(exact, grid + 1e-12);
      EXPECT_NEAR(exact, grid, d == 2 ? 1e-4 : 1e-6);
    }
  }
}

TEST(Nondegeneracy, DegenerateSupportThrows) {
  Vec u(3);
  u << 1, 0, 0;
  Vec v(3);
  v << 0, 1, 0;
  EXPECT_THROW(nondegeneracy_m(make_even({{u, 1.0}, {v, 1.0}})), DegenerateError);
}

TEST(Projection, MassesScaleByProjectedLength) {
  const auto phi = cross_measure(3);
  const auto L = Subspace::coordinate(3, {0, 1});
  const auto p = project(phi, L);
  EXPECT_EQ(p.dim(), 2);
  EXPECT_EQ(p.size(), 4u);
  EXPECT_NEAR(p.total_mass(), 2.0 / 3.0, 1e-14);
}

TEST(Prokhorov, IdenticalMeasuresAreAtDistanceZero) {
  RandomStream rng(3);
  const auto mu = random_even_measure(3, 4, rng);
  EXPECT_LE(prokhorov(mu, mu, 1e-10), 1e-10);
}

TEST(Prokhorov, SubsetAndFlowAgree) {
  RandomStream rng(11);
  for (int rep = 0; rep < 40; ++rep) {
    const auto mu = random_even_measure(2, 3, rng);
    const auto nu = random_even_measure(2, 3, rng);
    for (double eps : {0.05, 0.2, 0.5, 1.0}) {
      EXPECT_EQ(prokhorov_feasible_subsets(mu, nu, eps), prokhorov_feasible_flow(mu, nu, eps)) << "eps " << eps;
    }
  }
}

TEST(Prokhorov, TriangleInequalityAndSymmetry) {
  RandomStream rng(5);
  for (int rep = 0; rep < 15; ++rep) {
    const auto a = random_even_measure(3, 3, rng);
    const auto b = random_even_measure(3, 3, rng);
    const auto c = random_even_measure(3, 3, rng);
    const double tol = 1e-9;
    const double ab = prokhorov(a, b, tol), bc = prokhorov(b, c, tol), ac = prokhorov(a, c, tol);
    EXPECT_LE(ac, ab + bc + 3 * tol);
    EXPECT_NEAR(ab, prokhorov(b, a, tol), 2 * tol);
  }
}

TEST(Prokhorov, InvariantUnderCommonRotation) {
  RandomStream rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    const auto a = random_even_measure(3, 3, rng);
    const auto b = random_even_measure(3, 3, rng);
    const Mat r = random_rotation(3, rng).matrix();
    EXPECT_NEAR(prokhorov(a, b, 1e-10), prokhorov(a.mapped(r), b.mapped(r), 1e-10), 3e-10);
  }
}

TEST(Prokhorov, SmallPerturbationGivesSmallDistance) {
  Vec u(2);
  u << 1, 0;
  Vec v(2);
  v << std::cos(0.01), std::sin(0.01);
  const auto a = make_even({{u, 1.0}});
  const auto b = make_even({{v, 1.0}});
  // Chordal distance between the atoms is 2 sin(0.005).
  EXPECT_NEAR(prokhorov(a, b, 1e-12), 2 * std::sin(0.005), 1e-10);
}
