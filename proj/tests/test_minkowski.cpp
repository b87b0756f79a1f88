#include "mosaic/minkowski.hpp"
#include "mosaic/shape.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace mosaic;

namespace {

Polytope cube(double a) {
  std::vector<Halfspace> hs;
  for (int j = 0; j < 3; ++j)
    for (double s : {1.0, -1.0}) hs.push_back({s * Vec::Unit(3, j), a});
  return intersect_halfspaces(Subspace::full(3), hs, 10 * a);
}

Polytope octahedron(double r) {
  std::vector<Halfspace> hs;
  for (int s0 : {1, -1})
    for (int s1 : {1, -1})
      for (int s2 : {1, -1}) {
        Vec u(3);
        u << s0, s1, s2;
        hs.push_back({u / std::sqrt(3.0), r / std::sqrt(3.0)});
      }
  return intersect_halfspaces(Subspace::full(3), hs, 10 * r);
}

}  // namespace

TEST(Minkowski2D, ExactOnRandomMeasures) {
  RandomStream rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform() * 15);  // 4..32 atoms after symmetrisation
    const auto mu = oracle::random_even_measure(2, n, rng);
    const auto sol = solve_minkowski_2d(mu);
    EXPECT_LE(sol.residual, 1e-10);
    EXPECT_LE(prokhorov(surface_area_measure(sol.body), mu, 1e-13), 1e-10);
    EXPECT_TRUE(sol.body.is_origin_symmetric());
  }
}

TEST(Minkowski2D, RejectsOddOrDegenerateTargets) {
  Vec u(2);
  u << 1, 0;
  Vec v(2);
  v << 0, 1;
  EXPECT_THROW(solve_minkowski_2d(SphericalMeasure(2, {{u, 1.0}, {-u, 1.0}, {v, 1.0}})), InvalidArgument);
  EXPECT_THROW(solve_minkowski_2d(make_even({{u, 1.0}})), DegenerateError);
}

TEST(Minkowski3D, VolumeHessianMatchesFiniteDifferences) {
  RandomStream rng(2);
  std::vector<Vec> axes;
  for (int j = 0; j < 3; ++j) axes.push_back(Vec::Unit(3, j));
  for (int j = 0; j < 4; ++j) axes.push_back(rng.unit_vector(3));
  const int na = static_cast<int>(axes.size());
  Vec x(na);
  for (int a = 0; a < na; ++a) x[a] = a < 3 ? 1.0 : rng.uniform(1.1, 1.4);
  const auto L = Subspace::full(3);
  const auto s = detail::symmetric_body(L, axes, x);
  const Mat h = detail::symmetric_volume_hessian(s, axes);
  const double eps = 1e-6;
  for (int b = 0; b < na; ++b) {
    Vec xp = x, xm = x;
    xp[b] += eps;
    xm[b] -= eps;
    const auto sp = detail::symmetric_body(L, axes, xp), sm = detail::symmetric_body(L, axes, xm);
    // Gradient of V is twice the per-axis facet area.
    EXPECT_NEAR((sp.volume - sm.volume) / (2 * eps), 2.0 * s.face_area[b], 1e-6);
    const Vec col = (2.0 * sp.face_area - 2.0 * sm.face_area) / (2 * eps);
    for (int a = 0; a < na; ++a) EXPECT_NEAR(h(a, b), col[a], 1e-5) << a << "," << b;
  }
}

TEST(Minkowski3D, CubeAndOctahedronFromClosedForms) {
  const auto L = Subspace::full(3);
  // Cube of half-width a has facet area 4a^2.
  const auto cube_mu = surface_area_measure(cube(0.7));
  const auto sc = solve_minkowski_iterative(cube_mu, L, 1e-8);
  EXPECT_LE(deviation(sc.body, cube(0.7)).value, 1e-4);
  EXPECT_NEAR(volume(sc.body), volume(cube(0.7)), 1e-6);
  // Regular octahedron: 8 facets of equal area.
  const auto oct = octahedron(1.3);
  const auto so = solve_minkowski_iterative(surface_area_measure(oct), L, 1e-8);
  EXPECT_LE(deviation(so.body, oct).value, 1e-4);
  EXPECT_NEAR(volume(so.body), volume(oct), 1e-6);
}

TEST(Minkowski3D, RandomRoundTrips) {
  RandomStream rng(3);
  const auto L = Subspace::full(3);
  for (int rep = 0; rep < 6; ++rep) {
    const auto P = oracle::random_symmetric_body(3, 3 + rep % 4, rng);
    const auto sol = solve_minkowski_iterative(surface_area_measure(P), L, 1e-8);
    EXPECT_LE(sol.residual, 1e-8);
    EXPECT_LE(deviation(sol.body, P).value, 1e-4);
    EXPECT_NEAR(volume(sol.body), volume(P), 1e-5 * volume(P));
  }
}

TEST(Minkowski3D, HomogeneityAndUniqueness) {
  RandomStream rng(4);
  const auto L = Subspace::full(3);
  const auto P = oracle::random_symmetric_body(3, 5, rng);
  const auto mu = surface_area_measure(P);
  const auto base = solve_minkowski_iterative(mu, L, 1e-8);
  // S(cP) = c^2 S(P).
  const auto scaled = solve_minkowski_iterative(mu.scaled(4.0), L, 1e-8);
  EXPECT_NEAR(volume(scaled.body), 8.0 * volume(base.body), 1e-5 * volume(scaled.body));
  // Different starting support numbers converge to the same body.
  MinkowskiOptions opt;
  for (std::size_t a = 0; a < mu.size() / 2; ++a) opt.initial_scale.push_back(rng.uniform(0.5, 2.0));
  const auto other = solve_minkowski_iterative(mu, L, 1e-8, opt);
  for (const auto& f : base.body.facets()) EXPECT_NEAR(support(other.body, f.normal), f.offset, 1e-6);
}

TEST(Minkowski3D, RejectsBadTargets) {
  const auto L = Subspace::full(3);
  Vec u = Vec::Unit(3, 0), v = Vec::Unit(3, 1);
  EXPECT_THROW(solve_minkowski_iterative(make_even({{u, 1.0}, {v, 1.0}}), L, 1e-8), DegenerateError);
  EXPECT_THROW(solve_minkowski_iterative(SphericalMeasure(3, {{u, 1.0}, {v, 1.0}, {Vec::Unit(3, 2), 1.0}}), L, 1e-8),
               InvalidArgument);
  EXPECT_THROW(solve_minkowski_iterative(surface_area_measure(cube(1.0)), L, 0.0), InvalidArgument);
}

TEST(Blaschke, CrossSectionBodyIsASquare) {
  // Cross phi, gamma = 3, coordinate plane: phi_section has mass 1/4 on +-e1, +-e2,
  // so B_L is the square of side 1/4.
  const ProcessSpec spec{3.0, cross_measure(3)};
  const auto L = Subspace::coordinate(3, {0, 1});
  const auto B = blaschke_body(spec, L);
  EXPECT_NEAR(volume(B), 1.0 / 16.0, 1e-12);
  EXPECT_TRUE(B.is_origin_symmetric());
  // B(L) from pi_L phi has side 1/6.
  EXPECT_NEAR(volume(body_B_of_L(spec, L)), 1.0 / 36.0, 1e-12);
  // The full-space body is the cube with facet area 1/6.
  const auto B3 = blaschke_body(spec, Subspace::full(3));
  EXPECT_NEAR(volume(B3), std::pow(1.0 / 6.0, 1.5), 1e-8);
}
