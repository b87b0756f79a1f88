// Independent reference computations shared by the unit tests and the
// acceptance runner.  Nothing here calls the optimisers under test.
#ifndef MOSAIC_TESTS_ORACLES_HPP
#define MOSAIC_TESTS_ORACLES_HPP

#include "mosaic/grassmann.hpp"
#include "mosaic/measures.hpp"
#include "mosaic/polytope.hpp"
#include "mosaic/process.hpp"
#include "mosaic/random.hpp"
#include "mosaic/shape.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using mosaic::Mat;
using mosaic::Vec;

inline mosaic::SphericalMeasure random_even_measure(int d, int n, mosaic::RandomStream& rng) {
  std::vector<std::pair<Vec, double>> atoms;
  for (int i = 0; i < n; ++i) atoms.emplace_back(rng.unit_vector(d), rng.uniform(0.1, 1.0));
  return mosaic::make_even(atoms);
}

/// Random convex body in R^d containing a neighbourhood of o: n random halfspaces
/// at distance in [0.5, 1.5] plus a bounding box.
inline mosaic::Polytope random_body(int d, int n, mosaic::RandomStream& rng) {
  std::vector<mosaic::Halfspace> hs;
  for (int i = 0; i < n; ++i) hs.push_back({rng.unit_vector(d), rng.uniform(0.5, 1.5)});
  for (int j = 0; j < d; ++j)
    for (double s : {1.0, -1.0}) hs.push_back({s * Vec::Unit(d, j), 2.0});
  return mosaic::intersect_halfspaces(mosaic::Subspace::full(d), hs, 10.0);
}

/// Random o-symmetric body: n random slabs |<x, u>| <= h.
inline mosaic::Polytope random_symmetric_body(int d, int n, mosaic::RandomStream& rng) {
  std::vector<mosaic::Halfspace> hs;
  for (int i = 0; i < n; ++i) {
    const Vec u = rng.unit_vector(d);
    const double h = rng.uniform(0.5, 1.5);
    hs.push_back({u, h});
    hs.push_back({-u, h});
  }
  for (int j = 0; j < d; ++j)
    for (double s : {1.0, -1.0}) hs.push_back({s * Vec::Unit(d, j), 2.0});
  return mosaic::intersect_halfspaces(mosaic::Subspace::full(d), hs, 10.0);
}

/// theta(K, M) for planar bodies by successive grid zooms over translations z.
/// z -> beta(z) / alpha(z) is quasi-convex (convex over concave), so zooming
/// around the grid minimiser converges to the global minimum.  The window only
/// halves per round: thin valleys of the ratio get lost under faster zooms.
inline double theta_grid(const mosaic::Polytope& K, const mosaic::Polytope& M, int n = 40, int rounds = 45) {
  const Vec c = mosaic::centroid(K);
  double half = 2.0 * mosaic::diameter(K);
  Vec center = -c;
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < rounds; ++r) {
    Vec arg = center;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        Vec z(2);
        z << center[0] - half + 2.0 * half * i / n, center[1] - half + 2.0 * half * j / n;
        const double v = mosaic::sandwich_ratio(K, M, z);
        if (v < best) {
          best = v;
          arg = z;
        }
      }
    }
    center = arg;
    half *= 0.5;
  }
  return std::log(best);
}

/// Delta(L, E) by direct minimisation of |rho - I|_F over rotations with
/// rho L = E: rho = B_E diag(A, C) B_L', A in O(k), C in O(d - k),
/// parametrised by exponentials of skew matrices times fixed reflections,
/// with multi-start compass search.
inline double delta_brute_force(const mosaic::Subspace& L, const mosaic::Subspace& E, mosaic::RandomStream& rng,
                                int starts = 12) {
  const int d = L.ambient_dim(), k = L.dim(), r = d - k;
  Mat bl(d, d), be(d, d);
  bl << L.frame(), L.complement().frame();
  be << E.frame(), E.complement().frame();
  const int pa = k * (k - 1) / 2, pc = r * (r - 1) / 2, np = pa + pc;
  auto skew = [](int m, const double* x) {
    Mat s = Mat::Zero(m, m);
    int t = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        s(i, j) = x[t];
        s(j, i) = -x[t];
        ++t;
      }
    return s;
  };
  double best = std::numeric_limits<double>::infinity();
  for (int sa = 0; sa < 2; ++sa) {
    for (int sc = 0; sc < 2; ++sc) {
      Mat fa = Mat::Identity(k, k), fc = Mat::Identity(r, r);
      if (sa) fa(0, 0) = -1;
      if (sc) fc(0, 0) = -1;
      auto rho = [&](const Vec& x) {
        Mat blk = Mat::Zero(d, d);
        blk.topLeftCorner(k, k) = fa * Mat(skew(k, x.data()).exp());
        blk.bottomRightCorner(r, r) = fc * Mat(skew(r, x.data() + pa).exp());
        return Mat(be * blk * bl.transpose());
      };
      if (rho(Vec::Zero(np)).determinant() < 0) continue;
      auto f = [&](const Vec& x) { return (rho(x) - Mat::Identity(d, d)).norm(); };
      if (np == 0) {
        best = std::min(best, f(Vec::Zero(0)));
        continue;
      }
      for (int s = 0; s < starts; ++s) {
        Vec x(np);
        for (int i = 0; i < np; ++i) x[i] = rng.uniform(-mosaic::kPi, mosaic::kPi);
        double fx = f(x);
        double step = 0.5;
        while (step > 1e-11) {
          bool moved = false;
          for (int i = 0; i < np; ++i) {
            for (double sgn : {1.0, -1.0}) {
              Vec y = x;
              y[i] += sgn * step;
              const double fy = f(y);
              if (fy < fx) {
                x = y;
                fx = fy;
                moved = true;
              }
            }
          }
          if (!moved) step *= 0.5;
        }
        best = std::min(best, fx);
      }
    }
  }
  return best;
}

/// Intersection-counting oracle for Q_{d-k} in d = 3: sample the process in
/// the ball of radius R, form every flat u_1^perp cap ... cap u_{d-k}^perp
/// (k = 2: single hyperplanes, k = 1: pairs) that meets the ball and tally
/// its direction.  Counting flats hitting a ball is unbiased for the
/// directional distribution because the hitting probability of a stationary
/// k-flat process does not depend on direction.
struct FlatCounts {
  std::vector<std::size_t> counts;  ///< per entry of q
  std::size_t unmatched = 0;        ///< directions outside the support of q
  std::size_t total = 0;
};

inline FlatCounts count_intersection_flats(const mosaic::ProcessSpec& spec, const mosaic::FlatDistribution& q, int k,
                                           double R, std::size_t target, mosaic::RandomStream& rng) {
  mosaic::require(spec.dim() == 3 && (k == 1 || k == 2), "count_intersection_flats: d = 3, k in {1, 2}");
  FlatCounts out;
  out.counts.assign(q.size(), 0);
  auto tally = [&](const mosaic::Subspace& flat) {
    const int i = q.find(flat);
    if (i < 0) ++out.unmatched;
    else ++out.counts[i];
    ++out.total;
  };
  while (out.total < target) {
    const auto hs = mosaic::sample_hyperplanes(spec, R, rng);
    if (k == 2) {
      for (const auto& h : hs) {
        tally(mosaic::Subspace::orthogonal_to(h.normal));
        if (out.total >= target) break;
      }
      continue;
    }
    for (std::size_t i = 0; i < hs.size() && out.total < target; ++i) {
      for (std::size_t j = i + 1; j < hs.size() && out.total < target; ++j) {
        const Eigen::Vector3d a = hs[i].normal, b = hs[j].normal;
        const Eigen::Vector3d dir = a.cross(b);
        if (dir.norm() < 1e-12) continue;  // parallel planes never meet
        // Closest point of the line {<a,x> = s, <b,x> = t} to o lies in span(a, b).
        Eigen::Matrix2d g;
        g << a.dot(a), a.dot(b), a.dot(b), b.dot(b);
        const Eigen::Vector2d c = g.inverse() * Eigen::Vector2d(hs[i].offset, hs[j].offset);
        if ((c[0] * a + c[1] * b).norm() > R) continue;
        tally(mosaic::Subspace::span(Vec(dir)));
      }
    }
  }
  return out;
}

inline double total_variation(const FlatCounts& c, const mosaic::FlatDistribution& q) {
  double tv = static_cast<double>(c.unmatched) / static_cast<double>(c.total);
  for (std::size_t i = 0; i < q.size(); ++i) {
    tv += std::abs(static_cast<double>(c.counts[i]) / static_cast<double>(c.total) - q.entries[i].weight);
  }
  return 0.5 * tv;
}

}  // namespace oracle

#endif  // MOSAIC_TESTS_ORACLES_HPP
