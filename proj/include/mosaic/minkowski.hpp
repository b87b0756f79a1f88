#ifndef MOSAIC_MINKOWSKI_HPP
#define MOSAIC_MINKOWSKI_HPP

#include "mosaic/common.hpp"
#include "mosaic/measures.hpp"
#include "mosaic/polytope.hpp"
#include "mosaic/process_spec.hpp"

#include <algorithm>
#include <vector>

namespace mosaic {

struct MinkowskiSolution {
  Polytope body;              ///< o-symmetric, surface area measure ~ target
  double residual = 0.0;      ///< Prokhorov distance between S(body) and the target
  int iterations = 0;
  std::vector<int> tiny_facets;  ///< target atoms whose facets nearly vanished
};

namespace detail {

inline void require_even_spanning(const SphericalMeasure& mu, int k, const char* who) {
  require(mu.dim() == k, who);
  if (!mu.is_even(1e-12 * std::max(1.0, mu.total_mass()))) throw InvalidArgument("Minkowski: target measure is not even");
  if (!mu.spans()) throw DegenerateError("Minkowski: target measure does not span the carrier");
}

}  // namespace detail

/**
 * Exact planar Minkowski problem: atoms sorted by angle become edges of
 * length m_i with outward normal u_i (edge vector = m_i * u_i rotated by
 * +90 degrees), then the polygon is centred at o.
 */
inline MinkowskiSolution solve_minkowski_2d(const SphericalMeasure& mu, const Subspace& carrier = Subspace::full(2)) {
  require(carrier.dim() == 2, "solve_minkowski_2d: carrier must be two-dimensional");
  detail::require_even_spanning(mu, 2, "solve_minkowski_2d: target must live on S^1");
  std::vector<Atom> atoms = mu.atoms();
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) {
    return std::atan2(a.dir[1], a.dir[0]) < std::atan2(b.dir[1], b.dir[0]);
  });
  const int n = static_cast<int>(atoms.size());
  std::vector<Vec> verts(n, Vec::Zero(2));
  for (int i = 0; i + 1 < n; ++i) {
    Vec edge(2);
    edge << -atoms[i].dir[1], atoms[i].dir[0];
    verts[i + 1] = verts[i] + atoms[i].mass * edge;
  }
  // Centrally symmetric polygon: the centre is the mean of opposite vertices.
  Vec center = Vec::Zero(2);
  for (const auto& v : verts) center += v;
  center /= n;
  for (auto& v : verts) v -= center;
  std::vector<Facet> facets;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    facets.push_back({atoms[i].dir, atoms[i].dir.dot(0.5 * (verts[i] + verts[j])), atoms[i].mass, {i, j}});
  }
  MinkowskiSolution sol{Polytope(carrier, std::move(verts), std::move(facets)), 0.0, 0, {}};
  sol.residual = prokhorov(surface_area_measure(sol.body), mu, 1e-13);
  return sol;
}

struct MinkowskiOptions {
  int max_iters = 10000;
  /// Optional multiplicative perturbation of the initial support numbers
  /// (used to probe uniqueness from different starts).
  std::vector<double> initial_scale;
};

namespace detail {

struct SymmetricState {
  Polytope body;
  double volume = 0.0;
  Vec face_area;  // per axis (area of the + facet; equals the - facet)
};

// P(x) = {y : |<y, u_a>| <= x_a}.
inline SymmetricState symmetric_body(const Subspace& L, const std::vector<Vec>& axes, const Vec& x) {
  std::vector<Halfspace> hs;
  hs.reserve(2 * axes.size());
  for (std::size_t a = 0; a < axes.size(); ++a) {
    hs.push_back({axes[a], x[static_cast<int>(a)]});
    hs.push_back({-axes[a], x[static_cast<int>(a)]});
  }
  const double bound = 4.0 * x.maxCoeff() * std::sqrt(3.0) + 1.0;
  SymmetricState s{intersect_halfspaces(L, hs, bound), 0.0, Vec::Zero(static_cast<int>(axes.size()))};
  s.volume = volume(s.body);
  for (const auto& f : s.body.facets()) {
    for (std::size_t a = 0; a < axes.size(); ++a) {
      if ((f.normal - axes[a]).norm() < 1e-9) s.face_area[static_cast<int>(a)] += f.measure;
    }
  }
  return s;
}

// Hessian of the volume in the per-axis support numbers, from
// dF_i/dh_j = l_ij / sin(theta_ij) and dF_i/dh_i = -sum_j l_ij cot(theta_ij).
inline Mat symmetric_volume_hessian(const SymmetricState& s, const std::vector<Vec>& axes) {
  const auto& facets = s.body.facets();
  const auto& verts = s.body.local_vertices();
  const int nf = static_cast<int>(facets.size());
  const int na = static_cast<int>(axes.size());
  std::vector<int> axis_of(nf, -1);
  for (int f = 0; f < nf; ++f) {
    for (int a = 0; a < na; ++a) {
      if ((facets[f].normal - axes[a]).norm() < 1e-9 || (facets[f].normal + axes[a]).norm() < 1e-9) axis_of[f] = a;
    }
  }
  Mat hf = Mat::Zero(nf, nf);
  for (int i = 0; i < nf; ++i) {
    for (int j = i + 1; j < nf; ++j) {
      std::vector<int> common;
      for (int vi : facets[i].vertices)
        if (std::find(facets[j].vertices.begin(), facets[j].vertices.end(), vi) != facets[j].vertices.end())
          common.push_back(vi);
      if (common.size() < 2) continue;
      double len = 0.0;
      for (std::size_t p = 0; p < common.size(); ++p)
        for (std::size_t q = p + 1; q < common.size(); ++q) len = std::max(len, (verts[common[p]] - verts[common[q]]).norm());
      const Eigen::Vector3d ui = facets[i].normal, uj = facets[j].normal;
      const double sn = ui.cross(uj).norm();
      const double cs = ui.dot(uj);
      if (sn < 1e-12) continue;
      hf(i, j) = hf(j, i) = len / sn;
      hf(i, i) -= len * cs / sn;
      hf(j, j) -= len * cs / sn;
    }
  }
  Mat h = Mat::Zero(na, na);
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nf; ++j) {
      if (axis_of[i] >= 0 && axis_of[j] >= 0) h(axis_of[i], axis_of[j]) += hf(i, j);
    }
  }
  return h;
}

}  // namespace detail

/**
 * Discrete Minkowski problem in a three-dimensional carrier.
 *
 * Variational form: among symmetric support vectors x (one per axis +-u_a)
 * maximise G(x) = (1/3) log V(P(x)) - sum_i mu_i h_i.  G is concave; its
 * gradient is built from the facet areas (the volume gradient), and at the
 * optimum F_i = 3 V mu_i, so rescaling by (3V)^(-1/2) yields the body.
 * Steps are damped Newton steps using the mixed-area Hessian, with
 * backtracking on G; a plain facet-area ascent step is used whenever the
 * Newton direction fails to increase G.
 */
inline MinkowskiSolution solve_minkowski_iterative(const SphericalMeasure& mu, const Subspace& L, double tol,
                                                   const MinkowskiOptions& options = {}) {
  require(L.dim() == 3, "solve_minkowski_iterative: carrier must be three-dimensional");
  if (!(tol > 0.0)) throw InvalidArgument("solve_minkowski_iterative: tol must be positive");
  detail::require_even_spanning(mu, 3, "solve_minkowski_iterative: target must live on S^2");

  // Pair atoms into axes.
  std::vector<Vec> axes;
  std::vector<double> axis_mass;
  std::vector<int> atom_axis(mu.size(), -1);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto& a = mu.atoms()[i];
    for (std::size_t j = 0; j < axes.size(); ++j) {
      if ((axes[j] + a.dir).norm() <= SphericalMeasure::kMergeTolerance) atom_axis[i] = static_cast<int>(j);
    }
    if (atom_axis[i] < 0) {
      atom_axis[i] = static_cast<int>(axes.size());
      axes.push_back(a.dir);
      axis_mass.push_back(a.mass);
    }
  }
  const int na = static_cast<int>(axes.size());
  Vec m(na);
  for (int a = 0; a < na; ++a) m[a] = axis_mass[a];
  const double total = mu.total_mass();

  Vec x = Vec::Constant(na, 1.0 / total);
  for (int a = 0; a < na && a < static_cast<int>(options.initial_scale.size()); ++a) x[a] *= options.initial_scale[a];

  auto objective = [&](const detail::SymmetricState& s, const Vec& xv) {
    return std::log(s.volume) / 3.0 - 2.0 * m.dot(xv);
  };
  auto tighten = [&](detail::SymmetricState& s, Vec& xv) {
    // Support numbers of facets that do not touch P can drop to h(P, u_a)
    // without changing P, which strictly increases G.
    bool changed = false;
    for (int a = 0; a < na; ++a) {
      if (s.face_area[a] <= 0.0) {
        const double h = support(s.body, axes[a]);
        if (h < xv[a]) {
          xv[a] = h;
          changed = true;
        }
      }
    }
    if (changed) s = detail::symmetric_body(L, axes, xv);
  };

  auto state = detail::symmetric_body(L, axes, x);
  tighten(state, x);
  double g_val = objective(state, x);
  int iter = 0;
  double lambda = 1e-9;
  double residual_rel = std::numeric_limits<double>::infinity();
  double best_rel = residual_rel;
  int stalled = 0;
  for (; iter < options.max_iters; ++iter) {
    const Vec grad_v = 2.0 * state.face_area;               // dV/dx_a
    const Vec grad = grad_v / (3.0 * state.volume) - 2.0 * m;  // dG/dx_a
    residual_rel = 0.0;
    for (int a = 0; a < na; ++a) {
      residual_rel = std::max(residual_rel, std::abs(state.face_area[a] / (3.0 * state.volume) - m[a]) / m.maxCoeff());
    }
    if (residual_rel < 1e-14) break;
    if (residual_rel < best_rel) {
      best_rel = residual_rel;
      stalled = 0;
    } else if (++stalled > 25) {
      break;
    }

    const Mat hv = detail::symmetric_volume_hessian(state, axes);  // d2V/dx_a dx_b, both facets of each axis
    Mat hess = (hv / state.volume - grad_v * grad_v.transpose() / sqr(state.volume)) / 3.0;
    const double diag_scale = std::max(1e-300, hess.diagonal().cwiseAbs().maxCoeff());
    Vec dir;
    {
      Mat a = -hess + lambda * diag_scale * Mat::Identity(na, na);
      Eigen::LDLT<Mat> ldlt(a);
      dir = ldlt.solve(grad);
      if (ldlt.info() != Eigen::Success || !dir.allFinite() || dir.dot(grad) <= 0) dir = grad * (x.norm() / std::max(1e-300, grad.norm()));
    }
    // Predicted gain below rounding of G: nothing left to do.
    if (grad.dot(dir) < 1e-28) break;
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      Vec xn = x + step * dir;
      if (xn.minCoeff() > 0.0) {
        try {
          auto sn = detail::symmetric_body(L, axes, xn);
          tighten(sn, xn);
          const double gn = objective(sn, xn);
          // Close to the optimum the gain in G is below its rounding; fall
          // back to requiring a smaller gradient.
          const bool at_rounding = step * grad.dot(dir) < 1e-12 * (1.0 + std::abs(g_val));
          const bool smaller_grad =
              at_rounding && (2.0 * sn.face_area / (3.0 * sn.volume) - 2.0 * m).norm() < grad.norm();
          if (gn > g_val + 1e-4 * step * grad.dot(dir) || (gn >= g_val && step < 1e-6) || smaller_grad) {
            x = xn;
            state = std::move(sn);
            g_val = gn;
            accepted = true;
            lambda = std::max(1e-12, lambda * 0.3);
            break;
          }
        } catch (const DegenerateError&) {
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      lambda *= 10.0;
      if (lambda > 1e6) break;
    }
  }

  // Rescale so that facet areas equal mu.
  const double c = 3.0 * state.volume;
  MinkowskiSolution sol;
  sol.body = state.body.scaled(1.0 / std::sqrt(c));
  sol.iterations = iter;
  const double body_total = [&] {
    double t = 0.0;
    for (const auto& f : sol.body.facets()) t += f.measure;
    return t;
  }();
  // Drop numerically vanished facets from the residual computation.
  std::vector<Atom> kept;
  for (const auto& f : sol.body.facets()) {
    if (f.measure >= 1e-10 * body_total) kept.push_back({f.normal, f.measure});
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const int a = atom_axis[i];
    if (state.face_area[a] / (3.0 * state.volume) < 1e-10 * total) sol.tiny_facets.push_back(static_cast<int>(i));
  }
  sol.residual = prokhorov(SphericalMeasure(3, SphericalMeasure::merge(std::move(kept))), mu, tol / 10.0);
  if (sol.residual > tol) {
    throw ConvergenceError("solve_minkowski_iterative: did not reach tolerance", sol.residual);
  }
  return sol;
}

/// Dispatch on the carrier dimension: exact for k = 2, iterative for k = 3.
inline MinkowskiSolution solve_minkowski(const SphericalMeasure& mu, const Subspace& L, double tol = 1e-8) {
  if (L.dim() == 2) return solve_minkowski_2d(mu, L);
  return solve_minkowski_iterative(mu, L, tol);
}

/// B_L: the o-symmetric body in L with surface area measure phi_{X cap L}.
inline Polytope blaschke_body(const ProcessSpec& spec, const Subspace& L) {
  require(L.dim() == 2 || L.dim() == 3, "blaschke_body: carrier dimension must be 2 or 3");
  const auto section = section_params(spec, L);
  return solve_minkowski(section.phi_section, L, 1e-8).body;
}

/// B(L): the o-symmetric body in L with surface area measure pi_L phi.
inline Polytope body_B_of_L(const ProcessSpec& spec, const Subspace& L) {
  require(L.dim() == 2 || L.dim() == 3, "body_B_of_L: carrier dimension must be 2 or 3");
  const SphericalMeasure target = project(spec.phi, L);
  if (!target.spans()) throw DegenerateError("body_B_of_L: projection does not span L");
  return solve_minkowski(target, L, 1e-8).body;
}

}  // namespace mosaic

#endif  // MOSAIC_MINKOWSKI_HPP
