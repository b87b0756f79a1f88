#ifndef MOSAIC_SHAPE_HPP
#define MOSAIC_SHAPE_HPP

#include "mosaic/common.hpp"
#include "mosaic/grassmann.hpp"
#include "mosaic/lp.hpp"
#include "mosaic/polytope.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace mosaic {

/// theta(K, M) with its witness alpha M subset K + z subset beta M.
struct DeviationResult {
  double value = 0.0;
  Vec z;  ///< translation, in the carrier coordinates of M
  double alpha = 1.0;
  double beta = 1.0;
  Rotation rotation;  ///< identity for same-space deviations
};

namespace detail {

/// Rays at which support inequalities decide the two inclusions: the facet
/// normals of K (for alpha M in K + z) and of M (for K + z in beta M).
struct RefinementRays {
  std::vector<Vec> of_K;
  std::vector<Vec> of_M;
};

inline RefinementRays refinement_rays(const Polytope& K, const Polytope& M) {
  RefinementRays r;
  for (const auto& f : K.facets()) r.of_K.push_back(f.normal);
  for (const auto& f : M.facets()) r.of_M.push_back(f.normal);
  return r;
}

}  // namespace detail

/// R(z) / r(z): the sandwich ratio at a fixed translation (z in carrier
/// coordinates); +inf when alpha would be nonpositive.
inline double sandwich_ratio(const Polytope& K, const Polytope& M, const Vec& z, double* alpha = nullptr,
                             double* beta = nullptr) {
  const auto rays = detail::refinement_rays(K, M);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& u : rays.of_K) lo = std::min(lo, (support(K, u) + z.dot(u)) / support(M, u));
  for (const auto& u : rays.of_M) hi = std::max(hi, (support(K, u) + z.dot(u)) / support(M, u));
  if (alpha) *alpha = lo;
  if (beta) *beta = hi;
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

/**
 * theta(K, M) = min over z, alpha, beta of log(beta / alpha) subject to
 * alpha M subset K + z subset beta M, for K and M in the same subspace.
 *
 * With s = 1/alpha, w = z/alpha, b = beta/alpha the constraints become
 * linear: h(M,u) <= s h(K,u) + <w,u> at the facet normals of K and
 * s h(K,u) + <w,u> <= b h(M,u) at those of M.  Minimising b is an LP.
 */
inline DeviationResult deviation_same_space(const Polytope& K_in, const Polytope& M) {
  if (K_in.ambient_dim() != M.ambient_dim() || K_in.dim() != M.dim()) {
    throw InvalidArgument("deviation_same_space: dimension mismatch");
  }
  if (!M.is_origin_symmetric()) throw InvalidArgument("deviation_same_space: M must be o-symmetric");
  // theta is invariant under translating K; centring keeps small, far-off
  // faces well conditioned after the rescaling below.
  const Polytope K0 = K_in.in_frame(M.carrier());
  const Vec c0 = centroid(K0);
  const Polytope K = K0.translated(-c0);
  const int k = M.dim();

  // Work at unit scale; theta is invariant under scaling either body.
  const double sK = std::max(K.scale(), 1e-300);
  const double sM = std::max(M.scale(), 1e-300);
  const Polytope Kn = K.scaled(1.0 / sK);
  const Polytope Mn = M.scaled(1.0 / sM);
  const auto rays = detail::refinement_rays(Kn, Mn);

  // Variables: s, b, w+ (k), w- (k).
  const int nv = 2 + 2 * k;
  const int nc = static_cast<int>(rays.of_K.size() + rays.of_M.size());
  Mat A = Mat::Zero(nc, nv);
  Vec rhs = Vec::Zero(nc);
  int row = 0;
  for (const auto& u : rays.of_K) {
    A(row, 0) = -support(Kn, u);
    A.block(row, 2, 1, k) = -u.transpose();
    A.block(row, 2 + k, 1, k) = u.transpose();
    rhs[row] = -support(Mn, u);
    ++row;
  }
  for (const auto& u : rays.of_M) {
    A(row, 0) = support(Kn, u);
    A(row, 1) = -support(Mn, u);
    A.block(row, 2, 1, k) = u.transpose();
    A.block(row, 2 + k, 1, k) = -u.transpose();
    ++row;
  }
  Vec c = Vec::Zero(nv);
  c[1] = -1.0;
  const auto res = lp::maximize(A, rhs, c);
  if (res.status != lp::Status::optimal) throw DegenerateError("deviation_same_space: LP failed");
  const double s = res.x[0];
  const double b = std::max(res.x[1], 1.0);
  if (!(s > 0.0)) throw DegenerateError("deviation_same_space: degenerate sandwich");
  const Vec w = res.x.segment(2, k) - res.x.segment(2 + k, k);

  DeviationResult out;
  out.value = std::log(b);
  // Undo the normalisation: alpha Mn subset Kn + w/s subset beta Mn.
  out.alpha = (1.0 / s) * sK / sM;
  out.beta = (b / s) * sK / sM;
  out.z = (w / s) * sK - c0;
  out.rotation = Rotation::identity(M.ambient_dim());
  return out;
}

/**
 * Cross-space deviation: min over defect-minimal rotations rho with
 * rho L = E of theta(rho K, M).  Equal subspaces use the identity.
 */
inline DeviationResult deviation_cross_space(const Polytope& K, const Polytope& M) {
  if (K.ambient_dim() != M.ambient_dim() || K.dim() != M.dim()) {
    throw InvalidArgument("deviation_cross_space: dimension mismatch");
  }
  if (same_subspace(K.carrier(), M.carrier())) return deviation_same_space(K, M);
  const auto family = minimal_rotation_family(K.carrier(), M.carrier());
  DeviationResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (const auto& rho : family.members) {
    auto r = deviation_same_space(K.rotated(rho), M);
    if (r.value < best.value) {
      r.rotation = rho;
      best = std::move(r);
    }
  }
  return best;
}

/// Convenience: dispatches on whether the carriers coincide.
inline DeviationResult deviation(const Polytope& K, const Polytope& M) { return deviation_cross_space(K, M); }

}  // namespace mosaic

#endif  // MOSAIC_SHAPE_HPP
