#ifndef MOSAIC_GRASSMANN_HPP
#define MOSAIC_GRASSMANN_HPP

#include "mosaic/common.hpp"
#include "mosaic/random.hpp"

#include <algorithm>
#include <vector>

namespace mosaic {

/// Proper rotation of R^d, stored as its matrix in the standard basis.
class Rotation {
 public:
  Rotation() = default;

  explicit Rotation(Mat matrix) : m_(std::move(matrix)) {
    require(m_.rows() == m_.cols() && m_.rows() >= 1, "Rotation: matrix must be square");
    const Mat gram = m_.transpose() * m_;
    require((gram - Mat::Identity(m_.rows(), m_.rows())).cwiseAbs().maxCoeff() <= 1e-12 * m_.rows(),
            "Rotation: matrix is not orthogonal");
    require(std::abs(m_.determinant() - 1.0) <= 1e-12 * m_.rows(), "Rotation: determinant is not +1");
  }

  static Rotation identity(int d) { return Rotation(Mat::Identity(d, d)); }

  /// Rotation by `angle` in the oriented plane spanned by orthonormal a, b (a -> b).
  static Rotation in_plane(const Vec& a, const Vec& b, double angle) {
    const int d = static_cast<int>(a.size());
    Mat m = Mat::Identity(d, d);
    m += (std::cos(angle) - 1.0) * (a * a.transpose() + b * b.transpose());
    m += std::sin(angle) * (b * a.transpose() - a * b.transpose());
    return Rotation(m);
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }
  Vec apply(const Vec& x) const { return m_ * x; }
  Rotation inverse() const { return Rotation(Mat(m_.transpose())); }
  Rotation operator*(const Rotation& other) const { return Rotation(Mat(m_ * other.m_)); }

 private:
  Mat m_;
};

/// |rho| = Frobenius norm of M_rho - I.
inline double rotation_defect(const Rotation& rho) {
  return (rho.matrix() - Mat::Identity(rho.dim(), rho.dim())).norm();
}

/// Haar-distributed rotation (QR of a Gaussian matrix with sign correction).
inline Rotation random_rotation(int d, RandomStream& rng) {
  Mat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR();
  for (int j = 0; j < d; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return Rotation(q);
}

/// Random rotation with prescribed defect, via the Cayley transform of a
/// random skew matrix scaled by bisection.  Requires 0 <= defect < 2*sqrt(d).
inline Rotation random_rotation_with_defect(int d, double defect, RandomStream& rng) {
  require(defect >= 0.0, "random_rotation_with_defect: negative defect");
  if (defect == 0.0) return Rotation::identity(d);
  Mat s(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s(i, j) = rng.normal();
  s = Mat(0.5 * (s - s.transpose()));
  const Mat id = Mat::Identity(d, d);
  auto cayley = [&](double t) -> Mat {
    const Mat a = t * s;
    return (id - a).partialPivLu().solve(id + a);
  };
  double lo = 0.0, hi = 1.0;
  while ((cayley(hi) - id).norm() < defect) {
    hi *= 2.0;
    require(hi < 1e12, "random_rotation_with_defect: defect out of reach");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((cayley(mid) - id).norm() < defect) lo = mid;
    else hi = mid;
  }
  // Re-orthonormalise to clean rounding.
  Eigen::JacobiSVD<Mat> svd(cayley(0.5 * (lo + hi)), Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Rotation(Mat(svd.matrixU() * svd.matrixV().transpose()));
}

/// k-dimensional linear subspace of R^d with an orthonormal frame (d x k).
class Subspace {
 public:
  Subspace() = default;

  explicit Subspace(Mat frame) : frame_(std::move(frame)) {
    require(frame_.cols() >= 1 && frame_.cols() <= frame_.rows(), "Subspace: bad frame shape");
    const Mat gram = frame_.transpose() * frame_;
    require((gram - Mat::Identity(frame_.cols(), frame_.cols())).cwiseAbs().maxCoeff() <= 1e-12,
            "Subspace: frame columns are not orthonormal");
  }

  /// Orthonormalised span of the columns of `vectors` (must be independent).
  static Subspace span(const Mat& vectors) {
    Eigen::JacobiSVD<Mat> svd(vectors, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv.minCoeff() <= 1e-10 * std::max(1.0, sv.maxCoeff())) {
      throw DegenerateError("Subspace::span: vectors are linearly dependent");
    }
    return Subspace(Mat(svd.matrixU()));
  }

  static Subspace coordinate(int d, std::initializer_list<int> axes) {
    Mat f = Mat::Zero(d, static_cast<int>(axes.size()));
    int c = 0;
    for (int a : axes) f(a, c++) = 1.0;
    return Subspace(f);
  }

  static Subspace full(int d) { return Subspace(Mat::Identity(d, d)); }

  /// The hyperplane u^perp.
  static Subspace orthogonal_to(const Vec& u) {
    const Vec n = u.normalized();
    Eigen::JacobiSVD<Mat> svd(Mat(n.transpose()), Eigen::ComputeFullV);
    return Subspace(Mat(svd.matrixV().rightCols(n.size() - 1)));
  }

  int ambient_dim() const { return static_cast<int>(frame_.rows()); }
  int dim() const { return static_cast<int>(frame_.cols()); }
  const Mat& frame() const { return frame_; }

  Vec coordinates(const Vec& x) const { return frame_.transpose() * x; }
  Vec embed(const Vec& y) const { return frame_ * y; }
  Vec project(const Vec& x) const { return frame_ * (frame_.transpose() * x); }
  Mat projector() const { return frame_ * frame_.transpose(); }

  Subspace complement() const {
    const int d = ambient_dim();
    if (dim() == d) throw InvalidArgument("Subspace::complement: full space");
    Eigen::JacobiSVD<Mat> svd(Mat(frame_.transpose()), Eigen::ComputeFullV);
    return Subspace(Mat(svd.matrixV().rightCols(d - dim())));
  }

  Subspace rotated(const Rotation& rho) const {
    require(rho.dim() == ambient_dim(), "Subspace::rotated: dimension mismatch");
    return Subspace(Mat(rho.matrix() * frame_));
  }

 private:
  Mat frame_;
};

/// Principal-angle decomposition of a pair of equal-dimensional subspaces.
struct PrincipalDecomposition {
  Vec cosines;  ///< cos(theta_i), descending
  Vec sines;    ///< sin(theta_i), computed from the orthogonal residuals
  Mat p;        ///< principal vectors of L (d x k)
  Mat q;        ///< principal vectors of E (d x k)
};

inline PrincipalDecomposition principal_decomposition(const Subspace& L, const Subspace& E) {
  if (L.ambient_dim() != E.ambient_dim() || L.dim() != E.dim()) {
    throw InvalidArgument("principal angles: dimension mismatch");
  }
  Eigen::JacobiSVD<Mat> svd(Mat(L.frame().transpose() * E.frame()), Eigen::ComputeFullU | Eigen::ComputeFullV);
  PrincipalDecomposition out;
  out.p = L.frame() * svd.matrixU();
  out.q = E.frame() * svd.matrixV();
  out.cosines = svd.singularValues().cwiseMin(1.0);
  out.sines.resize(L.dim());
  for (int i = 0; i < L.dim(); ++i) {
    out.sines[i] = (out.q.col(i) - out.cosines[i] * out.p.col(i)).norm();
  }
  return out;
}

/// Principal angles in [0, pi/2], ascending.
inline Vec principal_angles(const Subspace& L, const Subspace& E) {
  const auto pd = principal_decomposition(L, E);
  Vec theta(L.dim());
  for (int i = 0; i < L.dim(); ++i) theta[i] = std::atan2(pd.sines[i], pd.cosines[i]);
  return theta;
}

namespace detail {

// I + sum_i [(c_i - 1) p p' - w w'/(1 + c_i) + w p' - p w'] with w = q - c p.
// Maps p_i to q_i and fixes the complement of the principal planes.
inline Mat direct_rotation_matrix(const Mat& p, const Mat& q, const Vec& cosines) {
  const int d = static_cast<int>(p.rows());
  Mat m = Mat::Identity(d, d);
  for (int i = 0; i < p.cols(); ++i) {
    const Vec pi = p.col(i);
    const Vec wi = q.col(i) - cosines[i] * pi;
    m += (cosines[i] - 1.0) * pi * pi.transpose();
    m -= wi * wi.transpose() / (1.0 + cosines[i]);
    m += wi * pi.transpose() - pi * wi.transpose();
  }
  return m;
}

inline Rotation polished_rotation(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat r = svd.matrixU() * svd.matrixV().transpose();
  if ((r - m).cwiseAbs().maxCoeff() > 1e-8) {
    throw DegenerateError("direct rotation: construction lost orthogonality");
  }
  return Rotation(r);
}

}  // namespace detail

/// Delta(L, E) = min{|rho| : rho L = E}, via the direct rotation:
/// sqrt(sum_i 8 sin^2(theta_i / 2)).
inline double delta(const Subspace& L, const Subspace& E) {
  const auto pd = principal_decomposition(L, E);
  double s = 0.0;
  for (int i = 0; i < L.dim(); ++i) {
    // 8 sin^2(t/2) = 4 (1 - cos t) = 4 sin^2 t / (1 + cos t)
    s += 4.0 * sqr(pd.sines[i]) / (1.0 + pd.cosines[i]);
  }
  return std::sqrt(s);
}

/// Subspaces closer than this in Delta are treated as equal.
inline constexpr double kSubspaceEqualityTolerance = 1e-9;

inline bool same_subspace(const Subspace& L, const Subspace& E) {
  return L.ambient_dim() == E.ambient_dim() && L.dim() == E.dim() && delta(L, E) < kSubspaceEqualityTolerance;
}

/// The direct rotation taking L onto E; |rho| = delta(L, E).
inline Rotation minimal_rotation(const Subspace& L, const Subspace& E) {
  const auto pd = principal_decomposition(L, E);
  return detail::polished_rotation(detail::direct_rotation_matrix(pd.p, pd.q, pd.cosines));
}

/// Rotations attaining delta(L, E).  Principal angles at pi/2 admit both
/// orientations of the quarter turn; each such angle doubles the family.
/// When pi/2 occurs with multiplicity, the true minimiser set is a
/// continuum and `extra_samples` random members of it are appended.
struct MinimalRotationFamily {
  std::vector<Rotation> members;
  bool generic = true;  ///< false when the minimiser is not unique
};

inline MinimalRotationFamily minimal_rotation_family(const Subspace& L, const Subspace& E, int extra_samples = 8,
                                                     double right_angle_tolerance = 1e-9) {
  auto pd = principal_decomposition(L, E);
  std::vector<int> right;
  for (int i = 0; i < L.dim(); ++i) {
    if (pd.cosines[i] < right_angle_tolerance) right.push_back(i);
  }
  MinimalRotationFamily family;
  family.generic = right.empty();
  const int flips = 1 << std::min<int>(static_cast<int>(right.size()), 6);
  for (int mask = 0; mask < flips; ++mask) {
    Mat q = pd.q;
    for (std::size_t b = 0; b < right.size() && b < 6; ++b) {
      if (mask & (1 << b)) q.col(right[b]) *= -1.0;
    }
    family.members.push_back(detail::polished_rotation(detail::direct_rotation_matrix(pd.p, q, pd.cosines)));
  }
  if (right.size() >= 2) {
    RandomStream rng(0x5eedULL + right.size());
    const int m = static_cast<int>(right.size());
    for (int s = 0; s < extra_samples; ++s) {
      // Any orthogonal map between the right-angle blocks is a minimiser.
      const Mat t = random_rotation(m, rng).matrix();
      Mat q = pd.q;
      for (int a = 0; a < m; ++a) {
        Vec col = Vec::Zero(L.ambient_dim());
        for (int b = 0; b < m; ++b) col += t(b, a) * pd.q.col(right[b]);
        q.col(right[a]) = col;
      }
      family.members.push_back(detail::polished_rotation(detail::direct_rotation_matrix(pd.p, q, pd.cosines)));
    }
  }
  return family;
}

/// L in N_theta(L*), i.e. delta(L, L*) < theta.
inline bool in_neighborhood(const Subspace& L, const Subspace& L_star, double theta) {
  require(theta > 0.0, "in_neighborhood: theta must be positive");
  return delta(L, L_star) < theta;
}

/// Uniformly distributed k-dimensional subspace of R^d.
inline Subspace random_subspace(int d, int k, RandomStream& rng) {
  Mat g(d, k);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < k; ++j) g(i, j) = rng.normal();
  return Subspace::span(g);
}

}  // namespace mosaic

#endif  // MOSAIC_GRASSMANN_HPP
