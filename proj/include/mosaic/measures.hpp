#ifndef MOSAIC_MEASURES_HPP
#define MOSAIC_MEASURES_HPP

#include "mosaic/common.hpp"
#include "mosaic/grassmann.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

namespace mosaic {

struct Atom {
  Vec dir;
  double mass = 0.0;
};

/// Finite atomic measure on the unit sphere of R^dim.
class SphericalMeasure {
 public:
  /// Directions closer than this (chordally) are the same atom.
  static constexpr double kMergeTolerance = 1e-10;

  SphericalMeasure() = default;

  SphericalMeasure(int dim, std::vector<Atom> atoms) : dim_(dim), atoms_(std::move(atoms)) {
    require(dim_ >= 1, "SphericalMeasure: dimension must be positive");
    for (const auto& a : atoms_) {
      require(a.dir.size() == dim_, "SphericalMeasure: atom has wrong dimension");
      require(std::abs(a.dir.norm() - 1.0) <= 1e-12, "SphericalMeasure: atom direction is not a unit vector");
      require(a.mass > 0.0, "SphericalMeasure: atom mass must be positive");
    }
  }

  int dim() const { return dim_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  double total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.mass;
    return s;
  }

  /// sum_i m_i |<u, u_i>|
  double integrate_abs(const Vec& u) const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.mass * std::abs(a.dir.dot(u));
    return s;
  }

  /// sum_i m_i u_i (zero for even measures).
  Vec first_moment() const {
    Vec s = Vec::Zero(dim_);
    for (const auto& a : atoms_) s += a.mass * a.dir;
    return s;
  }

  bool is_even(double tol = 1e-12) const {
    for (const auto& a : atoms_) {
      bool found = false;
      for (const auto& b : atoms_) {
        if ((a.dir + b.dir).norm() <= kMergeTolerance && std::abs(a.mass - b.mass) <= tol) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  }

  /// Dimension of the linear span of the support.
  int support_rank() const {
    if (atoms_.empty()) return 0;
    Mat m(dim_, static_cast<int>(atoms_.size()));
    for (std::size_t i = 0; i < atoms_.size(); ++i) m.col(static_cast<int>(i)) = atoms_[i].dir;
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
      if (sv[i] > 1e-9 * sv[0]) ++rank;
    }
    return rank;
  }

  bool spans() const { return support_rank() == dim_; }

  SphericalMeasure scaled(double factor) const {
    require(factor > 0.0, "SphericalMeasure::scaled: factor must be positive");
    auto atoms = atoms_;
    for (auto& a : atoms) a.mass *= factor;
    return SphericalMeasure(dim_, std::move(atoms));
  }

  SphericalMeasure normalized() const { return scaled(1.0 / total_mass()); }

  /// Image under an isometric linear map (rows = target dimension).
  SphericalMeasure mapped(const Mat& isometry) const {
    require(isometry.cols() == dim_, "SphericalMeasure::mapped: dimension mismatch");
    std::vector<Atom> atoms;
    atoms.reserve(atoms_.size());
    for (const auto& a : atoms_) {
      Vec v = isometry * a.dir;
      atoms.push_back({v / v.norm(), a.mass});
    }
    return SphericalMeasure(static_cast<int>(isometry.rows()), merge(std::move(atoms)));
  }

  /// Combine atoms whose directions coincide within kMergeTolerance.
  static std::vector<Atom> merge(std::vector<Atom> atoms) {
    std::vector<Atom> out;
    out.reserve(atoms.size());
    for (auto& a : atoms) {
      bool merged = false;
      for (auto& b : out) {
        if ((a.dir - b.dir).norm() <= kMergeTolerance) {
          b.mass += a.mass;
          merged = true;
          break;
        }
      }
      if (!merged) out.push_back(std::move(a));
    }
    return out;
  }

 private:
  int dim_ = 0;
  std::vector<Atom> atoms_;
};

/// Symmetrisation: each (u, m) contributes (u/|u|, m/2) and (-u/|u|, m/2).
inline SphericalMeasure make_even(const std::vector<std::pair<Vec, double>>& atoms) {
  if (atoms.empty()) throw InvalidArgument("make_even: empty atom list");
  const int dim = static_cast<int>(atoms.front().first.size());
  std::vector<Atom> out;
  out.reserve(2 * atoms.size());
  for (const auto& [v, m] : atoms) {
    require(v.size() == dim, "make_even: inconsistent dimensions");
    require(m > 0.0, "make_even: masses must be positive");
    const double n = v.norm();
    if (!(n > 0.0)) throw InvalidArgument("make_even: zero direction vector");
    const Vec u = v / n;
    out.push_back({u, 0.5 * m});
    out.push_back({-u, 0.5 * m});
  }
  return SphericalMeasure(dim, SphericalMeasure::merge(std::move(out)));
}

/**
 * m(phi) = min over unit u of sum_i m_i |<u, u_i>|.
 *
 * The objective is convex, positively homogeneous and linear on each cone
 * of the central arrangement {u_i^perp}.  On such a cone u -> <c,u>/|u| is
 * quasi-concave, so the minimum over the sphere sits on an extreme ray,
 * i.e. on a line cut out by d-1 independent hyperplanes u_i^perp.  We
 * enumerate all of those, which makes the result exact up to rounding.
 */
inline double nondegeneracy_m(const SphericalMeasure& phi) {
  const int d = phi.dim();
  if (phi.empty() || !phi.spans()) {
    throw DegenerateError("nondegeneracy_m: support does not span the ambient space");
  }
  // Distinct axes (directions modulo sign).
  std::vector<Vec> axes;
  for (const auto& a : phi.atoms()) {
    bool seen = false;
    for (const auto& x : axes) {
      if ((x - a.dir).norm() <= SphericalMeasure::kMergeTolerance ||
          (x + a.dir).norm() <= SphericalMeasure::kMergeTolerance) {
        seen = true;
        break;
      }
    }
    if (!seen) axes.push_back(a.dir);
  }
  if (d == 1) return phi.integrate_abs(Vec::Ones(1));

  double best = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(axes.size());
  std::vector<int> idx(d - 1);
  std::function<void(int, int)> visit = [&](int pos, int start) {
    if (pos == d - 1) {
      Vec u;
      if (d == 2) {
        u = Vec(2);
        u << -axes[idx[0]][1], axes[idx[0]][0];
      } else if (d == 3) {
        const Eigen::Vector3d a = axes[idx[0]], b = axes[idx[1]];
        const Eigen::Vector3d c = a.cross(b);
        if (c.norm() < 1e-12) return;
        u = Vec(c.normalized());
      } else {
        Mat rows(d - 1, d);
        for (int r = 0; r < d - 1; ++r) rows.row(r) = axes[idx[r]].transpose();
        Eigen::JacobiSVD<Mat> svd(rows, Eigen::ComputeFullV);
        if (svd.singularValues()[d - 2] < 1e-12) return;
        u = svd.matrixV().col(d - 1);
      }
      best = std::min(best, phi.integrate_abs(u));
      return;
    }
    for (int i = start; i < n; ++i) {
      idx[pos] = i;
      visit(pos + 1, i + 1);
    }
  };
  visit(0, 0);
  return best;
}

/**
 * Spherical projection pi_L: each atom (u, m) with u outside L^perp maps to
 * (pr_L(u), m |u|L|), expressed in the coordinates of L's frame.
 */
inline SphericalMeasure project(const SphericalMeasure& phi, const Subspace& L) {
  require(phi.dim() == L.ambient_dim(), "project: dimension mismatch");
  std::vector<Atom> out;
  for (const auto& a : phi.atoms()) {
    const Vec y = L.coordinates(a.dir);
    const double len = y.norm();
    if (len <= 1e-14) continue;
    out.push_back({y / len, a.mass * len});
  }
  return SphericalMeasure(L.dim(), SphericalMeasure::merge(std::move(out)));
}

/// Image rho(mu) of a measure living on the sphere of E, expressed in the
/// frame of L, where rho maps E onto L.
inline SphericalMeasure push_forward(const SphericalMeasure& mu, const Subspace& E, const Rotation& rho,
                                     const Subspace& L) {
  require(mu.dim() == E.dim() && E.dim() == L.dim(), "push_forward: dimension mismatch");
  const Mat map = L.frame().transpose() * rho.matrix() * E.frame();
  return mu.mapped(map);
}

namespace detail {

// Max-flow on the bipartite network source -> mu atoms -> nu atoms -> sink,
// where the middle edges join atoms at chordal distance < eps.
inline double prokhorov_max_flow(const SphericalMeasure& mu, const SphericalMeasure& nu, double eps) {
  const int n = static_cast<int>(mu.size());
  const int m = static_cast<int>(nu.size());
  const int nodes = n + m + 2;
  const int source = n + m, sink = n + m + 1;
  struct Edge {
    int to;
    double cap;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> graph(nodes);
  auto add_edge = [&](int a, int b, double cap) {
    graph[a].push_back(static_cast<int>(edges.size()));
    edges.push_back({b, cap});
    graph[b].push_back(static_cast<int>(edges.size()));
    edges.push_back({a, 0.0});
  };
  const double big = mu.total_mass() + nu.total_mass() + 1.0;
  for (int i = 0; i < n; ++i) add_edge(source, i, mu.atoms()[i].mass);
  for (int j = 0; j < m; ++j) add_edge(n + j, sink, nu.atoms()[j].mass);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if ((mu.atoms()[i].dir - nu.atoms()[j].dir).norm() < eps) add_edge(i, n + j, big);

  constexpr double kTiny = 1e-15;
  double flow = 0.0;
  std::vector<int> level(nodes), iter(nodes);
  auto bfs = [&]() {
    std::fill(level.begin(), level.end(), -1);
    std::queue<int> q;
    level[source] = 0;
    q.push(source);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int e : graph[v]) {
        if (edges[e].cap > kTiny && level[edges[e].to] < 0) {
          level[edges[e].to] = level[v] + 1;
          q.push(edges[e].to);
        }
      }
    }
    return level[sink] >= 0;
  };
  std::function<double(int, double)> dfs = [&](int v, double f) -> double {
    if (v == sink) return f;
    for (int& i = iter[v]; i < static_cast<int>(graph[v].size()); ++i) {
      const int e = graph[v][i];
      if (edges[e].cap > kTiny && level[v] < level[edges[e].to]) {
        const double d = dfs(edges[e].to, std::min(f, edges[e].cap));
        if (d > kTiny) {
          edges[e].cap -= d;
          edges[e ^ 1].cap += d;
          return d;
        }
      }
    }
    return 0.0;
  };
  while (bfs()) {
    std::fill(iter.begin(), iter.end(), 0);
    for (;;) {
      const double f = dfs(source, big);
      if (f <= kTiny) break;
      flow += f;
    }
  }
  return flow;
}

// Direct check of mu(A) <= nu(A_eps) + eps over every subset A of supp(mu).
inline bool prokhorov_one_sided_subsets(const SphericalMeasure& mu, const SphericalMeasure& nu, double eps) {
  const int n = static_cast<int>(mu.size());
  const int m = static_cast<int>(nu.size());
  std::vector<std::uint64_t> nb(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if ((mu.atoms()[i].dir - nu.atoms()[j].dir).norm() < eps) nb[i] |= (std::uint64_t{1} << j);
  const std::uint64_t subsets = std::uint64_t{1} << n;
  std::vector<double> mu_mass(subsets, 0.0);
  std::vector<std::uint64_t> reach(subsets, 0);
  for (std::uint64_t s = 1; s < subsets; ++s) {
    const int low = std::countr_zero(s);
    const std::uint64_t rest = s & (s - 1);
    mu_mass[s] = mu_mass[rest] + mu.atoms()[low].mass;
    reach[s] = reach[rest] | nb[low];
    double nu_mass = 0.0;
    for (std::uint64_t r = reach[s]; r; r &= r - 1) nu_mass += nu.atoms()[std::countr_zero(r)].mass;
    if (mu_mass[s] > nu_mass + eps + 1e-15) return false;
  }
  return true;
}

}  // namespace detail

/// Supports up to this size use subset enumeration; larger ones use max-flow.
inline constexpr std::size_t kProkhorovSubsetLimit = 12;

/// Both Prokhorov inequalities at level eps, by max-flow (Strassen):
/// feasible iff maxflow >= max(mu(S), nu(S)) - eps.
inline bool prokhorov_feasible_flow(const SphericalMeasure& mu, const SphericalMeasure& nu, double eps) {
  const double flow = detail::prokhorov_max_flow(mu, nu, eps);
  return flow + eps + 1e-13 >= std::max(mu.total_mass(), nu.total_mass());
}

inline bool prokhorov_feasible_subsets(const SphericalMeasure& mu, const SphericalMeasure& nu, double eps) {
  require(mu.size() <= 24 && nu.size() <= 24, "prokhorov_feasible_subsets: support too large");
  return detail::prokhorov_one_sided_subsets(mu, nu, eps) && detail::prokhorov_one_sided_subsets(nu, mu, eps);
}

inline bool prokhorov_feasible(const SphericalMeasure& mu, const SphericalMeasure& nu, double eps) {
  if (mu.size() <= kProkhorovSubsetLimit && nu.size() <= kProkhorovSubsetLimit) {
    return prokhorov_feasible_subsets(mu, nu, eps);
  }
  return prokhorov_feasible_flow(mu, nu, eps);
}

/// Prokhorov distance, returned as the feasible end of a bisection bracket
/// of width <= tol (so the result exceeds the infimum by at most tol).
inline double prokhorov(const SphericalMeasure& mu, const SphericalMeasure& nu, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("prokhorov: tol must be positive");
  require(mu.dim() == nu.dim(), "prokhorov: measures live on different spheres");
  double lo = 0.0;
  // At eps = max total mass both inequalities hold trivially.
  double hi = std::max(mu.total_mass(), nu.total_mass()) + tol;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (prokhorov_feasible(mu, nu, mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

}  // namespace mosaic

#endif  // MOSAIC_MEASURES_HPP
