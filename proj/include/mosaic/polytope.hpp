#ifndef MOSAIC_POLYTOPE_HPP
#define MOSAIC_POLYTOPE_HPP

#include "mosaic/common.hpp"
#include "mosaic/grassmann.hpp"
#include "mosaic/lp.hpp"
#include "mosaic/measures.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

namespace mosaic {

/// The closed halfspace {x : <x, normal> <= offset}.
struct Halfspace {
  Vec normal;
  double offset = 0.0;
};

struct Facet {
  Vec normal;                ///< outward unit normal, carrier coordinates
  double offset = 0.0;       ///< support value h(P, normal)
  double measure = 0.0;      ///< (k-1)-volume
  std::vector<int> vertices; ///< k = 2: the two endpoints; k = 3: boundary loop, counter-clockwise seen from outside
};

/**
 * Bounded convex polytope, full-dimensional inside its carrier subspace L.
 *
 * Geometry is stored in the coordinates of L's orthonormal frame; ambient
 * points are frame * local.  Only k in {2, 3} is supported.
 */
class Polytope {
 public:
  Polytope() = default;

  Polytope(Subspace carrier, std::vector<Vec> vertices, std::vector<Facet> facets, bool clipped = false)
      : carrier_(std::move(carrier)), vertices_(std::move(vertices)), facets_(std::move(facets)), clipped_(clipped) {
    validate();
  }

  const Subspace& carrier() const { return carrier_; }
  int dim() const { return carrier_.dim(); }
  int ambient_dim() const { return carrier_.ambient_dim(); }
  const std::vector<Vec>& local_vertices() const { return vertices_; }
  const std::vector<Facet>& facets() const { return facets_; }
  bool clipped() const { return clipped_; }

  std::vector<Vec> vertices() const {
    std::vector<Vec> out;
    out.reserve(vertices_.size());
    for (const auto& v : vertices_) out.push_back(carrier_.embed(v));
    return out;
  }

  /// Largest |coordinate| of any vertex; sets the scale for tolerances.
  double scale() const {
    double s = 0.0;
    for (const auto& v : vertices_) s = std::max(s, v.cwiseAbs().maxCoeff());
    return s;
  }

  /// Local coordinates of a direction given either locally (size k) or in
  /// the ambient space (size d).
  Vec to_local(const Vec& u) const {
    if (u.size() == dim()) return u;
    require(u.size() == ambient_dim(), "Polytope: direction has wrong dimension");
    return carrier_.coordinates(u);
  }

  bool contains_local(const Vec& x, double tol = 1e-9) const {
    for (const auto& f : facets_) {
      if (f.normal.dot(x) > f.offset + tol) return false;
    }
    return true;
  }

  Polytope translated(const Vec& z_local) const {
    Polytope p = *this;
    for (auto& v : p.vertices_) v += z_local;
    for (auto& f : p.facets_) f.offset += f.normal.dot(z_local);
    return p;
  }

  Polytope scaled(double factor) const {
    require(factor > 0.0, "Polytope::scaled: factor must be positive");
    Polytope p = *this;
    for (auto& v : p.vertices_) v *= factor;
    for (auto& f : p.facets_) {
      f.offset *= factor;
      f.measure *= std::pow(factor, dim() - 1);
    }
    return p;
  }

  /// The point reflection -P.
  Polytope negated() const {
    Polytope p = *this;
    for (auto& v : p.vertices_) v = -v;
    for (auto& f : p.facets_) {
      f.normal = -f.normal;
      if (dim() == 3) std::reverse(f.vertices.begin(), f.vertices.end());
    }
    return p;
  }

  /// rho P, carried by rho L; local coordinates are unchanged.
  Polytope rotated(const Rotation& rho) const {
    Polytope p = *this;
    p.carrier_ = carrier_.rotated(rho);
    return p;
  }

  /// The same body expressed in another frame of the same subspace.
  Polytope in_frame(const Subspace& frame) const {
    if (!same_subspace(frame, carrier_)) throw InvalidArgument("Polytope::in_frame: different subspace");
    const Mat q = frame.frame().transpose() * carrier_.frame();
    Polytope p = *this;
    p.carrier_ = frame;
    for (auto& v : p.vertices_) v = q * v;
    for (auto& f : p.facets_) {
      f.normal = q * f.normal;
      f.normal.normalize();
    }
    const double det = q.determinant();
    if (det < 0 && dim() == 3) {
      for (auto& f : p.facets_) std::reverse(f.vertices.begin(), f.vertices.end());
    }
    if (det < 0 && dim() == 2) {
      // Keep vertex order counter-clockwise.
      std::reverse(p.vertices_.begin(), p.vertices_.end());
      const int n = static_cast<int>(p.vertices_.size());
      for (auto& f : p.facets_) {
        for (int& i : f.vertices) i = n - 1 - i;
        std::swap(f.vertices[0], f.vertices[1]);
      }
    }
    return p;
  }

  bool is_origin_symmetric(double tol = 1e-9) const {
    const double t = tol * std::max(1.0, scale());
    for (const auto& v : vertices_) {
      bool found = false;
      for (const auto& w : vertices_) {
        if ((v + w).norm() <= t) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  }

 private:
  void validate() const {
    const int k = dim();
    require(k == 2 || k == 3, "Polytope: only dimensions 2 and 3 are supported");
    require(vertices_.size() >= static_cast<std::size_t>(k + 1), "Polytope: too few vertices");
    require(facets_.size() >= static_cast<std::size_t>(k + 1), "Polytope: too few facets");
    const double s = std::max(1.0, scale());
    Vec closure = Vec::Zero(k);
    double total = 0.0;
    for (const auto& f : facets_) {
      require(f.normal.size() == k && std::abs(f.normal.norm() - 1.0) <= 1e-9, "Polytope: bad facet normal");
      require(f.measure > 0.0, "Polytope: facet measure must be positive");
      require(f.vertices.size() >= static_cast<std::size_t>(k) || (k == 2 && f.vertices.size() == 2),
              "Polytope: facet supports too few vertices");
      closure += f.measure * f.normal;
      total += f.measure;
    }
    for (const auto& v : vertices_) {
      require(v.size() == k, "Polytope: vertex has wrong dimension");
      for (const auto& f : facets_) {
        require(f.normal.dot(v) <= f.offset + 1e-9 * s, "Polytope: vertex violates a facet inequality");
      }
    }
    require(closure.norm() <= 1e-8 * std::max(1.0, total), "Polytope: surface area measure is not closed");
  }

  Subspace carrier_;
  std::vector<Vec> vertices_;
  std::vector<Facet> facets_;
  bool clipped_ = false;
};

namespace detail {

// Labels >= 0 index the caller's halfspaces; box facets are -1 - j.
struct LabelledPlane {
  Vec normal;
  double offset;
};

inline std::vector<LabelledPlane> box_planes(int k, double bound) {
  std::vector<LabelledPlane> planes;
  for (int j = 0; j < k; ++j) {
    Vec n = Vec::Zero(k);
    n[j] = 1.0;
    planes.push_back({n, bound});
    planes.push_back({-n, bound});
  }
  return planes;
}

struct Polygon2 {
  std::vector<Eigen::Vector2d> pts;  // counter-clockwise
  std::vector<int> labels;           // label of edge pts[i] -> pts[i+1]
};

inline Polygon2 box_polygon(double b) {
  Polygon2 p;
  p.pts = {{-b, -b}, {b, -b}, {b, b}, {-b, b}};
  // edges: bottom (-e2), right (+e1), top (+e2), left (-e1)
  p.labels = {-1 - 3, -1 - 0, -1 - 2, -1 - 1};
  return p;
}

/// Clip a convex polygon by <x, n> <= t.  Returns false if nothing is left.
inline bool clip_polygon(Polygon2& poly, const Eigen::Vector2d& n, double t, int label, double slack) {
  const int m = static_cast<int>(poly.pts.size());
  std::vector<double> s(m);
  bool any_out = false, any_in = false;
  for (int i = 0; i < m; ++i) {
    s[i] = poly.pts[i].dot(n) - t;
    if (std::abs(s[i]) <= slack) s[i] = 0.0;
    if (s[i] > 0) any_out = true;
    if (s[i] < 0) any_in = true;
  }
  if (!any_out) return true;
  if (!any_in) return false;
  Polygon2 out;
  for (int i = 0; i < m; ++i) {
    const int j = (i + 1) % m;
    const double sc = s[i], sn = s[j];
    if (sc <= 0) {
      if (sn > 0) {
        if (sc == 0) {
          out.pts.push_back(poly.pts[i]);
          out.labels.push_back(label);
        } else {
          out.pts.push_back(poly.pts[i]);
          out.labels.push_back(poly.labels[i]);
          const double a = sc / (sc - sn);
          out.pts.push_back(poly.pts[i] + a * (poly.pts[j] - poly.pts[i]));
          out.labels.push_back(label);
        }
      } else {
        out.pts.push_back(poly.pts[i]);
        out.labels.push_back(poly.labels[i]);
      }
    } else if (sn < 0) {
      // Entering: intersection computed from the inside vertex for symmetry.
      const double a = sn / (sn - sc);
      out.pts.push_back(poly.pts[j] + a * (poly.pts[i] - poly.pts[j]));
      out.labels.push_back(poly.labels[i]);
    }
  }
  poly = std::move(out);
  return poly.pts.size() >= 3;
}

inline double polygon_area(const std::vector<Eigen::Vector2d>& pts) {
  double a = 0.0;
  const int m = static_cast<int>(pts.size());
  for (int i = 0; i < m; ++i) {
    const auto& p = pts[i];
    const auto& q = pts[(i + 1) % m];
    a += p.x() * q.y() - p.y() * q.x();
  }
  return 0.5 * a;
}

struct Face3 {
  std::vector<int> loop;
  int label;
};

struct Polyhedron3 {
  std::vector<Eigen::Vector3d> verts;
  std::vector<Face3> faces;
};

inline Polyhedron3 box_polyhedron(double b) {
  Polyhedron3 p;
  for (int i = 0; i < 8; ++i) {
    p.verts.emplace_back((i & 1) ? b : -b, (i & 2) ? b : -b, (i & 4) ? b : -b);
  }
  // Loops counter-clockwise seen from outside.  Labels: -1-(2j) is +e_j, -1-(2j+1) is -e_j.
  p.faces = {
      {{1, 3, 7, 5}, -1 - 0},  // +x
      {{0, 4, 6, 2}, -1 - 1},  // -x
      {{2, 6, 7, 3}, -1 - 2},  // +y
      {{0, 1, 5, 4}, -1 - 3},  // -y
      {{4, 5, 7, 6}, -1 - 4},  // +z
      {{0, 2, 3, 1}, -1 - 5},  // -z
  };
  return p;
}

inline bool clip_polyhedron(Polyhedron3& poly, const Eigen::Vector3d& n, double t, int label, double slack) {
  const int nv = static_cast<int>(poly.verts.size());
  std::vector<double> s(nv);
  bool any_out = false, any_in = false;
  std::vector<char> used(nv, 0);
  for (const auto& f : poly.faces)
    for (int i : f.loop) used[i] = 1;
  for (int i = 0; i < nv; ++i) {
    if (!used[i]) {
      s[i] = 0;
      continue;
    }
    s[i] = poly.verts[i].dot(n) - t;
    if (std::abs(s[i]) <= slack) s[i] = 0.0;
    if (s[i] > 0) any_out = true;
    if (s[i] < 0) any_in = true;
  }
  if (!any_out) return true;
  if (!any_in) return false;

  std::map<std::pair<int, int>, int> cut_vertex;
  auto crossing = [&](int a, int b) {
    // a inside (s < 0), b outside (s > 0)
    const auto key = std::minmax(a, b);
    auto it = cut_vertex.find(key);
    if (it != cut_vertex.end()) return it->second;
    const double w = s[a] / (s[a] - s[b]);
    poly.verts.push_back(poly.verts[a] + w * (poly.verts[b] - poly.verts[a]));
    s.push_back(0.0);
    const int idx = static_cast<int>(poly.verts.size()) - 1;
    cut_vertex.emplace(key, idx);
    return idx;
  };

  std::vector<Face3> faces;
  std::vector<int> on_plane;
  for (const auto& f : poly.faces) {
    Face3 g{{}, f.label};
    const int m = static_cast<int>(f.loop.size());
    for (int i = 0; i < m; ++i) {
      const int a = f.loop[i], b = f.loop[(i + 1) % m];
      if (s[a] <= 0) g.loop.push_back(a);
      if ((s[a] < 0 && s[b] > 0)) g.loop.push_back(crossing(a, b));
      if ((s[a] > 0 && s[b] < 0)) g.loop.push_back(crossing(b, a));
    }
    if (g.loop.size() >= 3) faces.push_back(std::move(g));
  }
  for (int i = 0; i < static_cast<int>(poly.verts.size()); ++i) {
    if (i < nv && !used[i]) continue;
    if (s[i] == 0.0) on_plane.push_back(i);
  }
  if (on_plane.size() >= 3) {
    // Cap face: order the points in the cutting plane by angle.
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (int i : on_plane) c += poly.verts[i];
    c /= static_cast<double>(on_plane.size());
    Eigen::Vector3d e1 = n.unitOrthogonal();
    Eigen::Vector3d e2 = n.cross(e1);
    std::vector<std::pair<double, int>> order;
    for (int i : on_plane) {
      const Eigen::Vector3d r = poly.verts[i] - c;
      order.emplace_back(std::atan2(r.dot(e2), r.dot(e1)), i);
    }
    std::sort(order.begin(), order.end());
    Face3 cap{{}, label};
    for (const auto& [ang, i] : order) cap.loop.push_back(i);
    faces.push_back(std::move(cap));
  }
  poly.faces = std::move(faces);
  return poly.faces.size() >= 4;
}

inline Eigen::Vector3d loop_area_vector(const Polyhedron3& poly, const std::vector<int>& loop) {
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  const int m = static_cast<int>(loop.size());
  for (int i = 0; i < m; ++i) a += poly.verts[loop[i]].cross(poly.verts[loop[(i + 1) % m]]);
  return 0.5 * a;
}

inline Vec to_vec(const Eigen::Vector2d& v) { return Vec(v); }
inline Vec to_vec(const Eigen::Vector3d& v) { return Vec(v); }

}  // namespace detail

/**
 * Intersection of halfspaces with the box [-bound, bound]^k in the
 * coordinates of L, by incremental clipping.
 *
 * Halfspace normals may be given in L's coordinates (size k) or in the
 * ambient space (size d); ambient ones are restricted to L, i.e. the result
 * is H^- cap L.  Vertices within 1e-10 (relative) of a cutting plane are
 * snapped onto it.  The result is flagged `clipped` if a box facet survives.
 */
inline Polytope intersect_halfspaces(const Subspace& L, const std::vector<Halfspace>& hs, double bound) {
  const int k = L.dim();
  require(k == 2 || k == 3, "intersect_halfspaces: carrier dimension must be 2 or 3");
  require(bound > 0.0, "intersect_halfspaces: bound must be positive");

  // Restrict to L and normalise.
  std::vector<detail::LabelledPlane> planes;
  std::vector<int> labels;
  planes.reserve(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    Vec n = hs[i].normal.size() == k ? hs[i].normal : L.coordinates(hs[i].normal);
    require(hs[i].normal.size() == k || hs[i].normal.size() == L.ambient_dim(),
            "intersect_halfspaces: normal has wrong dimension");
    const double len = n.norm();
    if (len <= 1e-14) {
      if (hs[i].offset >= 0.0) continue;  // contains L entirely
      throw EmptyPolytopeError("intersect_halfspaces: halfspace misses the carrier");
    }
    planes.push_back({n / len, hs[i].offset / len});
    labels.push_back(static_cast<int>(i));
  }
  const auto box = detail::box_planes(k, bound);
  auto plane_of = [&](int label) -> const detail::LabelledPlane& {
    if (label >= 0) return planes[static_cast<std::size_t>(label)];
    return box[static_cast<std::size_t>(-1 - label)];
  };
  const double slack = 1e-10 * std::max(1.0, bound);

  std::vector<Vec> verts;
  std::vector<Facet> facets;
  bool clipped = false;

  if (k == 2) {
    auto poly = detail::box_polygon(bound);
    for (std::size_t i = 0; i < planes.size(); ++i) {
      const Eigen::Vector2d n(planes[i].normal[0], planes[i].normal[1]);
      if (!detail::clip_polygon(poly, n, planes[i].offset, static_cast<int>(i), slack)) {
        throw EmptyPolytopeError("intersect_halfspaces: empty interior");
      }
    }
    // Drop vanishing edges.
    const double min_len = 1e-13 * std::max(1.0, bound);
    detail::Polygon2 clean;
    const int m = static_cast<int>(poly.pts.size());
    for (int i = 0; i < m; ++i) {
      const auto& p = poly.pts[i];
      const auto& q = poly.pts[(i + 1) % m];
      if ((q - p).norm() > min_len) {
        clean.pts.push_back(p);
        clean.labels.push_back(poly.labels[i]);
      }
    }
    if (clean.pts.size() < 3 || detail::polygon_area(clean.pts) <= 0.0) {
      throw EmptyPolytopeError("intersect_halfspaces: empty interior");
    }
    const int c = static_cast<int>(clean.pts.size());
    for (int i = 0; i < c; ++i) verts.push_back(detail::to_vec(clean.pts[i]));
    for (int i = 0; i < c; ++i) {
      const int j = (i + 1) % c;
      const auto& pl = plane_of(clean.labels[i]);
      if (clean.labels[i] < 0) clipped = true;
      facets.push_back({pl.normal, pl.normal.dot(0.5 * (verts[i] + verts[j])), (verts[j] - verts[i]).norm(), {i, j}});
    }
  } else {
    auto poly = detail::box_polyhedron(bound);
    for (std::size_t i = 0; i < planes.size(); ++i) {
      const Eigen::Vector3d n(planes[i].normal[0], planes[i].normal[1], planes[i].normal[2]);
      if (!detail::clip_polyhedron(poly, n, planes[i].offset, static_cast<int>(i), slack)) {
        throw EmptyPolytopeError("intersect_halfspaces: empty interior");
      }
    }
    const double min_area = 1e-24 * std::max(1.0, bound * bound) + 0.0;
    std::vector<int> remap(poly.verts.size(), -1);
    for (const auto& f : poly.faces) {
      const Eigen::Vector3d av = detail::loop_area_vector(poly, f.loop);
      const double area = av.norm();
      if (area <= std::max(min_area, 1e-14 * bound * bound)) continue;
      Facet facet;
      const auto& pl = plane_of(f.label);
      if (f.label < 0) clipped = true;
      facet.normal = pl.normal;
      facet.measure = area;
      Eigen::Vector3d mean = Eigen::Vector3d::Zero();
      for (int i : f.loop) {
        if (remap[i] < 0) {
          remap[i] = static_cast<int>(verts.size());
          verts.push_back(detail::to_vec(poly.verts[i]));
        }
        facet.vertices.push_back(remap[i]);
        mean += poly.verts[i];
      }
      mean /= static_cast<double>(f.loop.size());
      facet.offset = facet.normal.dot(Vec(mean));
      facets.push_back(std::move(facet));
    }
    if (facets.size() < 4) throw EmptyPolytopeError("intersect_halfspaces: empty interior");
  }
  return Polytope(L, std::move(verts), std::move(facets), clipped);
}

/// Facet halfspaces of P, in carrier coordinates.
inline std::vector<Halfspace> facet_halfspaces(const Polytope& P) {
  std::vector<Halfspace> hs;
  for (const auto& f : P.facets()) hs.push_back({f.normal, f.offset});
  return hs;
}

/// k-dimensional volume: shoelace for k = 2, (1/3) sum offset * area for k = 3.
inline double volume(const Polytope& P) {
  if (P.dim() == 2) {
    const auto& v = P.local_vertices();
    double a = 0.0;
    const int m = static_cast<int>(v.size());
    for (int i = 0; i < m; ++i) {
      const auto& p = v[i];
      const auto& q = v[(i + 1) % m];
      a += p[0] * q[1] - p[1] * q[0];
    }
    return 0.5 * a;
  }
  double v = 0.0;
  for (const auto& f : P.facets()) v += f.offset * f.measure;
  return v / 3.0;
}

/// h(P, u) = max over vertices of <v, u>; u in carrier or ambient coordinates.
inline double support(const Polytope& P, const Vec& u) {
  const Vec w = P.to_local(u);
  double h = -std::numeric_limits<double>::infinity();
  for (const auto& v : P.local_vertices()) h = std::max(h, v.dot(w));
  return h;
}

/// S^L_{k-1}(P, .) as an atomic measure on the sphere of the carrier.
inline SphericalMeasure surface_area_measure(const Polytope& P) {
  std::vector<Atom> atoms;
  for (const auto& f : P.facets()) atoms.push_back({f.normal, f.measure});
  return SphericalMeasure(P.dim(), SphericalMeasure::merge(std::move(atoms)));
}

/// Volume-weighted barycentre (local coordinates).
inline Vec centroid(const Polytope& P) {
  const auto& v = P.local_vertices();
  if (P.dim() == 2) {
    double a = 0.0;
    Vec c = Vec::Zero(2);
    const int m = static_cast<int>(v.size());
    const Vec o = v[0];
    for (int i = 1; i + 1 < m; ++i) {
      const Vec p = v[i] - o, q = v[i + 1] - o;
      const double t = 0.5 * (p[0] * q[1] - p[1] * q[0]);
      a += t;
      c += t * (v[0] + v[i] + v[i + 1]) / 3.0;
    }
    return c / a;
  }
  Vec ref = Vec::Zero(3);
  for (const auto& x : v) ref += x;
  ref /= static_cast<double>(v.size());
  double vol = 0.0;
  Vec c = Vec::Zero(3);
  for (const auto& f : P.facets()) {
    const auto& loop = f.vertices;
    for (std::size_t i = 1; i + 1 < loop.size(); ++i) {
      const Eigen::Vector3d a = v[loop[0]] - ref, b = v[loop[i]] - ref, d = v[loop[i + 1]] - ref;
      const double t = a.dot(b.cross(d)) / 6.0;
      vol += t;
      c += t * (ref + v[loop[0]] + v[loop[i]] + v[loop[i + 1]]) / 4.0;
    }
  }
  return c / vol;
}

/// Centroid embedded in the ambient space.
inline Vec centroid_ambient(const Polytope& P) { return P.carrier().embed(centroid(P)); }

struct Radii {
  double inradius = 0.0;
  double circumradius = 0.0;
  Vec center;  ///< local coordinates of the inball centre
};

/**
 * Inradius and circumradius.  o-symmetric bodies use centre o; otherwise
 * the Chebyshev centre (max r with <n_i, c> + r <= t_i) is found by LP and
 * R is the largest vertex distance from it.
 */
inline Radii inradius_circumradius(const Polytope& P) {
  Radii out;
  const int k = P.dim();
  if (P.is_origin_symmetric()) {
    out.center = Vec::Zero(k);
    out.inradius = std::numeric_limits<double>::infinity();
    for (const auto& f : P.facets()) out.inradius = std::min(out.inradius, f.offset);
  } else {
    const Vec g = centroid(P);
    const int m = static_cast<int>(P.facets().size());
    // Variables: y+ (k), y- (k), r.  c = g + y+ - y-.
    Mat A(m, 2 * k + 1);
    Vec b(m), c = Vec::Zero(2 * k + 1);
    for (int i = 0; i < m; ++i) {
      const auto& f = P.facets()[i];
      A.block(i, 0, 1, k) = f.normal.transpose();
      A.block(i, k, 1, k) = -f.normal.transpose();
      A(i, 2 * k) = 1.0;
      b[i] = f.offset - f.normal.dot(g);
    }
    c[2 * k] = 1.0;
    const auto res = lp::maximize(A, b, c);
    if (res.status != lp::Status::optimal) throw DegenerateError("inradius: LP failed");
    out.center = g + res.x.head(k) - res.x.segment(k, k);
    out.inradius = res.x[2 * k];
  }
  for (const auto& v : P.local_vertices()) out.circumradius = std::max(out.circumradius, (v - out.center).norm());
  return out;
}

/// D(P) = lin(P - P), which is the carrier.
inline const Subspace& direction_space(const Polytope& P) { return P.carrier(); }

/// Diameter (largest vertex distance).
inline double diameter(const Polytope& P) {
  double d = 0.0;
  const auto& v = P.local_vertices();
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, (v[i] - v[j]).norm());
  return d;
}

}  // namespace mosaic

#endif  // MOSAIC_POLYTOPE_HPP
