#ifndef MOSAIC_ARRANGEMENT_HPP
#define MOSAIC_ARRANGEMENT_HPP

#include "mosaic/common.hpp"
#include "mosaic/grassmann.hpp"
#include "mosaic/polytope.hpp"
#include "mosaic/process.hpp"
#include "mosaic/random.hpp"

#include <functional>
#include <map>
#include <vector>

namespace mosaic {

/// A 2-face of the tessellation restricted to the window.
struct ArrangementFace {
  Polytope face;     ///< in the plane's direction space, coordinates relative to `base`
  Vec base;          ///< foot point t u of the supporting plane
  int plane = -1;
  bool interior = false;  ///< touches no window boundary
  double weight = 0.0;    ///< A(T) / A(T eroded by F) for interior faces, else 0
};

struct PlaneTrace {
  Hyperplane plane;
  Subspace direction;     ///< u^perp
  double trace_area = 0.0;
  int euler_characteristic = 0;  ///< V - E + F of the bounded complex in the trace
};

struct FaceComplex {
  double window = 0.0;  ///< half-width W of the box [-W, W]^3
  std::vector<Hyperplane> planes;
  std::vector<PlaneTrace> traces;
  std::vector<ArrangementFace> faces;

  std::size_t interior_count() const {
    std::size_t n = 0;
    for (const auto& f : faces) n += f.interior ? 1 : 0;
    return n;
  }
};

namespace detail {

inline constexpr int kWindowLabel = -100;  // window edges carry labels <= kWindowLabel

// A convex polygon (counter-clockwise) as a Polytope in L.
inline Polytope polygon_polytope(const Subspace& L, const std::vector<Eigen::Vector2d>& pts_in) {
  double scale = 0.0;
  for (const auto& p : pts_in) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double min_len = 1e-12 * std::max(1.0, scale);
  std::vector<Eigen::Vector2d> pts;
  for (const auto& p : pts_in) {
    if (pts.empty() || (p - pts.back()).norm() > min_len) pts.push_back(p);
  }
  while (pts.size() > 1 && (pts.front() - pts.back()).norm() <= min_len) pts.pop_back();
  if (pts.size() < 3 || polygon_area(pts) <= 0.0) throw DegenerateError("arrangement: degenerate face");
  const int m = static_cast<int>(pts.size());
  std::vector<Vec> verts;
  for (const auto& p : pts) verts.push_back(to_vec(p));
  std::vector<Facet> facets;
  for (int i = 0; i < m; ++i) {
    const int j = (i + 1) % m;
    const Eigen::Vector2d e = pts[j] - pts[i];
    Vec n(2);
    n << e.y(), -e.x();
    const double len = n.norm();
    n /= len;
    facets.push_back({n, n.dot(0.5 * (verts[i] + verts[j])), len, {i, j}});
  }
  return Polytope(L, std::move(verts), std::move(facets));
}

// V - E + F of a planar cell complex whose cells meet edge-to-edge.
inline int euler_characteristic(const std::vector<Polygon2>& cells, double tol) {
  std::vector<Eigen::Vector2d> points;
  auto vertex_id = [&](const Eigen::Vector2d& p) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if ((points[i] - p).norm() <= tol) return static_cast<int>(i);
    }
    points.push_back(p);
    return static_cast<int>(points.size() - 1);
  };
  std::map<std::pair<int, int>, int> edges;
  for (const auto& c : cells) {
    const int m = static_cast<int>(c.pts.size());
    std::vector<int> ids;
    for (const auto& p : c.pts) ids.push_back(vertex_id(p));
    for (int i = 0; i < m; ++i) {
      const int a = ids[i], b = ids[(i + 1) % m];
      if (a == b) continue;
      edges[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  return static_cast<int>(points.size()) - static_cast<int>(edges.size()) + static_cast<int>(cells.size());
}

}  // namespace detail

/**
 * 2-faces of the arrangement of `planes` inside the window [-W, W]^3.
 *
 * Each plane carries the line arrangement cut out by the other planes; its
 * cells are the 2-faces.  A face is interior when none of its edges lies on
 * the window boundary.  Interior faces get the Horvitz-Thompson weight
 * A(T) / A(T eroded by F - c(F)), T the plane's window trace and c the
 * centroid, which makes minus-sampling unbiased for size-dependent
 * statistics.
 */
inline FaceComplex build_face_complex(const std::vector<Hyperplane>& planes, double W) {
  require(W > 0.0, "build_face_complex: window half-width must be positive");
  FaceComplex out;
  out.window = W;
  out.planes = planes;
  const double big = 4.0 * W;
  const double slack = 1e-11 * W;
  const double degenerate_tol = 1e-9;

  for (std::size_t pi = 0; pi < planes.size(); ++pi) {
    require(planes[pi].normal.size() == 3, "build_face_complex: planes must live in R^3");
    const Vec u = planes[pi].normal.normalized();
    const Vec base = planes[pi].offset / planes[pi].normal.norm() * u;
    const Subspace dir = Subspace::orthogonal_to(u);
    const Mat& B = dir.frame();

    // Window trace: |<base + B y, e_j>| <= W.
    detail::Polygon2 trace = detail::box_polygon(big);
    std::vector<std::pair<Eigen::Vector2d, double>> trace_planes;
    bool empty = false;
    for (int j = 0; j < 3 && !empty; ++j) {
      for (int s : {1, -1}) {
        const Eigen::Vector2d n(s * B(j, 0), s * B(j, 1));
        const double t = W - s * base[j];
        const double len = n.norm();
        if (len <= 1e-14) {
          if (t < 0.0) empty = true;
          continue;
        }
        trace_planes.push_back({n / len, t / len});
        if (!detail::clip_polygon(trace, n / len, t / len, detail::kWindowLabel - (2 * j + (s < 0)), slack)) {
          empty = true;
          break;
        }
      }
    }
    if (empty || trace.pts.size() < 3 || detail::polygon_area(trace.pts) <= 1e-14 * W * W) continue;
    const double trace_area = detail::polygon_area(trace.pts);

    // Lines from the other planes.
    std::vector<std::pair<Eigen::Vector2d, double>> lines;
    std::vector<int> line_label;
    for (std::size_t pj = 0; pj < planes.size(); ++pj) {
      if (pj == pi) continue;
      const Vec v = planes[pj].normal.normalized();
      const double tv = planes[pj].offset / planes[pj].normal.norm();
      const Eigen::Vector2d n(B.col(0).dot(v), B.col(1).dot(v));
      const double len = n.norm();
      if (len <= degenerate_tol) {
        if (std::abs(tv - base.dot(v)) <= degenerate_tol * std::max(1.0, W)) {
          throw DegenerateError("build_face_complex: coincident planes; perturb the input");
        }
        continue;  // parallel planes
      }
      const Eigen::Vector2d nn = n / len;
      const double c = (tv - base.dot(v)) / len;
      for (std::size_t q = 0; q < lines.size(); ++q) {
        const double cr = lines[q].first.x() * nn.y() - lines[q].first.y() * nn.x();
        if (std::abs(cr) <= degenerate_tol) {
          const double dot = lines[q].first.dot(nn);
          if (std::abs(lines[q].second - dot * c) <= degenerate_tol * std::max(1.0, W)) {
            throw DegenerateError("build_face_complex: three planes share a line; perturb the input");
          }
        }
      }
      lines.push_back({nn, c});
      line_label.push_back(static_cast<int>(pj));
    }

    std::vector<detail::Polygon2> cells{trace};
    for (std::size_t li = 0; li < lines.size(); ++li) {
      const auto& [n, c] = lines[li];
      std::vector<detail::Polygon2> next;
      next.reserve(cells.size() + 4);
      for (auto& cell : cells) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& p : cell.pts) {
          const double s = p.dot(n) - c;
          lo = std::min(lo, s);
          hi = std::max(hi, s);
        }
        if (lo >= -slack || hi <= slack) {
          next.push_back(std::move(cell));
          continue;
        }
        detail::Polygon2 below = cell, above = cell;
        const bool has_below = detail::clip_polygon(below, n, c, line_label[li], slack);
        const bool has_above = detail::clip_polygon(above, -n, -c, line_label[li], slack);
        if (has_below) next.push_back(std::move(below));
        if (has_above) next.push_back(std::move(above));
      }
      cells = std::move(next);
    }

    PlaneTrace pt{planes[pi], dir, trace_area, detail::euler_characteristic(cells, 1e-9 * W)};
    out.traces.push_back(pt);

    for (const auto& cell : cells) {
      ArrangementFace f;
      f.face = detail::polygon_polytope(dir, cell.pts);
      f.base = base;
      f.plane = static_cast<int>(pi);
      f.interior = true;
      for (int lab : cell.labels) {
        if (lab <= detail::kWindowLabel) f.interior = false;
      }
      if (f.interior) {
        const Vec c0 = centroid(f.face);
        std::vector<Halfspace> eroded;
        for (const auto& [n, t] : trace_planes) {
          const Vec nv = detail::to_vec(n);
          eroded.push_back({nv, t - (support(f.face, nv) - nv.dot(c0))});
        }
        try {
          const double a = volume(intersect_halfspaces(dir, eroded, big));
          f.weight = trace_area / a;
        } catch (const EmptyPolytopeError&) {
          f.interior = false;
        }
      }
      out.faces.push_back(std::move(f));
    }
  }
  return out;
}

/// Planes of X hitting the window [-W, W]^3 (d = 3).
inline std::vector<Hyperplane> sample_window_planes(const ProcessSpec& spec, double W, RandomStream& rng) {
  require(spec.dim() == 3, "sample_window_planes: arrangement enumeration needs d = 3");
  HyperplaneStream stream(spec.gamma, spec.phi, rng.substream(0));
  rng = rng.substream(1);
  std::vector<Hyperplane> out;
  const double reach = std::sqrt(3.0) * W;
  while (stream.peek() <= reach) {
    Hyperplane h = stream.next();
    if (h.offset < W * h.normal.lpNorm<1>()) out.push_back(std::move(h));
  }
  return out;
}

/// Sample a window's planes and build the complex; near-degenerate samples
/// are redrawn.
inline FaceComplex sample_face_complex(const ProcessSpec& spec, double W, RandomStream& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    try {
      return build_face_complex(sample_window_planes(spec, W, rng), W);
    } catch (const DegenerateError&) {
    }
  }
  throw DegenerateError("sample_face_complex: repeated degenerate samples");
}

using FaceFunction = std::function<double(const Polytope&)>;

/// Sums over interior faces feeding both ratio estimators.
struct FaceSums {
  double w = 0.0;     ///< sum of weights
  double wf = 0.0;    ///< sum of weight * f
  double wv = 0.0;    ///< sum of weight * V_k
  double wfv = 0.0;   ///< sum of weight * f * V_k
  std::size_t count = 0;

  FaceSums& operator+=(const FaceSums& o) {
    w += o.w;
    wf += o.wf;
    wv += o.wv;
    wfv += o.wfv;
    count += o.count;
    return *this;
  }
};

inline FaceSums accumulate_faces(const FaceComplex& complex, const FaceFunction& f) {
  FaceSums s;
  for (const auto& face : complex.faces) {
    if (!face.interior) continue;
    const double v = volume(face.face);
    const double fv = f(face.face);
    s.w += face.weight;
    s.wf += face.weight * fv;
    s.wv += face.weight * v;
    s.wfv += face.weight * fv * v;
    ++s.count;
  }
  return s;
}

/// sum f(F) V_k(F) / sum V_k(F) over interior faces: the window-ratio
/// estimate of E f(weighted typical face).
inline double weighted_face_statistic(const FaceComplex& complex, const FaceFunction& f) {
  const FaceSums s = accumulate_faces(complex, f);
  if (s.count == 0) throw DegenerateError("weighted_face_statistic: no interior faces (window too small)");
  return s.wfv / s.wv;
}

/// Mean of f over interior faces: estimate of E f(typical face).
inline double typical_face_statistic(const FaceComplex& complex, const FaceFunction& f) {
  const FaceSums s = accumulate_faces(complex, f);
  if (s.count == 0) throw DegenerateError("typical_face_statistic: no interior faces (window too small)");
  return s.wf / s.w;
}

}  // namespace mosaic

#endif  // MOSAIC_ARRANGEMENT_HPP
