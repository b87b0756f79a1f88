#ifndef MOSAIC_PROCESS_HPP
#define MOSAIC_PROCESS_HPP

#include "mosaic/common.hpp"
#include "mosaic/grassmann.hpp"
#include "mosaic/measures.hpp"
#include "mosaic/polytope.hpp"
#include "mosaic/process_spec.hpp"
#include "mosaic/random.hpp"

#include <functional>
#include <vector>

namespace mosaic {

/// A hyperplane H(u, t) = {x : <x, u> = t}, t >= 0, with the halfspace
/// H^-(u, t) containing o.
struct Hyperplane {
  Vec normal;
  double offset = 0.0;
  Halfspace lower() const { return {normal, offset}; }
};

/**
 * The hyperplanes of the process in order of increasing distance from o.
 *
 * Under Theta = 2 gamma int int 1(H(u,t)) dt phi(du) the distances form a
 * Poisson process of rate 2 gamma on (0, inf) with iid directions ~ phi,
 * so successive distances have Exp(2 gamma) spacings.
 */
class HyperplaneStream {
 public:
  HyperplaneStream(double gamma, const SphericalMeasure& phi, RandomStream rng)
      : rate_(2.0 * gamma * phi.total_mass()), phi_(&phi), rng_(rng) {
    require(gamma > 0.0, "HyperplaneStream: gamma must be positive");
    for (const auto& a : phi.atoms()) weights_.push_back(a.mass);
    advance();
  }

  /// Distance of the next hyperplane, without consuming it.
  double peek() const { return next_t_; }

  Hyperplane next() {
    const std::size_t i = rng_.discrete(weights_);
    Hyperplane h{phi_->atoms()[i].dir, next_t_};
    advance();
    return h;
  }

 private:
  void advance() { next_t_ += rng_.exponential(rate_); }

  double rate_;
  const SphericalMeasure* phi_;
  std::vector<double> weights_;
  RandomStream rng_;
  double next_t_ = 0.0;
};

/// Hyperplanes of X meeting the ball of radius `radius`: their number is
/// Poisson(2 gamma radius), distances uniform on (0, radius).
inline std::vector<Halfspace> sample_hyperplanes(const ProcessSpec& spec, double radius, RandomStream& rng) {
  require(radius > 0.0, "sample_hyperplanes: radius must be positive");
  HyperplaneStream stream(spec.gamma, spec.phi, rng.substream(0));
  rng = rng.substream(1);
  std::vector<Halfspace> out;
  while (stream.peek() <= radius) out.push_back(stream.next().lower());
  return out;
}

namespace detail {

inline double max_vertex_norm(const Polytope& P) {
  double r = 0.0;
  for (const auto& v : P.local_vertices()) r = std::max(r, v.norm());
  return r;
}

inline constexpr int kMaxDoublings = 40;

/**
 * Zero cell in the carrier L from a stream of hyperplanes ordered by their
 * distance from o.  Hyperplanes are consumed up to radius R; the cell is
 * final once every vertex lies strictly closer to o than the next unseen
 * hyperplane (which then cannot meet it).  Otherwise R doubles and the same
 * sample is extended.
 */
inline Polytope zero_cell_from_stream(const Subspace& L, HyperplaneStream& stream, double initial_radius) {
  std::vector<Halfspace> hs;
  double R = initial_radius;
  for (int doubling = 0; doubling <= kMaxDoublings; ++doubling, R *= 2.0) {
    while (stream.peek() <= R) hs.push_back(stream.next().lower());
    try {
      Polytope cell = intersect_halfspaces(L, hs, 2.0 * R);
      if (!cell.clipped() && max_vertex_norm(cell) < stream.peek()) return cell;
    } catch (const EmptyPolytopeError&) {
      throw DegenerateError("zero_cell: the cell does not contain o");
    }
  }
  throw DegenerateError("zero_cell: cell still unbounded after 40 doublings");
}

inline double initial_radius(double gamma, int k) { return static_cast<double>(k) / gamma; }

}  // namespace detail

/// Z_0 = intersection of the halfspaces H^- of all hyperplanes (d in {2,3}).
inline Polytope zero_cell(const ProcessSpec& spec, RandomStream& rng) {
  const int d = spec.dim();
  HyperplaneStream stream(spec.gamma, spec.phi, rng.substream(0));
  rng = rng.substream(1);
  return detail::zero_cell_from_stream(Subspace::full(d), stream, detail::initial_radius(spec.gamma, d));
}

/// Zero cell of the section process X cap L, sampled directly from its
/// parameters (gamma_{X cap L}, phi_{X cap L}) inside L.
inline Polytope zero_cell_in_section(const ProcessSpec& spec, const Subspace& L, RandomStream& rng) {
  const SectionSpec sec = section_params(spec, L);
  HyperplaneStream stream(sec.gamma_section, sec.phi_section, rng.substream(0));
  rng = rng.substream(1);
  return detail::zero_cell_from_stream(L, stream, detail::initial_radius(sec.gamma_section, L.dim()));
}

/// Z_0 cap L computed from the hyperplanes of X itself.  A hyperplane at
/// distance t from o cannot meet the points of L closer than t, so the
/// stopping rule of the direct route stays exact.
inline Polytope section_of_zero_cell(const ProcessSpec& spec, const Subspace& L, RandomStream& rng) {
  HyperplaneStream stream(spec.gamma, spec.phi, rng.substream(0));
  rng = rng.substream(1);
  return detail::zero_cell_from_stream(L, stream, detail::initial_radius(spec.gamma, L.dim()));
}

/// Number of section flats of X cap L meeting the disc of radius r in L,
/// counted from the hyperplanes of X.
inline int count_section_hits(const ProcessSpec& spec, const Subspace& L, double r, RandomStream& rng) {
  HyperplaneStream stream(spec.gamma, spec.phi, rng.substream(0));
  rng = rng.substream(1);
  int count = 0;
  while (stream.peek() <= r) {
    const Hyperplane h = stream.next();
    const double len = L.coordinates(h.normal).norm();
    if (len > 0.0 && h.offset <= r * len) ++count;
  }
  return count;
}

/// A discrete distribution on G(d, k).
struct FlatDistribution {
  struct Entry {
    Subspace flat;
    double weight = 0.0;
  };
  std::vector<Entry> entries;

  std::size_t size() const { return entries.size(); }

  const Subspace& sample(RandomStream& rng) const {
    std::vector<double> w;
    w.reserve(entries.size());
    for (const auto& e : entries) w.push_back(e.weight);
    return entries[rng.discrete(w)].flat;
  }

  /// Index of the entry equal to L, or -1.
  int find(const Subspace& L) const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (same_subspace(entries[i].flat, L)) return static_cast<int>(i);
    }
    return -1;
  }

  bool in_support(const Subspace& L) const { return find(L) >= 0; }
};

namespace detail {

/// One representative per antipodal pair of atoms, carrying the pair's mass.
inline std::vector<Atom> axes_of(const SphericalMeasure& phi) {
  std::vector<Atom> axes;
  for (const auto& a : phi.atoms()) {
    bool merged = false;
    for (auto& b : axes) {
      if ((a.dir + b.dir).norm() <= SphericalMeasure::kMergeTolerance ||
          (a.dir - b.dir).norm() <= SphericalMeasure::kMergeTolerance) {
        b.mass += a.mass;
        merged = true;
        break;
      }
    }
    if (!merged) axes.push_back(a);
  }
  return axes;
}

}  // namespace detail

/**
 * Directional distribution Q_{d-k} of the intersection process of order
 * d - k: the flat u_1^perp cap ... cap u_{d-k}^perp, over (d-k)-subsets of
 * distinct axes of phi, has weight proportional to
 * m_1 ... m_{d-k} * nabla(u_1, ..., u_{d-k}) (volume of the parallelepiped
 * spanned by the normals).  Equal flats are merged.
 */
inline FlatDistribution intersection_direction_distribution(const ProcessSpec& spec, int k) {
  const int d = spec.dim();
  require(k >= 1 && k <= d - 1, "intersection_direction_distribution: need 1 <= k <= d-1");
  const int r = d - k;
  const auto axes = detail::axes_of(spec.phi);
  const int n = static_cast<int>(axes.size());
  FlatDistribution out;
  std::vector<int> pick(r);
  std::function<void(int, int)> visit = [&](int pos, int start) {
    if (pos == r) {
      Mat u(d, r);
      double w = 1.0;
      for (int j = 0; j < r; ++j) {
        u.col(j) = axes[pick[j]].dir;
        w *= axes[pick[j]].mass;
      }
      const double nabla = std::sqrt(std::max(0.0, (u.transpose() * u).determinant()));
      if (nabla <= 1e-12) return;
      const Subspace flat = Subspace::span(u).complement();
      const int at = out.find(flat);
      if (at >= 0) {
        out.entries[at].weight += w * nabla;
      } else {
        out.entries.push_back({flat, w * nabla});
      }
      return;
    }
    for (int i = start; i < n; ++i) {
      pick[pos] = i;
      visit(pos + 1, i + 1);
    }
  };
  visit(0, 0);
  if (out.entries.empty()) {
    throw DegenerateError("intersection_direction_distribution: no (d-k)-subset of directions is independent");
  }
  double total = 0.0;
  for (const auto& e : out.entries) total += e.weight;
  for (auto& e : out.entries) e.weight /= total;
  return out;
}

/// A weighted typical k-face: L ~ Q_{d-k}, then the zero cell of X cap L.
struct TypicalFace {
  Polytope face;
  int flat_index = -1;  ///< entry of the flat distribution that was drawn
};

inline TypicalFace sample_weighted_typical_face(const ProcessSpec& spec, const FlatDistribution& q, RandomStream& rng) {
  std::vector<double> w;
  for (const auto& e : q.entries) w.push_back(e.weight);
  RandomStream pick = rng.substream(0);
  RandomStream cell = rng.substream(1);
  rng = rng.substream(2);
  const std::size_t i = pick.discrete(w);
  return {zero_cell_in_section(spec, q.entries[i].flat, cell), static_cast<int>(i)};
}

inline Polytope sample_weighted_typical_face(const ProcessSpec& spec, int k, RandomStream& rng) {
  return sample_weighted_typical_face(spec, intersection_direction_distribution(spec, k), rng).face;
}

}  // namespace mosaic

#endif  // MOSAIC_PROCESS_HPP
