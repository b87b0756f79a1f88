#ifndef MOSAIC_IO_HPP
#define MOSAIC_IO_HPP

#include "mosaic/common.hpp"
#include "mosaic/grassmann.hpp"
#include "mosaic/measures.hpp"
#include "mosaic/polytope.hpp"
#include "mosaic/process_spec.hpp"
#include "mosaic/shape.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace mosaic::io {

using json = nlohmann::json;

inline json to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Vec vec_from_json(const json& j) {
  if (!j.is_array()) throw InvalidArgument("json: expected a number array");
  Vec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

inline json to_json(const SphericalMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms()) atoms.push_back({{"dir", to_json(a.dir)}, {"mass", a.mass}});
  return {{"dim", mu.dim()}, {"atoms", atoms}};
}

/// {"dim": d, "atoms": [{"dir": [...], "mass": m}, ...]}.  Directions are
/// normalised on input; "even": true symmetrises the listed atoms.
inline SphericalMeasure measure_from_json(const json& j) {
  const int d = j.at("dim").get<int>();
  std::vector<std::pair<Vec, double>> raw;
  for (const auto& a : j.at("atoms")) {
    Vec v = vec_from_json(a.at("dir"));
    if (v.size() != d) throw InvalidArgument("json: atom direction has wrong dimension");
    raw.emplace_back(v, a.at("mass").get<double>());
  }
  if (j.value("even", false)) return make_even(raw);
  std::vector<Atom> atoms;
  for (auto& [v, m] : raw) {
    const double n = v.norm();
    if (n == 0.0) throw InvalidArgument("json: zero direction");
    atoms.push_back({v / n, m});
  }
  return SphericalMeasure(d, SphericalMeasure::merge(std::move(atoms)));
}

/// A subspace as the list of its frame columns.
inline json to_json(const Subspace& L) {
  json cols = json::array();
  for (int c = 0; c < L.dim(); ++c) cols.push_back(to_json(Vec(L.frame().col(c))));
  return cols;
}

inline Subspace subspace_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("json: subspace must be a nonempty column list");
  const int d = static_cast<int>(j[0].size());
  Mat m(d, static_cast<int>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) {
    const Vec v = vec_from_json(j[c]);
    if (v.size() != d) throw InvalidArgument("json: subspace columns differ in length");
    m.col(static_cast<int>(c)) = v;
  }
  return Subspace::span(m);
}

inline json to_json(const Rotation& rho) {
  json rows = json::array();
  for (int r = 0; r < rho.dim(); ++r) rows.push_back(to_json(Vec(rho.matrix().row(r).transpose())));
  return rows;
}

inline json to_json(const Polytope& P) {
  json facets = json::array();
  for (const auto& f : P.facets()) {
    facets.push_back({{"normal", to_json(P.carrier().embed(f.normal))},
                      {"offset", f.offset},
                      {"measure", f.measure},
                      {"vertices", f.vertices}});
  }
  json verts = json::array();
  for (const auto& v : P.vertices()) verts.push_back(to_json(v));
  return {{"carrier", to_json(P.carrier())}, {"vertices", verts}, {"facets", facets}, {"volume", volume(P)}};
}

/// Bodies are read back from their carrier and facet halfspaces.
inline Polytope polytope_from_json(const json& j) {
  const Subspace L = subspace_from_json(j.at("carrier"));
  std::vector<Halfspace> hs;
  double reach = 0.0;
  for (const auto& f : j.at("facets")) {
    hs.push_back({vec_from_json(f.at("normal")), f.at("offset").get<double>()});
  }
  for (const auto& v : j.at("vertices")) reach = std::max(reach, vec_from_json(v).norm());
  if (reach == 0.0) throw InvalidArgument("json: polytope without vertices");
  return intersect_halfspaces(L, hs, 4.0 * reach);
}

inline json to_json(const ProcessSpec& s) { return {{"gamma", s.gamma}, {"phi", to_json(s.phi)}}; }

inline ProcessSpec process_from_json(const json& j) {
  return ProcessSpec(j.at("gamma").get<double>(), measure_from_json(j.at("phi")));
}

inline json to_json(const DeviationResult& r) {
  return {{"value", r.value},
          {"witness_translation", to_json(r.z)},
          {"witness_alpha", r.alpha},
          {"witness_beta", r.beta},
          {"witness_rotation", to_json(r.rotation)}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

}  // namespace mosaic::io

#endif  // MOSAIC_IO_HPP
