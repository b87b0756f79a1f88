#ifndef MOSAIC_EXPERIMENTS_HPP
#define MOSAIC_EXPERIMENTS_HPP

#include "mosaic/arrangement.hpp"
#include "mosaic/common.hpp"
#include "mosaic/grassmann.hpp"
#include "mosaic/io.hpp"
#include "mosaic/measures.hpp"
#include "mosaic/minkowski.hpp"
#include "mosaic/process.hpp"
#include "mosaic/random.hpp"
#include "mosaic/shape.hpp"
#include "mosaic/stats.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace mosaic::lab {

using json = nlohmann::json;

// ---------------------------------------------------------------- config

struct LimitStage {
  double a = 0.0;
  double theta = 0.0;
};

struct ExperimentConfig {
  std::string name;
  ProcessSpec spec;
  int k = 2;
  Subspace L_star;
  double epsilon = 0.3;
  double theta = 0.1;
  std::vector<double> a_grid{1, 2, 4, 8};
  double h = 0.25;
  std::size_t replicas = 10000;  ///< raw samples on the process route
  std::uint64_t seed = 1;
  double window = 4.0;            ///< arrangement window half-width
  std::size_t windows = 20;       ///< arrangement windows
  std::vector<LimitStage> schedule;
  std::vector<SphericalMeasure> corpus;  ///< measures swept by the rotation-perturbation experiment
  std::size_t n_pairs = 200;
  double max_defect = 0.125;
  json source;  ///< the parsed input, for hashing

  void validate() const {
    require(epsilon > 0.0, "config: epsilon must be positive");
    require(theta > 0.0, "config: theta must be positive");
    require(h > 0.0 && h < 0.5, "config: h must lie in (0, 1/2)");
    require(replicas > 0, "config: replicas must be positive");
    for (std::size_t i = 0; i < a_grid.size(); ++i) {
      require(a_grid[i] > 0.0, "config: a_grid entries must be positive");
      if (i > 0) require(a_grid[i] > a_grid[i - 1], "config: a_grid must be increasing");
    }
    require(k >= 2 && k <= spec.dim() - 1, "config: need 2 <= k <= d - 1");
    require(L_star.dim() == k && L_star.ambient_dim() == spec.dim(), "config: L_star has the wrong shape");
  }

  static ExperimentConfig from_json(const json& j) {
    ExperimentConfig c;
    c.source = j;
    c.name = j.value("name", std::string("experiment"));
    c.spec = io::process_from_json(j.at("process"));
    c.k = j.value("k", 2);
    if (j.contains("L_star")) {
      c.L_star = io::subspace_from_json(j.at("L_star"));
    } else {
      Mat f = Mat::Zero(c.spec.dim(), c.k);
      for (int i = 0; i < c.k; ++i) f(i, i) = 1.0;
      c.L_star = Subspace(f);
    }
    c.epsilon = j.value("epsilon", c.epsilon);
    c.theta = j.value("theta", c.theta);
    if (j.contains("a_grid")) c.a_grid = j.at("a_grid").get<std::vector<double>>();
    c.h = j.value("h", c.h);
    c.replicas = j.value("replicas", c.replicas);
    c.seed = j.value("seed", c.seed);
    c.window = j.value("window", c.window);
    c.windows = j.value("windows", c.windows);
    if (j.contains("schedule")) {
      for (const auto& s : j.at("schedule")) c.schedule.push_back({s.at("a").get<double>(), s.at("theta").get<double>()});
    }
    if (j.contains("corpus")) {
      for (const auto& m : j.at("corpus")) c.corpus.push_back(io::measure_from_json(m));
    }
    c.n_pairs = j.value("n_pairs", c.n_pairs);
    c.max_defect = j.value("max_defect", c.max_defect);
    c.validate();
    return c;
  }
};

/// FNV-1a of the canonical JSON text.
inline std::string config_hash(const json& j) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------- tables

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ResultTable {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, double>> diagnostics;
  std::vector<Assertion> assertions;
  std::uint64_t seed = 0;
  std::string config_hash;
  double wall_seconds = 0.0;

  bool passed() const {
    for (const auto& a : assertions)
      if (!a.passed) return false;
    return true;
  }

  void assert_that(std::string name, bool ok, std::string detail) {
    assertions.push_back({std::move(name), ok, std::move(detail)});
  }

  double column(std::size_t row, const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (columns[c] == name) return rows.at(row).at(c);
    throw InvalidArgument("ResultTable: no column " + name);
  }

  double diagnostic(const std::string& name) const {
    for (const auto& [n, v] : diagnostics)
      if (n == name) return v;
    throw InvalidArgument("ResultTable: no diagnostic " + name);
  }
};

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Deterministic: contains only the data, never timing.
inline std::string to_csv(const ResultTable& t) {
  std::ostringstream out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_number(r[c]);
    out << "\n";
  }
  return out.str();
}

inline json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

/// Table, diagnostics and assertions; timing only when asked for.
inline json to_json(const ResultTable& t, bool with_timing) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = json::object();
    for (std::size_t c = 0; c < r.size(); ++c) row[t.columns[c]] = number_json(r[c]);
    rows.push_back(row);
  }
  json diag = json::object();
  for (const auto& [n, v] : t.diagnostics) diag[n] = number_json(v);
  json asserts = json::array();
  for (const auto& a : t.assertions) asserts.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  json out = {{"experiment", t.experiment}, {"seed", t.seed},          {"config_hash", t.config_hash},
              {"rows", rows},               {"diagnostics", diag},     {"assertions", asserts},
              {"passed", t.passed()}};
  if (with_timing) out["wall_seconds"] = t.wall_seconds;
  return out;
}

// ---------------------------------------------------------------- plots

struct PlotSeries {
  std::string name;
  std::vector<double> x, y, lo, hi;  ///< lo/hi optional error bars
};

/// A minimal standalone SVG line chart.
inline std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                            const std::vector<PlotSeries>& series) {
  const double W = 640, H = 420, ml = 70, mr = 20, mt = 40, mb = 55;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.lo.empty() || !std::isfinite(s.lo[i]) ? s.y[i] : s.lo[i]);
      y1 = std::max(y1, s.hi.empty() || !std::isfinite(s.hi[i]) ? s.y[i] : s.hi[i]);
    }
  }
  if (x0 > x1) x0 = 0, x1 = 1;
  if (y0 > y1) y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  o << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0, yv = y0 + (y1 - y0) * t / 4.0;
    o << "<text x=\"" << px(xv) << "\" y=\"" << H - mb + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
      << format_number(std::round(xv * 1000) / 1000) << "</text>\n";
    o << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
      << format_number(std::round(yv * 1000) / 1000) << "</text>\n";
  }
  o << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"13\">"
    << xlabel << "</text>\n";
  o << "<text transform=\"translate(16," << (mt + H - mb) / 2 << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">"
    << ylabel << "</text>\n";
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* col = colors[si % 6];
    std::string path;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      path += (path.empty() ? "M" : " L") + format_number(px(s.x[i])) + " " + format_number(py(s.y[i]));
      o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << col << "\"/>\n";
      if (!s.lo.empty() && std::isfinite(s.lo[i]) && std::isfinite(s.hi[i])) {
        o << "<line x1=\"" << px(s.x[i]) << "\" y1=\"" << py(s.lo[i]) << "\" x2=\"" << px(s.x[i]) << "\" y2=\""
          << py(s.hi[i]) << "\" stroke=\"" << col << "\"/>\n";
      }
    }
    if (!path.empty()) o << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << col << "\"/>\n";
    o << "<text x=\"" << W - mr - 150 << "\" y=\"" << mt + 16 * (si + 1) << "\" font-size=\"12\" fill=\"" << col
      << "\">" << s.name << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

// ---------------------------------------------------------------- workers

/// Worker count: MOSAIC_LAB_THREADS if set, else the hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("MOSAIC_LAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// out[i] = fn(i) on a pool of workers.  Results are indexed, so the caller
/// folds them in replica order regardless of scheduling.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn fn) {
  std::vector<std::optional<T>> slots(n);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------- helpers

namespace detail {

/// Blaschke bodies B_L cached per subspace.
class BlaschkeCache {
 public:
  explicit BlaschkeCache(const ProcessSpec& spec) : spec_(spec) {}

  const Polytope& get(const Subspace& L) {
    std::lock_guard<std::mutex> lock(m_);
    for (const auto& [flat, body] : items_) {
      if (same_subspace(flat, L)) return body;
    }
    items_.emplace_back(L, blaschke_body(spec_, L));
    return items_.back().second;
  }

 private:
  const ProcessSpec& spec_;
  std::mutex m_;
  std::deque<std::pair<Subspace, Polytope>> items_;
};

/// Monotone non-increasing except for at most one inversion, which must
/// lie within 2 sigma.
inline bool decays_with_one_inversion(const std::vector<double>& p, const std::vector<double>& se, std::string* why) {
  int inversions = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (!(p[i] > p[i - 1])) continue;
    ++inversions;
    const double sigma = std::sqrt(sqr(se[i]) + sqr(se[i - 1]));
    if (p[i] - p[i - 1] > 2.0 * sigma) {
      if (why) *why = "inversion beyond 2 sigma at index " + std::to_string(i);
      return false;
    }
  }
  if (inversions > 1) {
    if (why) *why = std::to_string(inversions) + " inversions";
    return false;
  }
  if (why) *why = std::to_string(inversions) + " inversion(s) within 2 sigma";
  return true;
}

inline double tau(const Polytope& B) {
  const int k = B.dim();
  return k * std::pow(volume(B), 1.0 - 1.0 / k);
}

/// One weighted typical face with the quantities the theorem tables need.
struct FaceSample {
  double volume = 0.0;
  int flat = -1;
  double deviation = std::numeric_limits<double>::quiet_NaN();  ///< vs B_{L*}; NaN if not needed
  double own_deviation = std::numeric_limits<double>::quiet_NaN();  ///< vs B_{D(F)}
};

inline void stamp(ResultTable& t, const ExperimentConfig& c, const char* name) {
  t.experiment = name;
  t.seed = c.seed;
  json src = c.source;
  src["seed"] = c.seed;
  t.config_hash = config_hash(src);
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// ---------------------------------------------------------------- theorem1: weighted faces

/**
 * p(a) = P{theta(Z, B_{L*}) >= eps | V_k(Z) >= a, D(Z) in N_theta(L*)} for
 * the weighted typical k-face Z, sampled as L ~ Q_{d-k} and the zero cell
 * of X cap L, conditioned by rejection.
 */
inline ResultTable run_theorem1(const ExperimentConfig& c) {
  detail::Stopwatch clock;
  ResultTable t;
  detail::stamp(t, c, "theorem1");
  const FlatDistribution q = intersection_direction_distribution(c.spec, c.k);
  if (!q.in_support(c.L_star)) throw InvalidArgument("theorem1: L_star is not in the support of Q_{d-k}");
  const Polytope B_star = blaschke_body(c.spec, c.L_star);
  const SectionSpec sec_star = section_params(c.spec, c.L_star);
  std::vector<bool> near(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) near[i] = in_neighborhood(q.entries[i].flat, c.L_star, c.theta);
  const double a_min = c.a_grid.empty() ? 0.0 : c.a_grid.front();

  const RandomStream base(c.seed);
  const auto samples = parallel_map<detail::FaceSample>(c.replicas, [&](std::size_t i) {
    RandomStream rng = base.substream(i);
    const auto tf = sample_weighted_typical_face(c.spec, q, rng);
    detail::FaceSample s;
    s.volume = volume(tf.face);
    s.flat = tf.flat_index;
    if (near[tf.flat_index] && s.volume >= a_min) s.deviation = deviation(tf.face, B_star).value;
    return s;
  });

  t.columns = {"a", "n_conditioned", "n_deviating", "p_hat", "stderr", "wilson_lo", "wilson_hi", "tau_L_star",
               "gamma_section"};
  std::vector<double> p, se, fx, fy;
  const double tau_star = detail::tau(B_star);
  for (double a : c.a_grid) {
    std::size_t n = 0, dev = 0;
    for (const auto& s : samples) {
      if (!near[s.flat] || s.volume < a) continue;
      ++n;
      if (s.deviation >= c.epsilon) ++dev;
    }
    const double ph = n ? static_cast<double>(dev) / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
    const auto wi = stats::wilson(dev, n);
    t.rows.push_back({a, double(n), double(dev), ph, stats::binomial_stderr(dev, n), wi.lo, wi.hi, tau_star,
                      sec_star.gamma_section});
    if (n > 0) {
      p.push_back(ph);
      se.push_back(stats::binomial_stderr(dev, n));
    }
    if (n > 0 && dev > 0) {
      fx.push_back(std::pow(a, 1.0 / c.k));
      fy.push_back(std::log(ph));
    }
  }
  if (fx.size() >= 2) {
    const auto fit = stats::ols(fx, fy);
    t.diagnostics.push_back({"slope_log_p_vs_a_pow_1_over_k", fit.slope});
    t.diagnostics.push_back({"slope_stderr", fit.slope_stderr});
  }
  t.diagnostics.push_back({"epsilon_pow_k_plus_1", std::pow(c.epsilon, c.k + 1)});
  bool all_rows = true;
  for (const auto& r : t.rows) all_rows = all_rows && r[1] > 0;
  std::string why;
  const bool decay = p.size() == c.a_grid.size() && detail::decays_with_one_inversion(p, se, &why);
  t.assert_that("p_hat non-increasing in a (one 2-sigma inversion allowed)", decay && all_rows,
                all_rows ? why : "a row has no conditioned samples");
  t.wall_seconds = clock.seconds();
  return t;
}

// ---------------------------------------------------------------- theorem2: typical faces

namespace detail {

struct WindowSums {
  // Per a: HT-weighted sums of the conditioning and deviation indicators.
  std::vector<double> cond, dev;
  std::vector<std::size_t> n_cond, n_dev;
  double total = 0.0;  ///< HT weight of all interior faces
};

}  // namespace detail

/**
 * The theorem1 statistic for the typical k-face, estimated from interior
 * faces of window arrangements (d = 3, k = 2).  Also checks the indicator
 * at the smallest a against the process route through
 * E f(Z) = E[f(Z_0)/V(Z_0)] / E[1/V(Z_0)].
 */
inline ResultTable run_theorem2(const ExperimentConfig& c) {
  detail::Stopwatch clock;
  require(c.spec.dim() == 3 && c.k == 2, "theorem2: the arrangement route needs d = 3, k = 2");
  ResultTable t;
  detail::stamp(t, c, "theorem2");
  const FlatDistribution q = intersection_direction_distribution(c.spec, c.k);
  if (!q.in_support(c.L_star)) throw InvalidArgument("theorem2: L_star is not in the support of Q_{d-k}");
  const Polytope B_star = blaschke_body(c.spec, c.L_star);
  const SectionSpec sec_star = section_params(c.spec, c.L_star);
  const std::size_t na = c.a_grid.size();
  const double a_min = c.a_grid.empty() ? 0.0 : c.a_grid.front();

  const RandomStream base(c.seed);
  const RandomStream window_base = base.substream(0);
  const auto windows = parallel_map<detail::WindowSums>(c.windows, [&](std::size_t i) {
    RandomStream rng = window_base.substream(i);
    const FaceComplex fc = sample_face_complex(c.spec, c.window, rng);
    detail::WindowSums s{std::vector<double>(na), std::vector<double>(na), std::vector<std::size_t>(na),
                         std::vector<std::size_t>(na)};
    for (const auto& f : fc.faces) {
      if (!f.interior) continue;
      s.total += f.weight;
      const double v = volume(f.face);
      if (v < a_min || !in_neighborhood(f.face.carrier(), c.L_star, c.theta)) continue;
      const bool dev = deviation(f.face, B_star).value >= c.epsilon;
      for (std::size_t j = 0; j < na; ++j) {
        if (v < c.a_grid[j]) continue;
        s.cond[j] += f.weight;
        s.n_cond[j] += 1;
        if (dev) {
          s.dev[j] += f.weight;
          s.n_dev[j] += 1;
        }
      }
    }
    return s;
  });

  t.columns = {"a", "n_conditioned", "n_deviating", "p_hat", "stderr", "tau_L_star", "gamma_section"};
  std::vector<double> p, se, fx, fy;
  for (std::size_t j = 0; j < na; ++j) {
    std::vector<double> num, den;
    std::size_t n = 0, d = 0;
    for (const auto& w : windows) {
      num.push_back(w.dev[j]);
      den.push_back(w.cond[j]);
      n += w.n_cond[j];
      d += w.n_dev[j];
    }
    double ph = std::numeric_limits<double>::quiet_NaN(), s = ph;
    if (n > 0 && windows.size() >= 2) {
      const auto r = stats::ratio_estimate(num, den);
      ph = r.value;
      s = r.stderr_;
      p.push_back(ph);
      se.push_back(s);
      if (d > 0) {
        fx.push_back(std::pow(c.a_grid[j], 1.0 / c.k));
        fy.push_back(std::log(ph));
      }
    }
    t.rows.push_back({c.a_grid[j], double(n), double(d), ph, s, detail::tau(B_star), sec_star.gamma_section});
  }
  if (fx.size() >= 2) t.diagnostics.push_back({"slope_log_p_vs_a_pow_1_over_k", stats::ols(fx, fy).slope});
  std::string why;
  const bool decay = p.size() == na && detail::decays_with_one_inversion(p, se, &why);
  t.assert_that("typical-face p_hat non-increasing in a (one 2-sigma inversion allowed)", decay, why);

  // Process route for the same indicator at a_grid[0], typical-face law.
  const FlatDistribution& qd = q;
  const RandomStream face_base = base.substream(1);
  struct Pair {
    double num, den;
  };
  const auto pairs = parallel_map<Pair>(c.replicas, [&](std::size_t i) {
    RandomStream rng = face_base.substream(i);
    const auto tf = sample_weighted_typical_face(c.spec, qd, rng);
    const double v = volume(tf.face);
    double ind = 0.0;
    if (v >= a_min && in_neighborhood(tf.face.carrier(), c.L_star, c.theta) &&
        deviation(tf.face, B_star).value >= c.epsilon) {
      ind = 1.0;
    }
    return Pair{ind / v, 1.0 / v};
  });
  std::vector<double> num, den;
  for (const auto& pr : pairs) {
    num.push_back(pr.num);
    den.push_back(pr.den);
  }
  const auto proc = stats::ratio_estimate(num, den);
  // Arrangement route: HT-weighted fraction of all interior faces.
  std::vector<double> anum, aden;
  for (const auto& w : windows) {
    anum.push_back(w.dev.empty() ? 0.0 : w.dev[0]);
    aden.push_back(w.total);
  }
  const auto arr = stats::ratio_estimate(anum, aden);
  const double sigma = std::sqrt(sqr(proc.stderr_) + sqr(arr.stderr_));
  t.diagnostics.push_back({"indicator_process_route", proc.value});
  t.diagnostics.push_back({"indicator_process_stderr", proc.stderr_});
  t.diagnostics.push_back({"indicator_arrangement_route", arr.value});
  t.diagnostics.push_back({"indicator_arrangement_stderr", arr.stderr_});
  t.assert_that("indicator agrees across routes within 3 sigma", std::abs(proc.value - arr.value) <= 3.0 * sigma,
                "difference " + format_number(proc.value - arr.value) + ", sigma " + format_number(sigma));
  t.wall_seconds = clock.seconds();
  return t;
}

// ---------------------------------------------------------------- lemma6: small-section decay

/**
 * q(a) = P{V_k(Z_0 cap L*) in a(1, 1 + h)} and the slope of log q against
 * a^{1/k}, compared with the anchor -2 gamma_{X cap L} tau_L.
 */
inline ResultTable run_lemma6_rate(const ExperimentConfig& c) {
  detail::Stopwatch clock;
  ResultTable t;
  detail::stamp(t, c, "lemma6");
  const SectionSpec sec = section_params(c.spec, c.L_star);
  const Polytope B = blaschke_body(c.spec, c.L_star);
  const double gt = sec.gamma_section * detail::tau(B);

  const RandomStream base(c.seed);
  const auto vols = parallel_map<double>(c.replicas, [&](std::size_t i) {
    RandomStream rng = base.substream(i);
    return volume(zero_cell_in_section(c.spec, c.L_star, rng));
  });

  t.columns = {"a", "a_pow_1_over_k", "count", "q_hat", "stderr", "log_q_hat"};
  std::vector<double> fx, fy, fya;
  bool empty_bin = false;
  for (double a : c.a_grid) {
    std::size_t n = 0;
    for (double v : vols)
      if (v > a && v < a * (1.0 + c.h)) ++n;
    const double qh = static_cast<double>(n) / static_cast<double>(vols.size());
    t.rows.push_back({a, std::pow(a, 1.0 / c.k), double(n), qh, stats::binomial_stderr(n, vols.size()),
                      n ? std::log(qh) : std::numeric_limits<double>::quiet_NaN()});
    if (n == 0) {
      empty_bin = true;
      continue;
    }
    fx.push_back(std::pow(a, 1.0 / c.k));
    fy.push_back(std::log(qh));
    // Diagnostic only: for rectangular cells (cross measure, k = 2) the exact
    // law is q(a) ~ c a^{7/4} exp(-2 gamma tau sqrt(a)); dividing out the
    // power isolates the exponential rate.
    fya.push_back(std::log(qh) - 1.75 * std::log(a));
  }
  t.diagnostics.push_back({"anchor_minus_2_gamma_tau", -2.0 * gt});
  t.diagnostics.push_back({"gamma_section_tau_L", gt});
  t.diagnostics.push_back({"bracket_lo", -3.0 * gt});
  t.diagnostics.push_back({"bracket_hi", -1.5 * gt});
  double slope = std::numeric_limits<double>::quiet_NaN();
  if (fx.size() >= 2) {
    const auto fit = stats::ols(fx, fy);
    slope = fit.slope;
    t.diagnostics.push_back({"slope", fit.slope});
    t.diagnostics.push_back({"slope_stderr", fit.slope_stderr});
    t.diagnostics.push_back({"slope_prefactor_adjusted", stats::ols(fx, fya).slope});
  }
  t.assert_that("no empty bins", !empty_bin, empty_bin ? "some a has no cells in a(1,1+h)" : "ok");
  t.assert_that("slope is negative", slope < 0.0, "slope " + format_number(slope));
  t.assert_that("slope within [-3, -1.5] gamma_section tau_L", slope >= -3.0 * gt && slope <= -1.5 * gt,
                "slope " + format_number(slope) + " vs bracket [" + format_number(-3.0 * gt) + ", " +
                    format_number(-1.5 * gt) + "]");
  t.wall_seconds = clock.seconds();
  return t;
}

// ---------------------------------------------------------------- lemma1: rotation perturbation

/**
 * Sweep of d_P(pi_L phi, rho pi_E phi) / (3 |rho|^{1/3}) over a corpus of
 * directional distributions, random L and E = rho_0 L with |rho_0| <= 1/8,
 * rho the minimal rotation taking E to L.
 */
inline ResultTable run_lemma1_check(const ExperimentConfig& c) {
  detail::Stopwatch clock;
  ResultTable t;
  detail::stamp(t, c, "lemma1");
  std::vector<SphericalMeasure> corpus = c.corpus;
  if (corpus.empty()) corpus.push_back(c.spec.phi);
  const RandomStream base(c.seed);
  struct Row {
    double phi, defect, dp, bound, ratio;
  };
  const auto rows = parallel_map<Row>(c.n_pairs, [&](std::size_t i) {
    RandomStream rng = base.substream(i);
    const std::size_t pi = i % corpus.size();
    const SphericalMeasure& phi = corpus[pi];
    const int d = phi.dim();
    const Subspace L = random_subspace(d, c.k, rng);
    Subspace E = L;
    if (i % 10 != 0) {
      // Log-uniform defect in [1e-4, max_defect]; every tenth instance is the identity.
      const double defect = std::exp(rng.uniform(std::log(1e-4), std::log(c.max_defect)));
      E = L.rotated(random_rotation_with_defect(d, defect, rng));
    }
    const Rotation rho = minimal_rotation(E, L);
    const double r = rotation_defect(rho);
    const SphericalMeasure a = project(phi, L);
    const SphericalMeasure b = push_forward(project(phi, E), E, rho, L);
    const double bound = 3.0 * std::cbrt(r);
    const double tol = std::min(1e-4, 1e-4 * bound);
    const double dp = r == 0.0 ? prokhorov(a, b, 1e-9) : prokhorov(a, b, tol);
    const double ratio = bound > 0.0 ? dp / bound : (dp <= 1e-9 ? 0.0 : std::numeric_limits<double>::infinity());
    return Row{double(pi), r, dp, bound, ratio};
  });
  t.columns = {"instance", "phi", "defect", "d_P", "bound", "ratio"};
  double worst = 0.0;
  bool all_small = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    t.rows.push_back({double(i), r.phi, r.defect, r.dp, r.bound, r.ratio});
    worst = std::max(worst, r.ratio);
    all_small = all_small && r.defect <= c.max_defect + 1e-12;
  }
  t.diagnostics.push_back({"max_ratio", worst});
  t.assert_that("every |rho| <= 1/8", all_small, "");
  t.assert_that("max d_P / (3 |rho|^{1/3}) <= 1 + 1e-3", worst <= 1.0 + 1e-3, "max ratio " + format_number(worst));
  t.wall_seconds = clock.seconds();
  return t;
}

// ---------------------------------------------------------------- limitshape: concentration along a schedule

/**
 * Distribution of theta(Z, B_{L*}) for the weighted typical face conditioned
 * on V_k >= a and D in N_theta(L*), along a schedule with a increasing and
 * theta decreasing.  Standard errors of the median come from 20 batches.
 */
inline ResultTable run_limit_shape_demo(const ExperimentConfig& c) {
  detail::Stopwatch clock;
  ResultTable t;
  detail::stamp(t, c, "limitshape");
  std::vector<LimitStage> schedule = c.schedule;
  if (schedule.empty()) schedule = {{0.5, 2.5}, {2.0, 1.5}, {6.0, 0.5}, {16.0, 0.1}};
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    require(schedule[i].a >= schedule[i - 1].a && schedule[i].theta <= schedule[i - 1].theta,
            "limitshape: schedule must increase a and decrease theta");
  }
  const FlatDistribution q = intersection_direction_distribution(c.spec, c.k);
  const Polytope B_star = blaschke_body(c.spec, c.L_star);
  std::vector<double> dist(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) dist[i] = delta(q.entries[i].flat, c.L_star);
  const double a_min = schedule.front().a;
  const double theta_max = schedule.front().theta;

  const RandomStream base(c.seed);
  const auto samples = parallel_map<detail::FaceSample>(c.replicas, [&](std::size_t i) {
    RandomStream rng = base.substream(i);
    const auto tf = sample_weighted_typical_face(c.spec, q, rng);
    detail::FaceSample s;
    s.volume = volume(tf.face);
    s.flat = tf.flat_index;
    if (s.volume >= a_min && dist[tf.flat_index] < theta_max) s.deviation = deviation(tf.face, B_star).value;
    return s;
  });

  t.columns = {"stage", "a", "theta", "n", "q10", "q25", "median", "q75", "q90", "median_stderr"};
  const std::size_t batches = 20;
  std::vector<double> med, se;
  bool flagged = false;
  for (std::size_t st = 0; st < schedule.size(); ++st) {
    std::vector<double> v;
    std::vector<std::vector<double>> per_batch(batches);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& s = samples[i];
      if (std::isnan(s.deviation) || s.volume < schedule[st].a || !(dist[s.flat] < schedule[st].theta)) continue;
      v.push_back(s.deviation);
      per_batch[i * batches / samples.size()].push_back(s.deviation);
    }
    if (v.empty()) {
      flagged = true;
      t.rows.push_back({double(st), schedule[st].a, schedule[st].theta, 0, NAN, NAN, NAN, NAN, NAN, NAN});
      continue;
    }
    std::vector<double> bm;
    for (const auto& b : per_batch)
      if (!b.empty()) bm.push_back(stats::quantile(b, 0.5));
    const double s = bm.size() >= 2 ? stats::mean_stderr(bm).stderr_ : NAN;
    const double m = stats::quantile(v, 0.5);
    t.rows.push_back({double(st), schedule[st].a, schedule[st].theta, double(v.size()), stats::quantile(v, 0.1),
                      stats::quantile(v, 0.25), m, stats::quantile(v, 0.75), stats::quantile(v, 0.9), s});
    med.push_back(m);
    se.push_back(s);
  }
  std::string why;
  const bool ok = !flagged && detail::decays_with_one_inversion(med, se, &why);
  t.assert_that("median theta non-increasing along the schedule (one 2-sigma inversion allowed)", ok,
                flagged ? "a stage has no conditioned samples" : why);
  t.wall_seconds = clock.seconds();
  return t;
}

// ---------------------------------------------------------------- consistency

/**
 * Process route (L ~ Q_{d-k}, zero cell of X cap L) against the arrangement
 * route (interior faces of window complexes) for f in {1, V_k, theta(., B_D)}:
 * weighted-face means E f(Z_0) and typical-face means E f(Z).
 */
inline ResultTable run_consistency(const ExperimentConfig& c) {
  detail::Stopwatch clock;
  require(c.spec.dim() == 3 && c.k == 2, "consistency: the arrangement route needs d = 3, k = 2");
  ResultTable t;
  detail::stamp(t, c, "consistency");
  const FlatDistribution q = intersection_direction_distribution(c.spec, c.k);
  detail::BlaschkeCache cache(c.spec);
  for (const auto& e : q.entries) cache.get(e.flat);
  const RandomStream base(c.seed);

  // Process route.
  const RandomStream face_base = base.substream(1);
  struct FV {
    double v, th;
  };
  const auto faces = parallel_map<FV>(c.replicas, [&](std::size_t i) {
    RandomStream rng = face_base.substream(i);
    const auto tf = sample_weighted_typical_face(c.spec, q, rng);
    return FV{volume(tf.face), deviation(tf.face, cache.get(tf.face.carrier())).value};
  });
  // Arrangement route.
  const RandomStream window_base = base.substream(0);
  struct Win {
    FaceSums one, vol, th;
  };
  const auto wins = parallel_map<Win>(c.windows, [&](std::size_t i) {
    RandomStream rng = window_base.substream(i);
    const FaceComplex fc = sample_face_complex(c.spec, c.window, rng);
    Win w;
    w.one = accumulate_faces(fc, [](const Polytope&) { return 1.0; });
    w.vol = accumulate_faces(fc, [](const Polytope& P) { return volume(P); });
    w.th = accumulate_faces(fc, [&](const Polytope& P) { return deviation(P, cache.get(P.carrier())).value; });
    return w;
  });
  std::size_t arrangement_faces = 0;
  for (const auto& w : wins) arrangement_faces += w.one.count;

  t.columns = {"f", "law", "process", "process_stderr", "arrangement", "arrangement_stderr", "z_score"};
  auto add_row = [&](double f_id, double law, stats::RatioEstimate p, stats::RatioEstimate a, const std::string& label,
                     bool exact) {
    const double sigma = std::sqrt(sqr(p.stderr_) + sqr(a.stderr_));
    const double z = sigma > 0 ? (p.value - a.value) / sigma : (p.value == a.value ? 0.0 : INFINITY);
    t.rows.push_back({f_id, law, p.value, p.stderr_, a.value, a.stderr_, z});
    if (exact) {
      t.assert_that(label, std::abs(p.value - 1.0) <= 1e-12 && std::abs(a.value - 1.0) <= 1e-12,
                    "process " + format_number(p.value) + ", arrangement " + format_number(a.value));
    } else {
      t.assert_that(label, std::abs(z) <= 3.0, "z = " + format_number(z));
    }
  };
  auto process_mean = [&](auto g) {
    std::vector<double> num, den;
    for (const auto& f : faces) {
      num.push_back(g(f));
      den.push_back(1.0);
    }
    return stats::ratio_estimate(num, den);
  };
  auto process_typical = [&](auto g) {
    std::vector<double> num, den;
    for (const auto& f : faces) {
      num.push_back(g(f) / f.v);
      den.push_back(1.0 / f.v);
    }
    return stats::ratio_estimate(num, den);
  };
  auto arr = [&](auto pick_num, auto pick_den) {
    std::vector<double> num, den;
    for (const auto& w : wins) {
      num.push_back(pick_num(w));
      den.push_back(pick_den(w));
    }
    return stats::ratio_estimate(num, den);
  };
  // law 0: weighted typical face, law 1: typical face.
  add_row(0, 0, process_mean([](const FV&) { return 1.0; }),
          arr([](const Win& w) { return w.one.wfv; }, [](const Win& w) { return w.one.wv; }),
          "f = 1, weighted: both routes give 1", true);
  add_row(1, 0, process_mean([](const FV& f) { return f.v; }),
          arr([](const Win& w) { return w.vol.wfv; }, [](const Win& w) { return w.vol.wv; }),
          "f = V_k, weighted: routes agree within 3 sigma", false);
  add_row(2, 0, process_mean([](const FV& f) { return f.th; }),
          arr([](const Win& w) { return w.th.wfv; }, [](const Win& w) { return w.th.wv; }),
          "f = theta, weighted: routes agree within 3 sigma", false);
  add_row(1, 1, process_typical([](const FV& f) { return f.v; }),
          arr([](const Win& w) { return w.vol.wf; }, [](const Win& w) { return w.vol.w; }),
          "f = V_k, typical via E[f/V]/E[1/V]: routes agree within 3 sigma", false);
  add_row(2, 1, process_typical([](const FV& f) { return f.th; }),
          arr([](const Win& w) { return w.th.wf; }, [](const Win& w) { return w.th.w; }),
          "f = theta, typical via E[f/V]/E[1/V]: routes agree within 3 sigma", false);
  t.diagnostics.push_back({"process_faces", double(faces.size())});
  t.diagnostics.push_back({"arrangement_faces", double(arrangement_faces)});
  t.wall_seconds = clock.seconds();
  return t;
}

// ---------------------------------------------------------------- dispatch

inline ResultTable run_experiment(const std::string& name, const ExperimentConfig& c) {
  if (name == "theorem1") return run_theorem1(c);
  if (name == "theorem2") return run_theorem2(c);
  if (name == "lemma1") return run_lemma1_check(c);
  if (name == "lemma6") return run_lemma6_rate(c);
  if (name == "limitshape") return run_limit_shape_demo(c);
  if (name == "consistency") return run_consistency(c);
  throw InvalidArgument("unknown experiment " + name);
}

/// Plots for a finished table (empty when the experiment has none).
inline std::string plot_for(const ResultTable& t, int k) {
  if (t.experiment == "theorem1" || t.experiment == "theorem2") {
    PlotSeries s{"log p_hat", {}, {}, {}, {}};
    for (const auto& r : t.rows) {
      const double ph = r[3], se = r[4];
      if (!(ph > 0)) continue;
      s.x.push_back(std::pow(r[0], 1.0 / k));
      s.y.push_back(std::log(ph));
      s.lo.push_back(ph - se > 0 ? std::log(ph - se) : NAN);
      s.hi.push_back(std::log(ph + se));
    }
    return svg_plot(t.experiment + ": deviation probability", "a^(1/k)", "log p_hat", {s});
  }
  if (t.experiment == "lemma6") {
    PlotSeries s{"log q_hat", {}, {}, {}, {}};
    for (const auto& r : t.rows) {
      if (!(r[3] > 0)) continue;
      s.x.push_back(r[1]);
      s.y.push_back(r[5]);
    }
    return svg_plot("lemma6: volume tail", "a^(1/k)", "log q_hat", {s});
  }
  if (t.experiment == "limitshape") {
    std::vector<PlotSeries> fan;
    const char* names[] = {"q10", "q25", "median", "q75", "q90"};
    for (int qi = 0; qi < 5; ++qi) {
      PlotSeries s{names[qi], {}, {}, {}, {}};
      for (const auto& r : t.rows) {
        s.x.push_back(r[0]);
        s.y.push_back(r[4 + qi]);
      }
      fan.push_back(s);
    }
    return svg_plot("limit shape: quantiles of theta", "stage", "theta", fan);
  }
  return {};
}

/// Writes <dir>/<name>.csv (or .json), <name>.meta.json and optionally <name>.svg.
inline void write_outputs(const ResultTable& t, const std::string& dir, const std::string& format, bool plots, int k) {
  const std::string stem = dir + "/" + t.experiment;
  {
    std::ofstream out(format == "json" ? stem + ".json" : stem + ".csv");
    if (!out) throw InvalidArgument("cannot write to " + dir);
    if (format == "json") {
      out << to_json(t, false).dump(2) << "\n";
    } else {
      out << to_csv(t);
    }
  }
  {
    std::ofstream meta(stem + ".meta.json");
    meta << to_json(t, true).dump(2) << "\n";
  }
  if (plots) {
    const std::string svg = plot_for(t, k);
    if (!svg.empty()) std::ofstream(stem + ".svg") << svg;
  }
}

}  // namespace mosaic::lab

#endif  // MOSAIC_EXPERIMENTS_HPP
