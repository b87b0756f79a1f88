#ifndef MOSAIC_STATS_HPP
#define MOSAIC_STATS_HPP

#include "mosaic/common.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace mosaic::stats {

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

inline MeanStderr mean_stderr(const std::vector<double>& x) {
  MeanStderr out;
  out.n = x.size();
  if (x.empty()) return out;
  double s = 0.0;
  for (double v : x) s += v;
  out.mean = s / static_cast<double>(x.size());
  if (x.size() < 2) return out;
  double ss = 0.0;
  for (double v : x) ss += sqr(v - out.mean);
  out.stderr_ = std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
  return out;
}

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for a binomial proportion.
inline Interval wilson(std::size_t successes, std::size_t trials, double z = 1.959963984540054) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Binomial standard error sqrt(p (1 - p) / n).
inline double binomial_stderr(std::size_t successes, std::size_t trials) {
  if (trials == 0) return 0.0;
  const double p = static_cast<double>(successes) / static_cast<double>(trials);
  return std::sqrt(p * (1 - p) / static_cast<double>(trials));
}

/// Kolmogorov distribution tail Q_KS(lambda) = 2 sum (-1)^(j-1) exp(-2 j^2 lambda^2).
inline double kolmogorov_tail(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test (asymptotic p-value with the
/// Stephens small-sample correction).
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_tail((ne + 0.12 + 0.11 / ne) * d)};
}

/// One-sample KS test against a continuous CDF.
template <class Cdf>
KsResult ks_one_sample(std::vector<double> a, Cdf cdf) {
  require(!a.empty(), "ks_one_sample: empty sample");
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double ne = std::sqrt(n);
  return {d, kolmogorov_tail((ne + 0.12 + 0.11 / ne) * d)};
}

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson goodness of fit of counts against cell probabilities.
inline ChiSquareResult chi_square(const std::vector<std::size_t>& counts, const std::vector<double>& probs) {
  require(counts.size() == probs.size() && counts.size() >= 2, "chi_square: size mismatch");
  double n = 0.0;
  for (auto c : counts) n += static_cast<double>(c);
  ChiSquareResult r;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = n * probs[i];
    require(e > 0.0, "chi_square: zero expected count");
    r.statistic += sqr(static_cast<double>(counts[i]) - e) / e;
  }
  r.dof = static_cast<int>(counts.size()) - 1;
  r.p_value = boost::math::gamma_q(0.5 * r.dof, 0.5 * r.statistic);
  return r;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// Least squares y = intercept + slope x, optionally weighted.
inline LinearFit ols(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w = {}) {
  require(x.size() == y.size() && x.size() >= 2, "ols: need at least two points");
  const std::size_t n = x.size();
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sw += wi;
    sx += wi * x[i];
    sy += wi * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sxx += wi * sqr(x[i] - mx);
    sxy += wi * (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, "ols: x values are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double wi = w.empty() ? 1.0 : w[i];
      rss += wi * sqr(y[i] - f.intercept - f.slope * x[i]);
    }
    f.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return f;
}

/**
 * Ratio estimator sum(num) / sum(den) over independent groups (windows,
 * batches) with its delta-method standard error.
 */
struct RatioEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

inline RatioEstimate ratio_estimate(const std::vector<double>& num, const std::vector<double>& den) {
  require(num.size() == den.size() && num.size() >= 2, "ratio_estimate: need two or more groups");
  const double g = static_cast<double>(num.size());
  double sn = 0, sd = 0;
  for (std::size_t i = 0; i < num.size(); ++i) {
    sn += num[i];
    sd += den[i];
  }
  require(sd != 0.0, "ratio_estimate: zero denominator");
  const double r = sn / sd;
  double ss = 0.0;
  for (std::size_t i = 0; i < num.size(); ++i) ss += sqr(num[i] - r * den[i]);
  const double mean_den = sd / g;
  return {r, std::sqrt(ss / (g - 1) / g) / mean_den};
}

/// Empirical quantile (linear interpolation between order statistics).
inline double quantile(std::vector<double> x, double q) {
  require(!x.empty(), "quantile: empty sample");
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const std::size_t i = static_cast<std::size_t>(std::floor(pos));
  const std::size_t j = std::min(i + 1, x.size() - 1);
  return x[i] + (pos - static_cast<double>(i)) * (x[j] - x[i]);
}

}  // namespace mosaic::stats

#endif  // MOSAIC_STATS_HPP
