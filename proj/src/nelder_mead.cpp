#include "recur/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "recur/errors.hpp"

namespace recur {

namespace {

unsigned nth_prime(std::size_t n) {
  unsigned candidate = 1;
  for (std::size_t found = 0; found <= n;) {
    ++candidate;
    bool prime = candidate >= 2;
    for (unsigned p = 2; p * p <= candidate; ++p) {
      if (candidate % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) ++found;
  }
  return candidate;
}

struct SingleResult {
  std::vector<double> x;
  double value;
  int iterations;
  bool converged;
};

using Objective = std::function<double(const std::vector<double>&)>;

SingleResult run_simplex(const Objective& f, const std::vector<double>& x0,
                         const std::vector<double>& lo, const std::vector<double>& hi,
                         const OptimizerConfig& cfg) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> vx;
  std::vector<double> fv;

  auto push_vertex = [&](std::vector<double> p) {
    fv.push_back(f(p));
    vx.push_back(std::move(p));
  };
  push_vertex(x0);
  for (std::size_t c = 0; c < n; ++c) {
    double width = hi[c] - lo[c];
    double step = width > 0.0 ? 0.15 * width : 1e-6;
    std::vector<double> p = x0;
    if (p[c] + step > hi[c]) step = -step;
    p[c] += step;
    push_vertex(std::move(p));
  }

  auto order = [&]() {
    std::vector<std::size_t> idx(vx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> nx(vx.size());
    std::vector<double> nf(vx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      nx[i] = std::move(vx[idx[i]]);
      nf[i] = fv[idx[i]];
    }
    vx = std::move(nx);
    fv = std::move(nf);
  };

  auto converged_now = [&]() {
    double diameter = 0.0;
    for (std::size_t i = 1; i < vx.size(); ++i) {
      for (std::size_t c = 0; c < n; ++c) {
        diameter = std::max(diameter, std::abs(vx[i][c] - vx[0][c]));
      }
    }
    const double spread = fv.back() - fv.front();
    return diameter < cfg.diameter_tol && spread < cfg.spread_tol;
  };

  int iter = 0;
  order();
  for (; iter < cfg.max_iterations; ++iter) {
    if (converged_now()) return {vx[0], fv[0], iter, true};

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i + 1 < vx.size(); ++i) {
      for (std::size_t c = 0; c < n; ++c) centroid[c] += vx[i][c];
    }
    for (std::size_t c = 0; c < n; ++c) centroid[c] /= static_cast<double>(n);

    const std::vector<double>& worst = vx.back();
    std::vector<double> xr(n);
    for (std::size_t c = 0; c < n; ++c) xr[c] = centroid[c] + (centroid[c] - worst[c]);
    const double fr = f(xr);

    if (fr < fv[0]) {
      std::vector<double> xe(n);
      for (std::size_t c = 0; c < n; ++c) xe[c] = centroid[c] + 2.0 * (xr[c] - centroid[c]);
      const double fe = f(xe);
      if (fe < fr) {
        vx.back() = std::move(xe);
        fv.back() = fe;
      } else {
        vx.back() = std::move(xr);
        fv.back() = fr;
      }
    } else if (fr < fv[fv.size() - 2]) {
      vx.back() = std::move(xr);
      fv.back() = fr;
    } else {
      bool shrink = false;
      if (fr < fv.back()) {
        std::vector<double> xc(n);
        for (std::size_t c = 0; c < n; ++c) xc[c] = centroid[c] + 0.5 * (xr[c] - centroid[c]);
        const double fc = f(xc);
        if (fc <= fr) {
          vx.back() = std::move(xc);
          fv.back() = fc;
        } else {
          shrink = true;
        }
      } else {
        std::vector<double> xc(n);
        for (std::size_t c = 0; c < n; ++c) xc[c] = centroid[c] - 0.5 * (centroid[c] - worst[c]);
        const double fc = f(xc);
        if (fc < fv.back()) {
          vx.back() = std::move(xc);
          fv.back() = fc;
        } else {
          shrink = true;
        }
      }
      if (shrink) {
        for (std::size_t i = 1; i < vx.size(); ++i) {
          for (std::size_t c = 0; c < n; ++c) {
            vx[i][c] = vx[0][c] + 0.5 * (vx[i][c] - vx[0][c]);
          }
          fv[i] = f(vx[i]);
        }
      }
    }
    order();
  }
  return {vx[0], fv[0], iter, false};
}

}  // namespace

double radical_inverse(unsigned index, unsigned base) {
  double result = 0.0;
  double digit = 1.0 / static_cast<double>(base);
  while (index > 0) {
    result += static_cast<double>(index % base) * digit;
    index /= base;
    digit /= static_cast<double>(base);
  }
  return result;
}

OptimizerResult minimize_box(const Objective& f, const std::vector<double>& lo,
                             const std::vector<double>& hi, const OptimizerConfig& config) {
  if (lo.size() != hi.size()) throw DimensionMismatch("box bounds differ in dimension");
  for (std::size_t c = 0; c < lo.size(); ++c) {
    if (!(lo[c] <= hi[c])) throw ConfigError("empty optimization box");
  }
  if (config.multistarts < 1) throw ConfigError("multistart count must be at least 1");

  const std::size_t n = lo.size();
  const Objective boxed = [&](const std::vector<double>& x) {
    for (std::size_t c = 0; c < n; ++c) {
      if (x[c] < lo[c] || x[c] > hi[c]) return kInfeasibleValue;
    }
    return f(x);
  };

  if (n == 0) {
    std::vector<double> empty;
    return {empty, f(empty), 0, true, config.multistarts};
  }

  OptimizerResult best;
  bool have_best = false;
  int total_iterations = 0;
  int starts_converged = 0;
  for (int s = 0; s < config.multistarts; ++s) {
    std::vector<double> x0(n);
    for (std::size_t c = 0; c < n; ++c) {
      const double frac = radical_inverse(static_cast<unsigned>(s + 1), nth_prime(c));
      x0[c] = lo[c] + frac * (hi[c] - lo[c]);
    }
    SingleResult r = run_simplex(boxed, x0, lo, hi, config);
    total_iterations += r.iterations;
    if (r.converged) ++starts_converged;
    if (!have_best || r.value < best.value) {
      best.x = r.x;
      best.value = r.value;
      best.converged = r.converged;
      have_best = true;
    }
  }
  best.iterations = total_iterations;
  best.starts_converged = starts_converged;
  if (starts_converged == 0) {
    throw OptimizerDiverged("no simplex start converged within the iteration cap");
  }
  return best;
}

}  // namespace recur
