#include "recur/survival.hpp"

#include <algorithm>
#include <cstddef>

#include "recur/errors.hpp"

namespace recur {

double CensoringFit::eta_integral(double x) const {
  auto it = std::upper_bound(g_jump_times.begin(), g_jump_times.end(), x);
  if (it == g_jump_times.begin()) return 0.0;
  return eta_integral_prefix[static_cast<std::size_t>(it - g_jump_times.begin()) - 1];
}

double CensoringFit::eta_integral_strict(double x) const {
  auto it = std::lower_bound(g_jump_times.begin(), g_jump_times.end(), x);
  if (it == g_jump_times.begin()) return 0.0;
  return eta_integral_prefix[static_cast<std::size_t>(it - g_jump_times.begin()) - 1];
}

CensoringFit kaplan_meier_censoring(const Sample& sample) {
  const std::size_t n = sample.n();
  if (n == 0) throw EmptySample("product-limit fit needs at least one subject");

  // Process follow-up times in increasing order; at-risk count at the k-th
  // smallest of n distinct times is n - k.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sample.subjects[a].T < sample.subjects[b].T;
  });

  CensoringFit out;
  std::vector<double> h_times(n), h_values(n);
  double surv = 1.0;  // 1 - G(t), running product
  for (std::size_t k = 0; k < n; ++k) {
    const Subject& s = sample.subjects[order[k]];
    h_times[k] = s.T;
    h_values[k] = static_cast<double>(k + 1) / static_cast<double>(n);
    if (!s.delta) {
      const long at_risk = static_cast<long>(n - k);
      const double factor = 1.0 - 1.0 / static_cast<double>(at_risk);
      const double g_before = 1.0 - surv;
      const double h_before = static_cast<double>(k) / static_cast<double>(n);
      surv *= factor;
      const double jump = (1.0 - surv) - g_before;
      if (jump > 0.0) {
        out.g_jump_times.push_back(s.T);
        out.g_jump_sizes.push_back(jump);
        out.at_risk_counts.push_back(at_risk);
        const double prev =
            out.eta_integral_prefix.empty() ? 0.0 : out.eta_integral_prefix.back();
        out.eta_integral_prefix.push_back(prev +
                                          jump / ((1.0 - h_before) * (1.0 - g_before)));
      }
    }
  }

  std::vector<double> g_values(out.g_jump_times.size());
  {
    double acc = 0.0;
    for (std::size_t k = 0; k < out.g_jump_times.size(); ++k) {
      acc += out.g_jump_sizes[k];
      g_values[k] = acc;
    }
  }
  out.G_hat = StepFunction(0.0, out.g_jump_times, std::move(g_values));
  out.H_hat = StepFunction(0.0, std::move(h_times), std::move(h_values));
  return out;
}

StepFunction rescaled_process(const Subject& subject, const CensoringFit& fit) {
  std::vector<double> sizes(subject.events.size());
  for (std::size_t k = 0; k < subject.events.size(); ++k) {
    const double denom = 1.0 - fit.G_hat.left_limit(subject.events[k]);
    if (denom <= 0.0) {
      throw DegenerateDenominator("censoring estimate reaches 1 before event time");
    }
    sizes[k] = 1.0 / denom;
  }
  return StepFunction::from_jumps(0.0, subject.events, sizes);
}

double eta_hat(const CensoringFit& fit, double T, bool delta, double t) {
  double first = 0.0;
  if (!delta && T <= t) {
    const double denom = 1.0 - fit.H_hat.left_limit(T);
    if (denom <= 0.0) {
      throw DegenerateDenominator("empirical follow-up law reaches 1 before T");
    }
    first = 1.0 / denom;
  }
  return first - fit.eta_integral(std::min(T, t));
}

double eta_hat_left(const CensoringFit& fit, double T, bool delta, double t) {
  double first = 0.0;
  if (!delta && T < t) {
    const double denom = 1.0 - fit.H_hat.left_limit(T);
    if (denom <= 0.0) {
      throw DegenerateDenominator("empirical follow-up law reaches 1 before T");
    }
    first = 1.0 / denom;
  }
  const double bound = (T < t) ? fit.eta_integral(T) : fit.eta_integral_strict(t);
  return first - bound;
}

}  // namespace recur
