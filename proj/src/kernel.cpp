#include "recur/kernel.hpp"

#include <cmath>
#include <cstddef>

#include "recur/errors.hpp"
#include "recur/stats.hpp"

namespace recur {

namespace {

double index_of(const std::vector<double>& theta, const std::vector<double>& z) {
  if (theta.size() != z.size()) {
    throw DimensionMismatch("index direction and covariates differ in dimension");
  }
  double v = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) v += theta[k] * z[k];
  return v;
}

}  // namespace

double kernel_eval(const KernelSpec& spec, double x) {
  if (x < -1.0 || x > 1.0) return 0.0;
  const double s = 1.0 - x * x;
  if (spec.family == KernelFamily::epanechnikov) return 0.75 * s;
  return (15.0 / 16.0) * s * s;
}

double kernel_deriv(const KernelSpec& spec, double x) {
  if (x < -1.0 || x > 1.0) return 0.0;
  if (spec.family == KernelFamily::epanechnikov) return -1.5 * x;
  return -(15.0 / 4.0) * x * (1.0 - x * x);
}

double kernel_second(const KernelSpec& spec, double x) {
  if (x < -1.0 || x > 1.0) return 0.0;
  if (spec.family == KernelFamily::epanechnikov) return -1.5;
  return -(15.0 / 4.0) * (1.0 - 3.0 * x * x);
}

KernelContext KernelContext::build(const Sample& sample, const CensoringFit& fit) {
  KernelContext ctx;
  ctx.sample = &sample;
  ctx.fit = &fit;
  ctx.Y.reserve(sample.n());
  for (const Subject& s : sample.subjects) ctx.Y.push_back(rescaled_process(s, fit));
  return ctx;
}

std::vector<double> index_values(const std::vector<double>& theta, const Sample& sample) {
  std::vector<double> v(sample.n());
  for (std::size_t i = 0; i < sample.n(); ++i) v[i] = index_of(theta, sample.subjects[i].Z);
  return v;
}

double mu_hat(double t, double u, const std::vector<double>& theta, const KernelSpec& spec,
              const KernelContext& ctx, LeaveOut leave_out) {
  if (!(spec.h > 0.0)) throw ConfigError("bandwidth must be positive");
  const std::size_t n = ctx.sample->n();
  double denom = 0.0, num = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (leave_out && *leave_out == j) continue;
    const double w = kernel_eval(spec, (index_of(theta, ctx.sample->subjects[j].Z) - u) / spec.h);
    if (w == 0.0) continue;
    denom += w;
    num += w * ctx.Y[j](t);
  }
  if (denom <= 0.0) throw EmptyWindow("no subject index within bandwidth of evaluation point");
  return num / denom;
}

double mu_hat(double t, double u, const std::vector<double>& theta, const KernelSpec& spec,
              const Sample& sample, const CensoringFit& fit, LeaveOut leave_out) {
  return mu_hat(t, u, theta, spec, KernelContext::build(sample, fit), leave_out);
}

Eigen::VectorXd grad_mu_hat(double t, const std::vector<double>& z,
                            const std::vector<double>& theta, const KernelSpec& spec,
                            const KernelContext& ctx, LeaveOut leave_out) {
  if (!(spec.h > 0.0)) throw ConfigError("bandwidth must be positive");
  const std::size_t n = ctx.sample->n();
  const std::size_t d = theta.size();
  const double u = index_of(theta, z);

  double denom = 0.0, num = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (leave_out && *leave_out == j) continue;
    const double w = kernel_eval(spec, (index_of(theta, ctx.sample->subjects[j].Z) - u) / spec.h);
    if (w == 0.0) continue;
    denom += w;
    num += w * ctx.Y[j](t);
  }
  if (denom <= 0.0) throw EmptyWindow("no subject index within bandwidth of evaluation point");
  const double mu = num / denom;

  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d) - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (leave_out && *leave_out == j) continue;
    const std::vector<double>& zj = ctx.sample->subjects[j].Z;
    const double x = (index_of(theta, zj) - u) / spec.h;
    const double kd = kernel_deriv(spec, x);
    if (kd == 0.0) continue;
    const double scale = kd * (ctx.Y[j](t) - mu) / (denom * spec.h);
    for (std::size_t k = 1; k < d; ++k) {
      g[static_cast<Eigen::Index>(k) - 1] += scale * (zj[k] - z[k]);
    }
  }
  return g;
}

Eigen::VectorXd grad_mu_hat(double t, const std::vector<double>& z,
                            const std::vector<double>& theta, const KernelSpec& spec,
                            const Sample& sample, const CensoringFit& fit, LeaveOut leave_out) {
  return grad_mu_hat(t, z, theta, spec, KernelContext::build(sample, fit), leave_out);
}

Eigen::VectorXd grad_mu_hat_fd(double t, const std::vector<double>& z,
                               const std::vector<double>& theta, const KernelSpec& spec,
                               const KernelContext& ctx, LeaveOut leave_out, double step) {
  const std::size_t d = theta.size();
  Eigen::VectorXd g(static_cast<Eigen::Index>(d) - 1);
  for (std::size_t k = 1; k < d; ++k) {
    std::vector<double> up = theta, dn = theta;
    up[k] += step;
    dn[k] -= step;
    double uu = 0.0, ud = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      uu += up[j] * z[j];
      ud += dn[j] * z[j];
    }
    const double fu = mu_hat(t, uu, up, spec, ctx, leave_out);
    const double fd = mu_hat(t, ud, dn, spec, ctx, leave_out);
    g[static_cast<Eigen::Index>(k) - 1] = (fu - fd) / (2.0 * step);
  }
  return g;
}

double density_hat(double u, const std::vector<double>& theta, const KernelSpec& spec,
                   const Sample& sample) {
  if (!(spec.h > 0.0)) throw ConfigError("bandwidth must be positive");
  const std::size_t n = sample.n();
  if (n == 0) throw EmptySample("density estimate needs at least one subject");
  double acc = 0.0;
  for (const Subject& s : sample.subjects) {
    acc += kernel_eval(spec, (index_of(theta, s.Z) - u) / spec.h);
  }
  return acc / (static_cast<double>(n) * spec.h);
}

TrimmingSpec resolve_trimming(const TrimmingSpec& trim, const std::vector<double>& theta,
                              const KernelSpec& spec, const Sample& sample) {
  TrimmingSpec out = trim;
  if (out.mode == TrimmingSpec::Mode::preliminary_set) {
    if (out.box.empty()) {
      const std::size_t d = sample.d();
      out.box.resize(d);
      for (std::size_t k = 0; k < d; ++k) {
        std::vector<double> col(sample.n());
        for (std::size_t i = 0; i < sample.n(); ++i) col[i] = sample.subjects[i].Z[k];
        out.box[k] = {sample_quantile(col, out.box_quantile),
                      sample_quantile(col, 1.0 - out.box_quantile)};
      }
    }
    return out;
  }
  if (out.anchor_theta.empty()) out.anchor_theta = theta;
  if (out.c == 0.0) {
    std::vector<double> v = index_values(out.anchor_theta, sample);
    std::vector<double> dens(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      dens[i] = density_hat(v[i], out.anchor_theta, spec, sample);
    }
    out.c = sample_quantile(dens, out.c_quantile);
  }
  return out;
}

int trim_indicator(const std::vector<double>& z, const std::vector<double>& theta,
                   const TrimmingSpec& trim, const KernelSpec& spec, const Sample& sample) {
  const TrimmingSpec r = resolve_trimming(trim, theta, spec, sample);
  if (r.mode == TrimmingSpec::Mode::preliminary_set) {
    if (r.box.size() != z.size()) {
      throw DimensionMismatch("trimming box dimension does not match covariates");
    }
    for (std::size_t k = 0; k < z.size(); ++k) {
      if (z[k] < r.box[k].first || z[k] > r.box[k].second) return 0;
    }
    return 1;
  }
  double u = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) u += r.anchor_theta[k] * z[k];
  return density_hat(u, r.anchor_theta, spec, sample) >= r.c ? 1 : 0;
}

}  // namespace recur
