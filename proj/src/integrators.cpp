#include "eqs/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "eqs/errors.hpp"

namespace eqs {

ControllerDecision step_controller(double err, double dt, int order) {
  if (!std::isfinite(err)) return {false, 0.1 * dt};
  const bool accept = err <= 1.0;
  const double factor =
      err == 0.0 ? 10.0 : std::clamp(0.8 * std::pow(err, -1.0 / (order + 1)), 0.1, 10.0);
  return {accept, dt * factor};
}

double weighted_rms(const Vec& est, const Vec& x_old, const Vec& x_new, double atol,
                    double rtol) {
  const auto n = est.size();
  if (n == 0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = atol + rtol * std::max(std::abs(x_old[i]), std::abs(x_new[i]));
    const double e = est[i] / w;
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(n));
}

StepAttempt euler_step(IntegratorState& state, OdeSystem& system, double dt) {
  StepAttempt att;
  att.t_start = state.t;
  att.dt = dt;
  Vec f;
  system.eval_rhs(state.t + dt, state.x, f);  // forward difference, data at t^{n+1}
  state.x += dt * f;
  state.t += dt;
  ++state.stats.accepted;
  ++state.stats.stages;
  att.accepted = true;
  att.stages = 1;
  att.dt_next = dt;
  return att;
}

double estimate_spectral_radius(OdeSystem& system, double t, const Vec& x) {
  const int n = system.size();
  for (int restart = 0; restart < 4; ++restart) {
    std::mt19937 rng(7919u + 31u * static_cast<unsigned>(restart));
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = uni(rng);
    double nrm = v.norm();
    if (nrm == 0.0) continue;
    v /= nrm;

    Vec w;
    double rho = 0.0;
    bool annihilated = false;
    for (int it = 0; it < 15; ++it) {
      system.apply_minv_stiffness(t, x, v, w);
      rho = w.norm();
      if (rho == 0.0) {
        annihilated = true;
        break;
      }
      v = w / rho;
    }
    if (!annihilated) return 1.2 * rho;
  }
  return 0.0;  // operator vanished on every probe (kappa = 0 everywhere)
}

double spectral_radius_cached(IntegratorState& state, OdeSystem& system, int refresh_every) {
  if (!state.rho.valid || state.rho.age >= refresh_every) {
    state.rho.value = estimate_spectral_radius(system, state.t, state.x);
    state.rho.age = 0;
    state.rho.valid = true;
  }
  return state.rho.value;
}

RkcCoefficients RkcCoefficients::compute(int s) {
  if (s < 2) throw std::invalid_argument("rkc: stage count must be >= 2");
  RkcCoefficients k;
  k.s = s;
  const double eps0 = 2.0 / 13.0;
  k.w0 = 1.0 + eps0 / (static_cast<double>(s) * s);

  k.t_w0.resize(s + 1);
  k.tp_w0.resize(s + 1);
  k.tpp_w0.resize(s + 1);
  k.t_w0[0] = 1.0;
  k.tp_w0[0] = 0.0;
  k.tpp_w0[0] = 0.0;
  k.t_w0[1] = k.w0;
  k.tp_w0[1] = 1.0;
  k.tpp_w0[1] = 0.0;
  for (int j = 2; j <= s; ++j) {
    k.t_w0[j] = 2.0 * k.w0 * k.t_w0[j - 1] - k.t_w0[j - 2];
    k.tp_w0[j] = 2.0 * k.t_w0[j - 1] + 2.0 * k.w0 * k.tp_w0[j - 1] - k.tp_w0[j - 2];
    k.tpp_w0[j] = 4.0 * k.tp_w0[j - 1] + 2.0 * k.w0 * k.tpp_w0[j - 1] - k.tpp_w0[j - 2];
  }
  k.w1 = k.tp_w0[s] / k.tpp_w0[s];

  k.b.resize(s + 1);
  k.a.resize(s + 1);
  k.c.resize(s + 1);
  for (int j = 2; j <= s; ++j) k.b[j] = k.tpp_w0[j] / (k.tp_w0[j] * k.tp_w0[j]);
  k.b[0] = k.b[1] = k.b[2];
  for (int j = 0; j <= s; ++j) k.a[j] = 1.0 - k.b[j] * k.t_w0[j];

  k.c[0] = 0.0;
  for (int j = 2; j <= s; ++j)
    k.c[j] = (k.tp_w0[s] / k.tpp_w0[s]) * (k.tpp_w0[j] / k.tp_w0[j]);
  k.c[1] = k.c[2] / 4.0;

  k.mu1_tilde = k.b[1] * k.w1;
  k.mu.resize(s + 1);
  k.nu.resize(s + 1);
  k.mu_tilde.resize(s + 1);
  k.gamma_tilde.resize(s + 1);
  for (int j = 2; j <= s; ++j) {
    k.mu[j] = 2.0 * k.b[j] * k.w0 / k.b[j - 1];
    k.nu[j] = -k.b[j] / k.b[j - 2];
    k.mu_tilde[j] = 2.0 * k.b[j] * k.w1 / k.b[j - 1];
    k.gamma_tilde[j] = -k.a[j - 1] * k.mu_tilde[j];
  }
  return k;
}

double RkcCoefficients::amplification(double z) const {
  const double w = w0 + w1 * z;
  double tm2 = 1.0, tm1 = w;
  for (int j = 2; j <= s; ++j) {
    const double t = 2.0 * w * tm1 - tm2;
    tm2 = tm1;
    tm1 = t;
  }
  return a[s] + b[s] * tm1;
}

namespace {

const RkcCoefficients& rkc_coefficients(int s) {
  static std::map<int, RkcCoefficients> cache;
  auto it = cache.find(s);
  if (it == cache.end()) it = cache.emplace(s, RkcCoefficients::compute(s)).first;
  return it->second;
}

/// Stage recurrence: x_new = Y_s, f0 = F(t, x). One rhs evaluation per stage.
void rkc_stages(IntegratorState& state, OdeSystem& system, double dt,
                const RkcCoefficients& k, Vec& x_new, Vec& f0) {
  const double t = state.t;
  const Vec& y0 = state.x;
  system.eval_rhs(t, y0, f0);

  Vec y_jm2 = y0;
  Vec y_jm1 = y0 + k.mu1_tilde * dt * f0;
  Vec f, y_j;
  for (int j = 2; j <= k.s; ++j) {
    system.eval_rhs(t + k.c[j - 1] * dt, y_jm1, f);
    y_j = (1.0 - k.mu[j] - k.nu[j]) * y0 + k.mu[j] * y_jm1 + k.nu[j] * y_jm2 +
          k.mu_tilde[j] * dt * f + k.gamma_tilde[j] * dt * f0;
    std::swap(y_jm2, y_jm1);
    std::swap(y_jm1, y_j);
  }
  x_new = std::move(y_jm1);
}

}  // namespace

StepAttempt rkc_step(IntegratorState& state, OdeSystem& system, const RkcOptions& options) {
  StepAttempt att;
  att.t_start = state.t;

  const double rho = spectral_radius_cached(state, system, options.rho_refresh_every);
  att.rho = rho;
  double dt = state.dt;
  int s = 2;
  if (rho > 0.0) {
    s = std::max(2, static_cast<int>(std::ceil(std::sqrt(dt * rho / 0.653 + 1.0))));
    if (s > options.max_stages) {
      s = options.max_stages;
      dt = 0.95 * RkcCoefficients::stability_boundary(s) / rho;  // forced down
    }
  }
  att.dt = dt;
  att.stages = s;

  try {
    const RkcCoefficients& k = rkc_coefficients(s);
    Vec x_new, f0, f_new;
    rkc_stages(state, system, dt, k, x_new, f0);
    system.eval_rhs(state.t + dt, x_new, f_new);

    const Vec est = 0.8 * (state.x - x_new) + 0.4 * dt * (f0 + f_new);
    att.error = weighted_rms(est, state.x, x_new, options.control.atol, options.control.rtol);
    const ControllerDecision dec = step_controller(att.error, dt, 2);
    att.accepted = dec.accept && x_new.allFinite();
    att.dt_next = dec.dt_next;

    state.stats.stages += s;
    if (att.accepted) {
      state.x = std::move(x_new);
      state.t += dt;
      ++state.stats.accepted;
      ++state.rho.age;
    } else {
      ++state.stats.rejected;
      state.rho.valid = false;  // refresh after any rejection
    }
  } catch (const NumericalError&) {
    att.accepted = false;
    att.dt_next = 0.5 * dt;
    ++state.stats.rejected;
    state.rho.valid = false;
  }
  state.dt = att.dt_next;
  return att;
}

void rkc_advance_fixed(IntegratorState& state, OdeSystem& system, double dt, int s) {
  const RkcCoefficients& k = rkc_coefficients(s);
  Vec x_new, f0;
  rkc_stages(state, system, dt, k, x_new, f0);
  state.x = std::move(x_new);
  state.t += dt;
  ++state.stats.accepted;
  state.stats.stages += s;
}

namespace {

// stiffly accurate SDIRK3(2), gamma the real root of g^3 - 3g^2 + 3g/2 - 1/6
constexpr double kGamma = 0.435866521508459;
constexpr double kC[3] = {kGamma, (1.0 + kGamma) / 2.0, 1.0};
constexpr double kB1 = -1.5 * kGamma * kGamma + 4.0 * kGamma - 0.25;
constexpr double kB2 = 1.5 * kGamma * kGamma - 5.0 * kGamma + 1.25;
constexpr double kA[3][3] = {{kGamma, 0.0, 0.0},
                             {(1.0 - kGamma) / 2.0, kGamma, 0.0},
                             {kB1, kB2, kGamma}};
// embedded order-2 weights with bhat_3 = 0
constexpr double kBhat1 = kGamma / (1.0 - kGamma);
constexpr double kBhat2 = 1.0 - kBhat1;

/// Runs all three stages; returns false on Newton failure.
bool sdirk_stages(IntegratorState& state, OdeSystem& system, double dt,
                  const SdirkOptions& options, Vec& x_new, Vec& est, int& newton_iters) {
  const double t = state.t;
  const double gdt = kGamma * dt;
  Vec k[3];
  Vec w, z, g, mz, r_ode, delta;
  newton_iters = 0;

  for (int stage = 0; stage < 3; ++stage) {
    w = state.x;
    for (int j = 0; j < stage; ++j) w += dt * kA[stage][j] * k[j];
    const double ts = t + kC[stage] * dt;
    z = w;

    double scale = -1.0;
    bool converged = false;
    for (int it = 0;; ++it) {
      system.eval_residual(ts, z, r_ode);
      system.mass_apply(z - w, mz);
      g = mz - gdt * r_ode;
      const double gn = g.norm();
      if (!std::isfinite(gn)) return false;
      if (scale < 0.0) scale = gn;
      if (gn <= options.newton_tol * scale || gn == 0.0) {
        converged = true;
        break;
      }
      if (it >= options.max_newton) break;
      try {
        system.shifted_solve(ts, z, gdt, -g, delta, stage == 0 && it == 0);
      } catch (const NumericalError&) {
        return false;
      }
      z += delta;
      ++newton_iters;
    }
    if (!converged) return false;
    k[stage] = (z - w) / gdt;
  }

  x_new = std::move(z);  // third row equals the quadrature weights
  est = dt * ((kA[2][0] - kBhat1) * k[0] + (kA[2][1] - kBhat2) * k[1] + kGamma * k[2]);
  return true;
}

}  // namespace

StepAttempt sdirk_step(IntegratorState& state, OdeSystem& system, const SdirkOptions& options) {
  StepAttempt att;
  att.t_start = state.t;
  att.dt = state.dt;

  Vec x_new, est;
  int newton_iters = 0;
  const bool ok = sdirk_stages(state, system, state.dt, options, x_new, est, newton_iters);
  att.newton_iterations = newton_iters;
  state.stats.newton_iterations += newton_iters;

  if (!ok) {
    att.accepted = false;
    att.dt_next = 0.5 * state.dt;
    ++state.stats.rejected;
    state.dt = att.dt_next;
    return att;
  }

  att.error = weighted_rms(est, state.x, x_new, options.control.atol, options.control.rtol);
  const ControllerDecision dec = step_controller(att.error, state.dt, 3);
  att.accepted = dec.accept && x_new.allFinite();
  att.dt_next = dec.dt_next;
  if (att.accepted) {
    state.x = std::move(x_new);
    state.t += state.dt;
    ++state.stats.accepted;
  } else {
    ++state.stats.rejected;
  }
  state.dt = dec.dt_next;
  return att;
}

bool sdirk_advance_fixed(IntegratorState& state, OdeSystem& system, double dt,
                         const SdirkOptions& options) {
  Vec x_new, est;
  int newton_iters = 0;
  if (!sdirk_stages(state, system, dt, options, x_new, est, newton_iters)) return false;
  state.stats.newton_iterations += newton_iters;
  state.x = std::move(x_new);
  state.t += dt;
  ++state.stats.accepted;
  return true;
}

}  // namespace eqs
