#pragma once

#include <vector>

#include "eqs/ode_system.hpp"
#include "eqs/types.hpp"

namespace eqs {

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;
  long stages = 0;             // explicit stage evaluations
  long newton_iterations = 0;  // implicit path
};

struct RhoCache {
  double value = 0;
  long age = 0;  // accepted steps since the estimate
  bool valid = false;
};

struct IntegratorState {
  double t = 0;
  Vec x;
  double dt = 0;
  IntegratorStats stats;
  RhoCache rho;
};

/// One attempted step, as reported to the metrics stream.
struct StepAttempt {
  double t_start = 0;
  double dt = 0;
  bool accepted = false;
  int stages = 0;
  int newton_iterations = 0;
  double error = 0;     // weighted error estimate (accept when <= 1)
  double rho = 0;       // spectral-radius estimate in effect (explicit methods)
  double dt_next = 0;
};

struct StepControl {
  double rtol = 1e-2;
  double atol = 1e-8;
};

struct ControllerDecision {
  bool accept = false;
  double dt_next = 0;
};

/// accept iff err <= 1; dt_next = dt * clamp(0.8 err^(-1/(order+1)), 0.1, 10).
ControllerDecision step_controller(double err, double dt, int order);

/// || est_i / (atol + rtol max(|x_old_i|, |x_new_i|)) ||_RMS
double weighted_rms(const Vec& est, const Vec& x_old, const Vec& x_new, double atol,
                    double rtol);

/// Forward Euler x <- x + dt M^-1 (b(t+dt) - K(x) x); dt obeys the caller's
/// stability policy. Always accepted (no error control on this path).
StepAttempt euler_step(IntegratorState& state, OdeSystem& system, double dt);

/// Power iteration on v <- M^-1 K(x) v: 15 iterations from a fixed-seed
/// random start, times a 1.2 safety factor. Restarts (new seed) at most 3
/// times on breakdown.
double estimate_spectral_radius(OdeSystem& system, double t, const Vec& x);

/// Cached estimate: refreshed when invalid or older than refresh_every
/// accepted steps; rkc_step invalidates the cache on rejection.
double spectral_radius_cached(IntegratorState& state, OdeSystem& system,
                              int refresh_every = 25);

/// Chebyshev-recurrence coefficients of the damped s-stage scheme
/// (damping eps0 = 2/13). Validated against the scalar amplification oracle.
struct RkcCoefficients {
  int s = 0;
  double w0 = 0, w1 = 0;
  std::vector<double> t_w0, tp_w0, tpp_w0;         // T_j, T'_j, T''_j at w0
  std::vector<double> b, a, c;                     // j = 0..s
  double mu1_tilde = 0;                            // stage 1
  std::vector<double> mu, nu, mu_tilde, gamma_tilde;  // j = 2..s (index by j)

  static RkcCoefficients compute(int s);
  /// Scalar amplification a_s + b_s T_s(w0 + w1 z) (the stability polynomial).
  double amplification(double z) const;
  /// Damped real stability boundary: |amplification| <= 1 on [-beta(s), 0].
  static double stability_boundary(int s) { return 0.653 * (s * s - 1.0); }
};

struct RkcOptions {
  StepControl control;
  int max_stages = 200;
  int rho_refresh_every = 25;
};

/// Adaptive step: picks the smallest s >= 2 with dt rho <= 0.653 s^2, runs
/// the stage recurrence (one mass solve per stage), accepts when the
/// weighted error estimate is <= 1.
StepAttempt rkc_step(IntegratorState& state, OdeSystem& system, const RkcOptions& options);

/// Fixed-(dt, s) advance without error control, for convergence and
/// stability studies.
void rkc_advance_fixed(IntegratorState& state, OdeSystem& system, double dt, int s);

struct SdirkOptions {
  StepControl control;
  double newton_tol = 1e-8;  // relative to the stage's initial nonlinear residual
  int max_newton = 25;
};

/// Stiffly accurate 3-stage singly diagonal implicit Runge-Kutta of order 3
/// with an embedded order-2 error estimate. Each stage runs Newton-Raphson
/// with the quasi-Newton matrix M + gamma dt K(z), rebuilt every iteration;
/// the preconditioner is refreshed once per step and reused within it.
StepAttempt sdirk_step(IntegratorState& state, OdeSystem& system, const SdirkOptions& options);

/// SDIRK advance with fixed dt (no controller), for convergence studies.
bool sdirk_advance_fixed(IntegratorState& state, OdeSystem& system, double dt,
                         const SdirkOptions& options);

}  // namespace eqs
