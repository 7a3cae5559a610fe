#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "eqs/integrators.hpp"
#include "support/fem_fixture.hpp"
#include "support/test_helpers.hpp"

using namespace eqs;

namespace {

/// Independent route to the stability polynomial: Chebyshev three-term
/// recurrences evaluated directly at w0 and w0 + w1 z.
double oracle_amplification(int s, double z) {
  const double eps0 = 2.0 / 13.0;
  const double w0 = 1.0 + eps0 / (static_cast<double>(s) * s);
  std::vector<double> t(s + 1), tp(s + 1), tpp(s + 1);
  t[0] = 1; tp[0] = 0; tpp[0] = 0;
  t[1] = w0; tp[1] = 1; tpp[1] = 0;
  for (int j = 2; j <= s; ++j) {
    t[j] = 2 * w0 * t[j - 1] - t[j - 2];
    tp[j] = 2 * t[j - 1] + 2 * w0 * tp[j - 1] - tp[j - 2];
    tpp[j] = 4 * tp[j - 1] + 2 * w0 * tpp[j - 1] - tpp[j - 2];
  }
  const double w1 = tp[s] / tpp[s];
  const double bs = tpp[s] / (tp[s] * tp[s]);
  const double as = 1.0 - bs * t[s];
  const double arg = w0 + w1 * z;
  double um2 = 1.0, um1 = arg;
  for (int j = 2; j <= s; ++j) {
    const double u = 2 * arg * um1 - um2;
    um2 = um1;
    um1 = u;
  }
  return as + bs * (s == 0 ? 1.0 : um1);
}

double scalar_rkc_amplification(int s, double z) {
  const double dt = 1.0;  // z = -dt k with dt = 1
  test::DiagonalSystem sys = test::scalar_system(1.0, -z);
  IntegratorState state;
  state.t = 0;
  state.x = Vec::Ones(1);
  rkc_advance_fixed(state, sys, dt, s);
  return state.x[0];
}

}  // namespace

TEST_CASE("step controller formula and clamps") {
  const auto at_one = step_controller(1.0, 2.0, 2);
  CHECK(at_one.accept);
  CHECK(at_one.dt_next == doctest::Approx(0.8 * 2.0));

  const auto exact = step_controller(0.0, 1.0, 2);
  CHECK(exact.accept);
  CHECK(exact.dt_next == doctest::Approx(10.0));

  const auto rejected = step_controller(4.0, 1.0, 1);
  CHECK_FALSE(rejected.accept);

  double prev = std::numeric_limits<double>::infinity();
  for (double err : {0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 1e4}) {
    const auto d = step_controller(err, 1.0, 2);
    CHECK(d.dt_next <= prev);
    prev = d.dt_next;
  }
  CHECK(step_controller(1e9, 1.0, 2).dt_next == doctest::Approx(0.1));
}

TEST_CASE("euler on the scalar surrogate reproduces 1 - dt*lambda") {
  const double lambda = 3.0, dt = 0.1;
  test::DiagonalSystem sys = test::scalar_system(1.0, lambda);
  IntegratorState state;
  state.x = Vec::Ones(1);
  euler_step(state, sys, dt);
  CHECK(state.x[0] == doctest::Approx(1.0 - dt * lambda).epsilon(1e-15));
  CHECK(state.t == dt);

  // amplification |1 - dt*lambda| <= 1 exactly while dt*lambda <= 2
  for (double z : {0.5, 1.0, 1.9999, 2.0})
    CHECK(std::abs(1.0 - z) <= 1.0 + 1e-15);
  CHECK(std::abs(1.0 - 2.1) > 1.0);
}

TEST_CASE("spectral radius estimate on diag(1..10) lands in [10, 12]") {
  Vec k(10);
  for (int i = 0; i < 10; ++i) k[i] = i + 1.0;
  test::DiagonalSystem sys(Vec::Ones(10), k);
  const double rho = estimate_spectral_radius(sys, 0.0, Vec::Zero(10));
  CHECK(rho >= 10.0);
  CHECK(rho <= 12.0);

  test::DiagonalSystem sys2(Vec::Ones(10), 2.0 * k);
  const double rho2 = estimate_spectral_radius(sys2, 0.0, Vec::Zero(10));
  CHECK(rho2 == doctest::Approx(2.0 * rho).epsilon(1e-2));
}

TEST_CASE("spectral radius cache refreshes by age and after invalidation") {
  Vec k(4);
  k << 1, 2, 3, 4;
  test::DiagonalSystem sys(Vec::Ones(4), k);
  IntegratorState state;
  state.x = Vec::Zero(4);
  const double v1 = spectral_radius_cached(state, sys, 25);
  const long solves_after_first = sys.stats().rho_solves;
  const double v2 = spectral_radius_cached(state, sys, 25);
  CHECK(v1 == v2);
  CHECK(sys.stats().rho_solves == solves_after_first);  // cache hit
  state.rho.age = 25;
  spectral_radius_cached(state, sys, 25);
  CHECK(sys.stats().rho_solves > solves_after_first);
}

TEST_CASE("rkc stage recurrence matches the Chebyshev amplification oracle") {
  for (int s : {2, 5, 13}) {
    const double beta = RkcCoefficients::stability_boundary(s);
    for (int i = 0; i < 20; ++i) {
      const double z = -beta * (i + 0.5) / 20.0;
      CAPTURE(s);
      CAPTURE(z);
      CHECK(std::abs(scalar_rkc_amplification(s, z) - oracle_amplification(s, z)) <= 1e-12);
    }
  }
}

TEST_CASE("rkc coefficients: c_s = 1 and the closed form agrees with the oracle") {
  for (int s : {2, 5, 13, 40}) {
    const RkcCoefficients k = RkcCoefficients::compute(s);
    CHECK(k.c[s] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(k.c[1] == doctest::Approx(k.c[2] / 4).epsilon(1e-13));
    for (double z : {-0.1, -1.0, -0.5 * RkcCoefficients::stability_boundary(s)})
      CHECK(k.amplification(z) == doctest::Approx(oracle_amplification(s, z)).epsilon(1e-12));
  }
}

TEST_CASE("damped stability: |P_s(z)| <= 1 on [-0.653 (s^2-1), 0]") {
  for (int s : {2, 5, 10, 20}) {
    const double beta = RkcCoefficients::stability_boundary(s);
    const RkcCoefficients k = RkcCoefficients::compute(s);
    double worst = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      const double z = -beta * i / 10000.0;
      worst = std::max(worst, std::abs(k.amplification(z)));
    }
    CAPTURE(s);
    CHECK(worst <= 1.0 + 1e-12);
  }
}

TEST_CASE("scalar convergence orders: euler 1, rkc 2, sdirk 3") {
  // M y' = b(t) - k y with a smooth drive and the closed-form solution as
  // the reference (mild damping so the order-p transient term dominates)
  const double k = 1.0, t_end = 1.0, a = 3.0, b = 7.0;
  const auto drive = [=](double t) { return std::sin(a * t) + 0.5 * std::cos(b * t); };
  const auto exact = [=](double t) {
    const double p1 = (k * std::sin(a * t) - a * std::cos(a * t)) / (k * k + a * a);
    const double p2 = 0.5 * (k * std::cos(b * t) + b * std::sin(b * t)) / (k * k + b * b);
    const double p1_0 = -a / (k * k + a * a);
    const double p2_0 = 0.5 * k / (k * k + b * b);
    return p1 + p2 - (p1_0 + p2_0) * std::exp(-k * t);
  };
  const double reference = exact(t_end);

  const auto run = [&](int method, double dt) {
    test::DiagonalSystem sys = test::scalar_system(1.0, k, drive);
    IntegratorState state;
    state.x = Vec::Zero(1);
    const int n = static_cast<int>(std::round(t_end / dt));
    SdirkOptions sopts;
    for (int i = 0; i < n; ++i) {
      if (method == 0) euler_step(state, sys, dt);
      else if (method == 1) rkc_advance_fixed(state, sys, dt, 5);
      else REQUIRE(sdirk_advance_fixed(state, sys, dt, sopts));
    }
    return std::abs(state.x[0] - reference);
  };

  for (int method : {0, 1, 2}) {
    std::vector<double> errors;
    for (double dt : {1.0 / 40, 1.0 / 80, 1.0 / 160, 1.0 / 320}) errors.push_back(run(method, dt));
    const double slope = test::fitted_order(errors);
    CAPTURE(method);
    if (method == 0) CHECK(std::abs(slope - 1.0) <= 0.1);
    if (method == 1) CHECK(std::abs(slope - 2.0) <= 0.15);
    if (method == 2) CHECK(std::abs(slope - 3.0) <= 0.2);
  }
}

TEST_CASE("sdirk on a linear system converges in one Newton iteration per stage") {
  Vec k(3);
  k << 1.0, 5.0, 9.0;
  test::DiagonalSystem sys(Vec::Ones(3), k);
  IntegratorState state;
  state.x = test::random_vec(3, 2);
  state.dt = 0.05;
  const StepAttempt att = sdirk_step(state, sys, SdirkOptions{});
  CHECK(att.accepted);
  CHECK(att.newton_iterations == 3);  // one per stage
  CHECK(sys.stats().precond_setups == 1);  // refreshed once per step
}

TEST_CASE("embedded error estimates scale like dt^3") {
  const auto drive = [](double t) { return std::cos(2.0 * t); };
  for (int method : {1, 2}) {  // rkc, sdirk
    std::vector<double> est;
    for (double dt : {0.02, 0.01, 0.005, 0.0025}) {
      test::DiagonalSystem sys = test::scalar_system(1.0, 3.0, drive);
      IntegratorState state;
      state.x = Vec::Ones(1);
      state.dt = dt;
      StepControl ctrl{0.0, 1.0};  // weights = 1: the raw estimate norm
      ctrl.rtol = 0.0;
      ctrl.atol = 1.0;
      StepAttempt att;
      if (method == 1) {
        RkcOptions opts;
        opts.control = ctrl;
        att = rkc_step(state, sys, opts);
      } else {
        SdirkOptions opts;
        opts.control = ctrl;
        att = sdirk_step(state, sys, opts);
      }
      REQUIRE(att.accepted);
      est.push_back(att.error);
    }
    const double slope = test::fitted_order(est);
    CAPTURE(method);
    CHECK(std::abs(slope - 3.0) <= 0.3);
  }
}

TEST_CASE("rkc picks the smallest stage count within the damped boundary") {
  Vec k(6);
  k << 10.0, 40.0, 90.0, 160.0, 250.0, 400.0;
  test::DiagonalSystem sys(Vec::Ones(6), k);
  IntegratorState state;
  state.x = test::random_vec(6, 3);
  state.dt = 0.5;
  RkcOptions opts;
  opts.control.atol = 1e4;  // force acceptance; this test is about stage choice
  const StepAttempt att = rkc_step(state, sys, opts);
  CHECK(att.accepted);
  const double z = att.dt * att.rho;
  CHECK(RkcCoefficients::stability_boundary(att.stages) >= z);
  if (att.stages > 2) CHECK(RkcCoefficients::stability_boundary(att.stages - 1) < z);
}

TEST_CASE("rkc stage cap forces the step size down") {
  Vec k(2);
  k << 1e8, 3e7;
  test::DiagonalSystem sys(Vec::Ones(2), k);
  IntegratorState state;
  state.x = Vec::Ones(2);
  state.dt = 10.0;
  RkcOptions opts;
  opts.max_stages = 10;
  opts.control.atol = 1e9;
  const StepAttempt att = rkc_step(state, sys, opts);
  CHECK(att.stages == 10);
  CHECK(att.dt <= RkcCoefficients::stability_boundary(10) / att.rho);
}

TEST_CASE("fem spectral radius estimate brackets the dense generalized eigenvalue") {
  test::SlabSpec spec;
  spec.nx = spec.ny = 3;
  spec.nz = 3;
  auto f = test::make_slab(spec);
  const double rho = estimate_spectral_radius(f->sys(), 0.0, Vec::Zero(f->dm.n_free()));

  // dense oracle: K z = lambda M z on the free dofs
  const CsrMatrix k_full =
      assemble_stiffness(f->mesh, f->dm, f->materials,
                         f->sys().lift_full(0.0, Vec::Zero(f->dm.n_free())));
  const Mat k_ii = split_dirichlet(k_full, f->dm).AII.to_dense();
  const Mat m_ii = f->sys().mass_free().to_dense();
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> eig(k_ii, m_ii);
  const double lambda_max = eig.eigenvalues().maxCoeff();
  CHECK(rho >= 1.0 * lambda_max);
  CHECK(rho <= 1.25 * lambda_max);
}

TEST_CASE("energy seminorm decays for the undriven system") {
  // linear materials, and a microvaristor layer driven past its switch by
  // the initial state: both dissipate
  for (bool nonlinear : {false, true}) {
    CAPTURE(nonlinear);
    auto f = std::make_unique<test::FemFixture>();
    LayerSpec layers;
    layers.z_planes = {0.004, 0.008};
    layers.regions = {1, 2, 3};
    f->mesh = generate_box_mesh(4, 4, 8, 0.006, 0.006, 0.012, layers);
    f->dm = build_dof_map(f->mesh, 1, {"ground", "hv"});
    f->materials[1].eps_r = 3.0;
    f->materials[1].conductivity = ConstantConductivity{1e-9};
    if (nonlinear)
      f->materials[2] = {12.0, MicrovaristorConductivity{1e-10, 3e-6, 5e5, 5e4}};
    else
      f->materials[2] = {12.0, ConstantConductivity{3e-7}};
    f->materials[3] = f->materials[1];
    f->excitation = BoundaryExcitation{
        {{"ground", ConstantWaveform{0.0}}, {"hv", ConstantWaveform{0.0}}}};
    f->system = std::make_unique<FemSystem>(f->mesh, f->dm, f->materials, f->excitation,
                                            f->solver, f->estimator, 1);
    FemSystem& sys = f->sys();

    IntegratorState state;
    state.t = 0;
    state.x = 2e4 * test::random_vec(f->dm.n_free(), 31);
    const double rho = estimate_spectral_radius(sys, 0.0, state.x);
    const int s = 5;
    const double dt = 0.9 * RkcCoefficients::stability_boundary(s) / rho;

    Vec mx;
    sys.mass_apply(state.x, mx);
    double energy = state.x.dot(mx);
    for (int step = 0; step < 20; ++step) {
      rkc_advance_fixed(state, sys, dt, s);
      sys.mass_apply(state.x, mx);
      const double next = state.x.dot(mx);
      CHECK(next <= energy * (1.0 + 1e-10));
      energy = next;
    }
    CHECK(energy >= 0.0);
  }
}

TEST_CASE("pure capacitive problem tracks the scaled static solution") {
  test::SlabSpec spec;
  spec.kappa1 = spec.kappa2 = 0.0;
  spec.amplitude = 100.0;
  auto f = test::make_slab(spec);
  FemSystem& sys = f->sys();

  // static solution of the permittivity operator with unit drive
  const CsrMatrix& m_ii = sys.mass_free();
  Vec xb_unit(f->dm.n_fixed());
  for (int i = 0; i < f->dm.n_fixed(); ++i)
    xb_unit[i] = f->dm.set_names[f->dm.fixed_set[f->dm.fixed_dofs[i]]] == "hv" ? 1.0 : 0.0;
  const CsrMatrix m_ib = split_dirichlet(assemble_mass(f->mesh, f->dm, f->materials), f->dm).AIB;
  const Vec phi_static = Eigen::LDLT<Mat>(m_ii.to_dense()).solve(dirichlet_rhs(m_ib, xb_unit));

  IntegratorState state;
  state.t = 0;
  state.x = Vec::Zero(f->dm.n_free());
  state.dt = 1e-5;
  RkcOptions opts;
  opts.control.rtol = 1e-10;  // per-step quadrature errors accumulate over the run
  opts.control.atol = 1e-10 * spec.amplitude;
  const double scale = spec.amplitude * phi_static.lpNorm<Eigen::Infinity>();
  while (state.t < 2e-3) {
    rkc_step(state, sys, opts);
    const double u = spec.amplitude *
                     std::sin(2 * std::numbers::pi * spec.frequency * state.t);
    CHECK((state.x - u * phi_static).lpNorm<Eigen::Infinity>() <= 1e-6 * scale);
  }
}
