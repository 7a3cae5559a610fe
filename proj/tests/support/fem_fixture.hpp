#pragma once

#include <memory>

#include "eqs/fem_system.hpp"
#include "eqs/mesh.hpp"

namespace eqs::test {

/// Owns everything a FemSystem references; keep it on the heap so the
/// references stay valid.
struct FemFixture {
  TetMesh mesh;
  DofMap dm;
  MaterialTable materials;
  BoundaryExcitation excitation;
  LinearSolverParams solver;
  EstimatorParams estimator;
  std::unique_ptr<FemSystem> system;

  FemSystem& sys() { return *system; }
};

struct SlabSpec {
  int nx = 3, ny = 3, nz = 6;
  double lx = 0.01, ly = 0.01, lz = 0.02;
  double eps1 = 2.0, eps2 = 5.0;
  double kappa1 = 1e-8, kappa2 = 5e-9;
  double amplitude = 1e4, frequency = 50.0;
  int order = 1;
  EstimatorParams estimator;
  PrecondKind precond = PrecondKind::Amg;

  double d1() const { return lz / 2; }
  double d2() const { return lz / 2; }
  double c1() const { return eps1 * vacuum_permittivity / d1(); }
  double c2() const { return eps2 * vacuum_permittivity / d2(); }
  double g1() const { return kappa1 / d1(); }
  double g2() const { return kappa2 / d2(); }
};

/// Two-layer slab between grounded z=0 and a driven z=lz electrode; the
/// interface potential of the exact 1D solution obeys the RC-divider ODE
///   (c1+c2) phi' + (g1+g2) phi = c2 u' + g2 u.
inline std::unique_ptr<FemFixture> make_slab(const SlabSpec& spec) {
  auto f = std::make_unique<FemFixture>();
  LayerSpec layers;
  layers.z_planes = {spec.lz / 2};
  layers.regions = {1, 2};
  f->mesh = generate_box_mesh(spec.nx, spec.ny, spec.nz, spec.lx, spec.ly, spec.lz, layers);
  f->dm = build_dof_map(f->mesh, spec.order, {"ground", "hv"});
  f->materials[1].eps_r = spec.eps1;
  f->materials[1].conductivity = ConstantConductivity{spec.kappa1};
  f->materials[2].eps_r = spec.eps2;
  f->materials[2].conductivity = ConstantConductivity{spec.kappa2};
  f->excitation = BoundaryExcitation{
      {{"ground", ConstantWaveform{0.0}},
       {"hv", SinusoidWaveform{spec.amplitude, spec.frequency, 0.0}}}};
  f->solver.precond = spec.precond;
  f->estimator = spec.estimator;
  f->system = std::make_unique<FemSystem>(f->mesh, f->dm, f->materials, f->excitation,
                                          f->solver, f->estimator, 1);
  return f;
}

}  // namespace eqs::test
