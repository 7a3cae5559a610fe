#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Cholesky>
#include <set>

#include "eqs/assembly.hpp"
#include "eqs/matfree.hpp"
#include "support/test_helpers.hpp"

using namespace eqs;

namespace {

struct Setup {
  TetMesh mesh;
  DofMap dm;
  MaterialTable mats;
};

Setup make_setup(int order, bool nonlinear, int n = 3) {
  Setup s;
  LayerSpec layers;
  layers.z_planes = {0.5};
  layers.regions = {1, 2};
  s.mesh = generate_box_mesh(n, n, n, 1, 1, 1, layers);
  s.dm = build_dof_map(s.mesh, order, {"ground", "hv"});
  s.mats[1].eps_r = 2.0;
  s.mats[1].conductivity = ConstantConductivity{1e-8};
  s.mats[2].eps_r = 5.0;
  if (nonlinear)
    s.mats[2].conductivity = MicrovaristorConductivity{1e-10, 1e-4, 0.5, 0.2};
  else
    s.mats[2].conductivity = ConstantConductivity{3e-9};
  return s;
}

}  // namespace

TEST_CASE("fused apply equals the assembled stiffness product") {
  for (int order : {1, 2})
    for (bool nonlinear : {false, true}) {
      CAPTURE(order);
      CAPTURE(nonlinear);
      const Setup s = make_setup(order, nonlinear);
      const Vec x = 2.0 * test::random_vec(s.dm.n_dofs, 101 + order);
      const Vec v = test::random_vec(s.dm.n_dofs, 202 + order);

      const CsrMatrix k = assemble_stiffness(s.mesh, s.dm, s.mats, x);
      const Vec oracle = k.apply(v);

      const MatFreeStiffness op(s.mesh, s.dm, s.mats, 1);
      Vec y;
      op.apply(x, v, y);
      CHECK((y - oracle).lpNorm<Eigen::Infinity>() <=
            1e-12 * oracle.lpNorm<Eigen::Infinity>());
    }
}

TEST_CASE("apply on the all-ones vector vanishes (Laplacian row sums)") {
  const Setup s = make_setup(2, true);
  const MatFreeStiffness op(s.mesh, s.dm, s.mats, 1);
  const Vec x = test::random_vec(s.dm.n_dofs, 7);
  Vec y;
  op.apply(x, Vec::Ones(s.dm.n_dofs), y);
  // scale: |K|_inf of the assembled operator
  const CsrMatrix k = assemble_stiffness(s.mesh, s.dm, s.mats, x);
  double scale = 0.0;
  for (double val : k.values) scale = std::max(scale, std::abs(val));
  CHECK(y.lpNorm<Eigen::Infinity>() <= 1e-12 * scale);
}

TEST_CASE("fused apply is linear in v") {
  const Setup s = make_setup(1, true);
  const MatFreeStiffness op(s.mesh, s.dm, s.mats, 1);
  for (unsigned seed = 0; seed < 4; ++seed) {
    const Vec x = test::random_vec(s.dm.n_dofs, 1 + 10 * seed);
    const Vec v1 = test::random_vec(s.dm.n_dofs, 2 + 10 * seed);
    const Vec v2 = test::random_vec(s.dm.n_dofs, 3 + 10 * seed);
    const double a = -2.75 + seed;
    Vec y1, y2, y12;
    op.apply(x, v1, y1);
    op.apply(x, v2, y2);
    op.apply(x, a * v1 + v2, y12);
    CHECK((y12 - (a * y1 + y2)).norm() <= 1e-13 * (a * y1 + y2).norm());
  }
}

TEST_CASE("residual equals the assembled route on random inputs") {
  const Setup s = make_setup(2, true);
  const MatFreeStiffness op(s.mesh, s.dm, s.mats, 1);
  const Vec x_full = test::random_vec(s.dm.n_dofs, 31);
  const Vec b_mass = test::random_vec(s.dm.n_free(), 32);

  Vec r;
  op.residual(x_full, b_mass, r);

  const CsrMatrix k = assemble_stiffness(s.mesh, s.dm, s.mats, x_full);
  const Vec kx = k.apply(x_full);
  Vec oracle(s.dm.n_free());
  for (int i = 0; i < s.dm.n_free(); ++i) oracle[i] = b_mass[i] - kx[s.dm.free_dofs[i]];
  CHECK((r - oracle).lpNorm<Eigen::Infinity>() <=
        1e-12 * std::max(1.0, oracle.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("residual vanishes at the steady state of the linear DC problem") {
  const Setup s = make_setup(1, false);
  // steady state: K_II x_I = -K_IB x_B with unit drive on hv
  const CsrMatrix k = assemble_stiffness(s.mesh, s.dm, s.mats, Vec::Zero(s.dm.n_dofs));
  const DirichletBlocks kb = split_dirichlet(k, s.dm);
  Vec xb(s.dm.n_fixed());
  for (int i = 0; i < s.dm.n_fixed(); ++i)
    xb[i] = s.dm.set_names[s.dm.fixed_set[s.dm.fixed_dofs[i]]] == "hv" ? 1.0 : 0.0;
  const Vec b = dirichlet_rhs(kb.AIB, xb);
  const Vec x_i = Eigen::LDLT<Mat>(kb.AII.to_dense()).solve(b);
  Vec x_full;
  s.dm.lift(x_i, xb, x_full);

  const MatFreeStiffness op(s.mesh, s.dm, s.mats, 1);
  Vec r;
  op.residual(x_full, Vec::Zero(s.dm.n_free()), r);
  CHECK(r.norm() <= 1e-10 * b.norm());

  Vec r0;
  op.residual(Vec::Zero(s.dm.n_dofs), Vec::Zero(s.dm.n_free()), r0);
  CHECK(r0.norm() == 0.0);  // zero excitation, zero state
}

TEST_CASE("element coloring separates dof-sharing tets") {
  const Setup s = make_setup(2, false, 3);
  const auto batches = color_elements(s.dm, s.mesh.n_tets());
  int total = 0;
  for (const auto& batch : batches) {
    std::set<int> dofs;
    for (int t : batch) {
      for (int i = 0; i < s.dm.n_local; ++i) {
        const bool inserted = dofs.insert(s.dm.element_dofs[t][i]).second;
        CHECK(inserted);
      }
    }
    total += static_cast<int>(batch.size());
  }
  CHECK(total == s.mesh.n_tets());
}

TEST_CASE("result is bit-identical across worker counts and scatter strategies") {
  const Setup s = make_setup(2, true);
  const Vec x = test::random_vec(s.dm.n_dofs, 55);
  const Vec v = test::random_vec(s.dm.n_dofs, 56);
  const MatFreeStiffness serial(s.mesh, s.dm, s.mats, 1);
  Vec y_ref;
  serial.apply(x, v, y_ref);
  for (int workers : {2, 4}) {
    const MatFreeStiffness par(s.mesh, s.dm, s.mats, workers);
    Vec y;
    par.apply(x, v, y);
    CHECK((y - y_ref).lpNorm<Eigen::Infinity>() == 0.0);  // colored scatter has a fixed order
  }
  const MatFreeStiffness priv(s.mesh, s.dm, s.mats, 3,
                              MatFreeStiffness::Scatter::PrivateBuffers);
  Vec y_priv;
  priv.apply(x, v, y_priv);
  CHECK((y_priv - y_ref).lpNorm<Eigen::Infinity>() <=
        1e-13 * y_ref.lpNorm<Eigen::Infinity>());
}

TEST_CASE("worker-local scratch does not grow with the mesh") {
  const Setup small = make_setup(2, false, 2);
  const Setup big = make_setup(2, false, 5);
  const MatFreeStiffness op_small(small.mesh, small.dm, small.mats, 4);
  const MatFreeStiffness op_big(big.mesh, big.dm, big.mats, 4);
  CHECK(op_small.scratch_bytes() == op_big.scratch_bytes());
  CHECK(op_big.scratch_bytes() <= 4 * 2048);  // workers x (local matrix + gather buffers)

  // the private-buffer fallback is the one allowed to scale with dofs
  const MatFreeStiffness fallback(big.mesh, big.dm, big.mats, 4,
                                  MatFreeStiffness::Scatter::PrivateBuffers);
  CHECK(fallback.scratch_bytes() > op_big.scratch_bytes());
}

TEST_CASE("dimension mismatches are rejected") {
  const Setup s = make_setup(1, false, 2);
  const MatFreeStiffness op(s.mesh, s.dm, s.mats, 1);
  Vec y;
  CHECK_THROWS_AS(op.apply(Vec::Zero(3), Vec::Zero(s.dm.n_dofs), y), std::invalid_argument);
  CHECK_THROWS_AS(op.apply(Vec::Zero(s.dm.n_dofs), Vec::Zero(3), y), std::invalid_argument);
}
