#pragma once

#include <array>
#include <functional>

#include "eqs/csr.hpp"
#include "eqs/dofmap.hpp"
#include "eqs/excitation.hpp"
#include "eqs/materials.hpp"
#include "eqs/mesh.hpp"

namespace eqs {

/// Per-element geometry: constant barycentric gradients and volume.
struct TetGeometry {
  std::array<std::array<double, 3>, 4> grad_lambda;
  double volume = 0.0;
};

TetGeometry tet_geometry(const std::array<std::array<double, 3>, 4>& coords);

/// Quadrature points used per element: 1 (order 1, exact) or 4 (order 2,
/// degree-2 rule).
int quadrature_size(int order);

/// Shape-function gradients of all local dofs at quadrature point q,
/// written into grads[0..n_local-1].
void shape_gradients(const TetGeometry& geo, int order, int q,
                     std::array<std::array<double, 3>, 10>& grads);

/// Quadrature weight (includes the element volume) of point q.
double quadrature_weight(const TetGeometry& geo, int order, int q);

/// |grad x_h| at quadrature point q for local coefficient vector x_loc.
double gradient_magnitude(const TetGeometry& geo, int order, int q,
                          const double* x_loc);

/// Local weighted-Laplacian matrix: S[i][j] = sum_q w_q c_q grad N_i . grad N_j
/// with one coefficient value per quadrature point.
void element_laplacian(const TetGeometry& geo, int order, const double* coeff_at_qp,
                       double S[10][10]);

/// Local stiffness/mass pair of one tet: M uses the constant permittivity
/// eps (F/m), K uses kappa_at_qp (one value per quadrature point).
/// Matrices are n x n with n = 4 (order 1) or 10 (order 2).
struct ElementMatrices {
  int n = 4;
  double K[10][10];
  double M[10][10];
};
ElementMatrices element_matrices(const std::array<std::array<double, 3>, 4>& coords, int order,
                                 double eps, const double* kappa_at_qp);

/// Coefficient evaluated per element and quadrature point; e_mag is
/// |grad x_h| of the current state (0 when no state is involved).
using CoefficientFn = std::function<double(int tet, int qp, double e_mag)>;

/// Global scatter-add of local weighted-Laplacian matrices over all tets.
/// `state` may be empty (coefficient independent of the potential) or a
/// full-dof vector from which per-point field magnitudes are computed.
CsrMatrix assemble_matrix(const TetMesh& mesh, const DofMap& dm, const CoefficientFn& coeff,
                          const Vec& state = Vec());

/// eps-weighted Laplacian ("mass" matrix of the time derivative). Constant.
CsrMatrix assemble_mass(const TetMesh& mesh, const DofMap& dm, const MaterialTable& materials);

/// kappa-weighted Laplacian evaluated at the full-dof potential x_full.
CsrMatrix assemble_stiffness(const TetMesh& mesh, const DofMap& dm,
                             const MaterialTable& materials, const Vec& x_full);

/// Free/Dirichlet blocks of a full-dof matrix: A_II and A_IB.
struct DirichletBlocks {
  CsrMatrix AII;
  CsrMatrix AIB;
};
DirichletBlocks split_dirichlet(const CsrMatrix& a, const DofMap& dm);

/// b_I = -A_IB x_B, the free-dof load induced by Dirichlet values.
Vec dirichlet_rhs(const CsrMatrix& a_ib, const Vec& x_b);

/// Right-hand side of the free-dof ODE at time t:
///   b(t) = -K_IB x_B(t) - M_IB dx_B/dt(t).
Vec build_rhs(double t, const BoundaryExcitation& exc, const DirichletBlocks& mass,
              const DirichletBlocks& stiffness, const DofMap& dm);

}  // namespace eqs
