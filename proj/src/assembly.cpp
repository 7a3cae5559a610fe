#include "eqs/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "eqs/errors.hpp"

namespace eqs {

namespace {

// degree-2 rule on the tet: 4 symmetric points, weight V/4 each
constexpr double kQa = 0.58541019662496845446;
constexpr double kQb = 0.13819660112501051518;
constexpr double kQuadPoints[4][4] = {{kQa, kQb, kQb, kQb},
                                      {kQb, kQa, kQb, kQb},
                                      {kQb, kQb, kQa, kQb},
                                      {kQb, kQb, kQb, kQa}};
constexpr double kCentroid[4] = {0.25, 0.25, 0.25, 0.25};

const double* barycentric_point(int order, int q) {
  return order == 1 ? kCentroid : kQuadPoints[q];
}

const MaterialModel& material_for(const MaterialTable& materials, int region) {
  auto it = materials.find(region);
  if (it == materials.end())
    throw ConfigError("no material for region " + std::to_string(region));
  return it->second;
}

}  // namespace

TetGeometry tet_geometry(const std::array<std::array<double, 3>, 4>& p) {
  double e[3][3];
  for (int c = 0; c < 3; ++c)
    for (int d = 0; d < 3; ++d) e[c][d] = p[c + 1][d] - p[0][d];

  // cross products of edge vectors give rows of the inverse Jacobian
  double cr[3][3];
  cr[0][0] = e[1][1] * e[2][2] - e[1][2] * e[2][1];
  cr[0][1] = e[1][2] * e[2][0] - e[1][0] * e[2][2];
  cr[0][2] = e[1][0] * e[2][1] - e[1][1] * e[2][0];
  cr[1][0] = e[2][1] * e[0][2] - e[2][2] * e[0][1];
  cr[1][1] = e[2][2] * e[0][0] - e[2][0] * e[0][2];
  cr[1][2] = e[2][0] * e[0][1] - e[2][1] * e[0][0];
  cr[2][0] = e[0][1] * e[1][2] - e[0][2] * e[1][1];
  cr[2][1] = e[0][2] * e[1][0] - e[0][0] * e[1][2];
  cr[2][2] = e[0][0] * e[1][1] - e[0][1] * e[1][0];

  const double det = e[0][0] * cr[0][0] + e[0][1] * cr[0][1] + e[0][2] * cr[0][2];
  if (det == 0.0) throw GeometryError("degenerate tetrahedron in element kernel");

  TetGeometry g;
  g.volume = det / 6.0;
  for (int i = 0; i < 3; ++i)
    for (int d = 0; d < 3; ++d) g.grad_lambda[i + 1][d] = cr[i][d] / det;
  for (int d = 0; d < 3; ++d)
    g.grad_lambda[0][d] = -g.grad_lambda[1][d] - g.grad_lambda[2][d] - g.grad_lambda[3][d];
  return g;
}

int quadrature_size(int order) { return order == 1 ? 1 : 4; }

double quadrature_weight(const TetGeometry& geo, int order, int /*q*/) {
  return order == 1 ? geo.volume : 0.25 * geo.volume;
}

void shape_gradients(const TetGeometry& geo, int order, int q,
                     std::array<std::array<double, 3>, 10>& grads) {
  if (order == 1) {
    for (int i = 0; i < 4; ++i) grads[i] = geo.grad_lambda[i];
    return;
  }
  const double* lam = barycentric_point(order, q);
  for (int i = 0; i < 4; ++i) {
    const double f = 4.0 * lam[i] - 1.0;
    for (int d = 0; d < 3; ++d) grads[i][d] = f * geo.grad_lambda[i][d];
  }
  for (int e = 0; e < 6; ++e) {
    const int a = kTetEdgeVertices[e][0], b = kTetEdgeVertices[e][1];
    for (int d = 0; d < 3; ++d)
      grads[4 + e][d] = 4.0 * (lam[a] * geo.grad_lambda[b][d] + lam[b] * geo.grad_lambda[a][d]);
  }
}

double gradient_magnitude(const TetGeometry& geo, int order, int q, const double* x_loc) {
  std::array<std::array<double, 3>, 10> grads;
  shape_gradients(geo, order, q, grads);
  const int n = order == 1 ? 4 : 10;
  double g[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < 3; ++d) g[d] += x_loc[i] * grads[i][d];
  return std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
}

void element_laplacian(const TetGeometry& geo, int order, const double* coeff_at_qp,
                       double S[10][10]) {
  const int n = order == 1 ? 4 : 10;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) S[i][j] = 0.0;

  std::array<std::array<double, 3>, 10> grads;
  for (int q = 0; q < quadrature_size(order); ++q) {
    shape_gradients(geo, order, q, grads);
    const double wc = quadrature_weight(geo, order, q) * coeff_at_qp[q];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        const double gij = grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1] +
                           grads[i][2] * grads[j][2];
        S[i][j] += wc * gij;
      }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) S[i][j] = S[j][i];
}

ElementMatrices element_matrices(const std::array<std::array<double, 3>, 4>& coords, int order,
                                 double eps, const double* kappa_at_qp) {
  const TetGeometry geo = tet_geometry(coords);
  ElementMatrices em;
  em.n = order == 1 ? 4 : 10;
  double eps_at_qp[4];
  for (int q = 0; q < quadrature_size(order); ++q) eps_at_qp[q] = eps;
  element_laplacian(geo, order, eps_at_qp, em.M);
  element_laplacian(geo, order, kappa_at_qp, em.K);
  return em;
}

CsrMatrix assemble_matrix(const TetMesh& mesh, const DofMap& dm, const CoefficientFn& coeff,
                          const Vec& state) {
  const int n = dm.n_local;
  const bool has_state = state.size() == dm.n_dofs;

  std::vector<std::vector<int>> pattern(dm.n_dofs);
  for (int t = 0; t < mesh.n_tets(); ++t)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) pattern[dm.element_dofs[t][i]].push_back(dm.element_dofs[t][j]);
  for (auto& row : pattern) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  CsrMatrix a = CsrMatrix::from_pattern(std::move(pattern));

  double S[10][10];
  double c_at_qp[4];
  double x_loc[10];
  for (int t = 0; t < mesh.n_tets(); ++t) {
    std::array<std::array<double, 3>, 4> coords;
    for (int v = 0; v < 4; ++v) coords[v] = mesh.nodes[mesh.tets[t][v]];
    const TetGeometry geo = tet_geometry(coords);

    if (has_state)
      for (int i = 0; i < n; ++i) x_loc[i] = state[dm.element_dofs[t][i]];
    for (int q = 0; q < quadrature_size(dm.order); ++q) {
      const double e_mag = has_state ? gradient_magnitude(geo, dm.order, q, x_loc) : 0.0;
      c_at_qp[q] = coeff(t, q, e_mag);
    }
    element_laplacian(geo, dm.order, c_at_qp, S);

    for (int i = 0; i < n; ++i) {
      const int gi = dm.element_dofs[t][i];
      for (int j = 0; j < n; ++j) {
        double* slot = a.find(gi, dm.element_dofs[t][j]);
        *slot += S[i][j];
      }
    }
  }
  return a;
}

CsrMatrix assemble_mass(const TetMesh& mesh, const DofMap& dm, const MaterialTable& materials) {
  return assemble_matrix(mesh, dm, [&](int t, int, double) {
    return material_for(materials, mesh.region_id[t]).permittivity();
  });
}

CsrMatrix assemble_stiffness(const TetMesh& mesh, const DofMap& dm,
                             const MaterialTable& materials, const Vec& x_full) {
  return assemble_matrix(
      mesh, dm,
      [&](int t, int, double e_mag) {
        return kappa_of_e(material_for(materials, mesh.region_id[t]), e_mag);
      },
      x_full);
}

DirichletBlocks split_dirichlet(const CsrMatrix& a, const DofMap& dm) {
  DirichletBlocks b;
  b.AII = extract_block(a, dm.free_dofs, dm.free_dofs);
  b.AIB = extract_block(a, dm.free_dofs, dm.fixed_dofs);
  return b;
}

Vec dirichlet_rhs(const CsrMatrix& a_ib, const Vec& x_b) {
  Vec b;
  a_ib.apply(x_b, b);
  b = -b;
  return b;
}

Vec build_rhs(double t, const BoundaryExcitation& exc, const DirichletBlocks& mass,
              const DirichletBlocks& stiffness, const DofMap& dm) {
  const Vec xb = exc.boundary_values(dm, t);
  const Vec xb_dot = exc.boundary_rates(dm, t);
  return -(stiffness.AIB.apply(xb)) - mass.AIB.apply(xb_dot);
}

}  // namespace eqs
