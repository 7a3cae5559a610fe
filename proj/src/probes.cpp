#include "eqs/probes.hpp"

#include "eqs/assembly.hpp"

namespace eqs {

std::optional<PointLocation> locate_point(const TetMesh& mesh,
                                          const std::array<double, 3>& p) {
  for (int t = 0; t < mesh.n_tets(); ++t) {
    std::array<std::array<double, 3>, 4> coords;
    for (int v = 0; v < 4; ++v) coords[v] = mesh.nodes[mesh.tets[t][v]];
    const TetGeometry geo = tet_geometry(coords);

    // lambda_i(p) = lambda_i(v0) + grad_lambda_i . (p - v0); lambda_0(v0) = 1
    PointLocation loc;
    loc.tet = t;
    double min_lambda = 1.0;
    for (int i = 0; i < 4; ++i) {
      double l = i == 0 ? 1.0 : 0.0;
      for (int d = 0; d < 3; ++d) l += geo.grad_lambda[i][d] * (p[d] - coords[0][d]);
      loc.lambda[i] = l;
      min_lambda = std::min(min_lambda, l);
    }
    if (min_lambda >= -1e-12) return loc;
  }
  return std::nullopt;
}

double interpolate(const DofMap& dm, const Vec& x_full, const PointLocation& loc) {
  const auto& lam = loc.lambda;
  const auto& dofs = dm.element_dofs[loc.tet];
  double value = 0.0;
  if (dm.order == 1) {
    for (int i = 0; i < 4; ++i) value += lam[i] * x_full[dofs[i]];
    return value;
  }
  for (int i = 0; i < 4; ++i) value += lam[i] * (2.0 * lam[i] - 1.0) * x_full[dofs[i]];
  for (int e = 0; e < 6; ++e) {
    const int a = kTetEdgeVertices[e][0], b = kTetEdgeVertices[e][1];
    value += 4.0 * lam[a] * lam[b] * x_full[dofs[4 + e]];
  }
  return value;
}

}  // namespace eqs
