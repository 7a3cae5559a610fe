#include "eqs/vtk_writer.hpp"

#include <cstdio>
#include <fstream>

#include "eqs/assembly.hpp"
#include "eqs/errors.hpp"

namespace eqs {

void write_vtk(const std::string& path, const TetMesh& mesh, const DofMap& dm,
               const MaterialTable& materials, const Vec& x_full, const std::string& title) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  char buf[128];

  os << "# vtk DataFile Version 2.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.n_nodes() << " double\n";
  for (const auto& p : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n", p[0], p[1], p[2]);
    os << buf;
  }

  os << "CELLS " << mesh.n_tets() << " " << 5 * mesh.n_tets() << "\n";
  for (const auto& t : mesh.tets)
    os << "4 " << t[0] << " " << t[1] << " " << t[2] << " " << t[3] << "\n";
  os << "CELL_TYPES " << mesh.n_tets() << "\n";
  for (int t = 0; t < mesh.n_tets(); ++t) os << "10\n";

  os << "POINT_DATA " << mesh.n_nodes() << "\nSCALARS potential double 1\nLOOKUP_TABLE default\n";
  for (int n = 0; n < mesh.n_nodes(); ++n) {
    std::snprintf(buf, sizeof buf, "%.9g\n", x_full[n]);  // vertex dofs lead
    os << buf;
  }

  os << "CELL_DATA " << mesh.n_tets() << "\nSCALARS kappa double 1\nLOOKUP_TABLE default\n";
  double x_loc[10];
  for (int t = 0; t < mesh.n_tets(); ++t) {
    std::array<std::array<double, 3>, 4> coords;
    for (int v = 0; v < 4; ++v) coords[v] = mesh.nodes[mesh.tets[t][v]];
    const TetGeometry geo = tet_geometry(coords);
    for (int i = 0; i < dm.n_local; ++i) x_loc[i] = x_full[dm.element_dofs[t][i]];
    // field magnitude at the first quadrature point is representative per cell
    const double e_mag = gradient_magnitude(geo, dm.order, 0, x_loc);
    const double kappa = kappa_of_e(materials.at(mesh.region_id[t]), e_mag);
    std::snprintf(buf, sizeof buf, "%.9g\n", kappa);
    os << buf;
  }
}

}  // namespace eqs
