#pragma once

#include <string>

#include "eqs/dofmap.hpp"
#include "eqs/materials.hpp"
#include "eqs/mesh.hpp"
#include "eqs/types.hpp"

namespace eqs {

/// Legacy ASCII VTK 2.0 unstructured grid: the tet mesh with the potential
/// as POINT_DATA (vertex dofs) and the conductivity evaluated from the
/// element field magnitude as CELL_DATA.
void write_vtk(const std::string& path, const TetMesh& mesh, const DofMap& dm,
               const MaterialTable& materials, const Vec& x_full,
               const std::string& title = "potential");

}  // namespace eqs
