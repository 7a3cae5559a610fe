#pragma once

#include <string>

#include "eqs/mesh.hpp"

namespace eqs {

/// Read a Gmsh MSH 2.2 ASCII file. 4-node tetrahedra (type 4) become mesh
/// tets with their physical volume tag as region id; 3-node triangles
/// (type 2) contribute their nodes to a boundary set named after the
/// physical surface ("surface_<tag>" when no $PhysicalNames entry exists).
/// Other element types are ignored.
TetMesh load_msh(const std::string& path);

/// Write MSH 2.2 ASCII. Boundary sets are emitted as the surface triangles
/// of the mesh whose three nodes belong to the set, tagged per set, so that
/// load_msh(write_msh(m)) round-trips connectivity, regions and sets.
void write_msh(const TetMesh& mesh, const std::string& path);

}  // namespace eqs
