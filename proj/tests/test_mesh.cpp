#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <set>

#include "eqs/errors.hpp"
#include "eqs/mesh.hpp"
#include "eqs/msh_io.hpp"
#include "support/test_helpers.hpp"

using namespace eqs;

TEST_CASE("unit cube splits into 6 positive tets of total volume 1") {
  const TetMesh m = generate_box_mesh(1, 1, 1, 1, 1, 1);
  CHECK(m.n_nodes() == 8);
  CHECK(m.n_tets() == 6);
  for (int t = 0; t < m.n_tets(); ++t) CHECK(m.tet_volume(t) > 0.0);
  CHECK(m.total_volume() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("2x2x2 box: node and tet counts by enumeration") {
  const TetMesh m = generate_box_mesh(2, 2, 2, 1.0, 1.0, 1.0);
  CHECK(m.n_nodes() == 27);   // (nx+1)(ny+1)(nz+1)
  CHECK(m.n_tets() == 48);    // 6 nx ny nz
  CHECK(m.total_volume() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("box volume equals lx ly lz for anisotropic cells") {
  const TetMesh m = generate_box_mesh(3, 4, 5, 0.03, 0.02, 0.075);
  CHECK(m.total_volume() ==
        doctest::Approx(0.03 * 0.02 * 0.075).epsilon(1e-12));
}

TEST_CASE("layer split assigns regions by centroid z") {
  LayerSpec layers;
  layers.z_planes = {0.5};
  layers.regions = {1, 2};
  const TetMesh m = generate_box_mesh(2, 2, 4, 1, 1, 1, layers);
  for (int t = 0; t < m.n_tets(); ++t) {
    const double zc = m.tet_centroid(t)[2];
    CHECK(m.region_id[t] == (zc < 0.5 ? 1 : 2));
  }
}

TEST_CASE("ground and hv boundary sets sit on the z extremes") {
  const TetMesh m = generate_box_mesh(2, 3, 4, 1, 1, 2);
  const auto& ground = m.boundary_sets.at("ground");
  const auto& hv = m.boundary_sets.at("hv");
  CHECK(ground.size() == 3 * 4);
  CHECK(hv.size() == 3 * 4);
  for (int n : ground) CHECK(m.nodes[n][2] == 0.0);
  for (int n : hv) CHECK(m.nodes[n][2] == 2.0);
}

TEST_CASE("generated boxes are conforming: interior faces shared by exactly 2 tets") {
  const TetMesh m = generate_box_mesh(3, 2, 2, 1, 1, 1);
  std::map<std::array<int, 3>, int> face_count;
  static const int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (const auto& tet : m.tets)
    for (const auto& f : faces) {
      std::array<int, 3> key = {tet[f[0]], tet[f[1]], tet[f[2]]};
      std::sort(key.begin(), key.end());
      ++face_count[key];
    }
  int boundary = 0;
  for (const auto& [key, count] : face_count) {
    CHECK((count == 1 || count == 2));
    if (count == 1) ++boundary;
  }
  CHECK(boundary == 4 * (3 * 2 + 2 * 2 + 3 * 2));  // two triangles per surface quad
}

TEST_CASE("finalize reorients inverted tets and rejects degenerate ones") {
  TetMesh m = generate_box_mesh(1, 1, 1, 1, 1, 1);
  std::swap(m.tets[0][0], m.tets[0][1]);  // invert one tet
  CHECK(m.tet_volume(0) < 0.0);
  m.finalize();
  CHECK(m.tet_volume(0) > 0.0);

  TetMesh degenerate = m;
  degenerate.tets[2] = {0, 1, 2, 2};
  CHECK_THROWS_AS(degenerate.finalize(), GeometryError);
}

TEST_CASE("finalize rejects overlapping boundary sets and bad indices") {
  TetMesh m = generate_box_mesh(1, 1, 2, 1, 1, 1);
  m.boundary_sets["extra"] = {m.boundary_sets.at("ground").front()};
  CHECK_THROWS_AS(m.finalize(), GeometryError);

  TetMesh bad = generate_box_mesh(1, 1, 1, 1, 1, 1);
  bad.tets[0][3] = 99;
  CHECK_THROWS_AS(bad.finalize(), GeometryError);
}

TEST_CASE("generate_box_mesh argument errors") {
  CHECK_THROWS_AS(generate_box_mesh(0, 1, 1, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_box_mesh(1, 1, 1, -1, 1, 1), std::invalid_argument);
  LayerSpec bad;
  bad.z_planes = {2.0};
  bad.regions = {1, 2};
  CHECK_THROWS_AS(generate_box_mesh(1, 1, 1, 1, 1, 1, bad), std::invalid_argument);
}

TEST_CASE("minimal msh file: one tet, one physical tag") {
  const auto path = test::temp_file("single.msh");
  test::write_text(path,
                   "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
                   "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n$EndNodes\n"
                   "$Elements\n1\n1 4 2 7 1 1 2 3 4\n$EndElements\n");
  const TetMesh m = load_msh(path.string());
  CHECK(m.n_tets() == 1);
  CHECK(m.n_nodes() == 4);
  CHECK(m.region_id[0] == 7);
  std::filesystem::remove(path);
}

TEST_CASE("msh round trip preserves connectivity, regions and boundary sets") {
  LayerSpec layers;
  layers.z_planes = {0.5};
  layers.regions = {3, 9};
  const TetMesh m = generate_box_mesh(2, 2, 2, 1, 1, 1, layers);
  const auto path = test::temp_file("roundtrip.msh");
  write_msh(m, path.string());
  const TetMesh r = load_msh(path.string());
  REQUIRE(r.n_nodes() == m.n_nodes());
  REQUIRE(r.n_tets() == m.n_tets());
  CHECK(r.nodes == m.nodes);
  CHECK(r.tets == m.tets);
  CHECK(r.region_id == m.region_id);
  CHECK(r.boundary_sets == m.boundary_sets);
  std::filesystem::remove(path);
}

TEST_CASE("hv triangles on z=1 recover exactly the z=1 nodes") {
  const TetMesh m = generate_box_mesh(3, 3, 2, 1, 1, 1);
  const auto path = test::temp_file("hvplane.msh");
  write_msh(m, path.string());
  const TetMesh r = load_msh(path.string());
  std::set<int> expected;  // oracle: enumerate nodes on the plane from coordinates
  for (int n = 0; n < r.n_nodes(); ++n)
    if (r.nodes[n][2] == 1.0) expected.insert(n);
  const auto& hv = r.boundary_sets.at("hv");
  CHECK(std::set<int>(hv.begin(), hv.end()) == expected);
  std::filesystem::remove(path);
}

TEST_CASE("truncated $Nodes section names the section in the error") {
  const auto path = test::temp_file("trunc.msh");
  test::write_text(path,
                   "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
                   "$Nodes\n4\n1 0 0 0\n2 1 0 0\n");
  CHECK_THROWS_WITH_AS(load_msh(path.string()),
                       doctest::Contains("$Nodes"), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("msh parser error cases") {
  const auto bad_header = test::temp_file("badheader.msh");
  test::write_text(bad_header, "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n");
  CHECK_THROWS_AS(load_msh(bad_header.string()), ParseError);
  std::filesystem::remove(bad_header);

  const auto no_tets = test::temp_file("notets.msh");
  test::write_text(no_tets,
                   "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
                   "$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n"
                   "$Elements\n1\n1 2 1 5 1 2 3\n$EndElements\n");
  CHECK_THROWS_AS(load_msh(no_tets.string()), GeometryError);
  std::filesystem::remove(no_tets);

  CHECK_THROWS_AS(load_msh("/nonexistent/path.msh"), ParseError);
}

TEST_CASE("unknown msh sections are skipped") {
  const auto path = test::temp_file("extra.msh");
  test::write_text(path,
                   "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
                   "$Comments\nanything at all\n$EndComments\n"
                   "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n$EndNodes\n"
                   "$Elements\n1\n1 4 1 3 1 2 3 4\n$EndElements\n");
  const TetMesh m = load_msh(path.string());
  CHECK(m.n_tets() == 1);
  std::filesystem::remove(path);
}

TEST_CASE("inverted tet in a msh file is silently reoriented") {
  const auto path = test::temp_file("inverted.msh");
  test::write_text(path,
                   "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
                   "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n$EndNodes\n"
                   "$Elements\n1\n1 4 1 1 2 1 3 4\n$EndElements\n");
  const TetMesh m = load_msh(path.string());
  CHECK(m.tet_volume(0) > 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("surface_nodes finds the box surface") {
  const TetMesh m = generate_box_mesh(2, 2, 2, 1, 1, 1);
  const auto surf = surface_nodes(m);
  CHECK(surf.size() == 26);  // all but the center node of the 27
}
