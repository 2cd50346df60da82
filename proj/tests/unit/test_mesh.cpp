#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "ewjn/errors.hpp"
#include "ewjn/mesh.hpp"

using namespace ewjn;
using Eigen::Vector3d;

namespace {

TetMesh single_tet() {
    return make_mesh({Vector3d(0, 0, 0), Vector3d(1, 0, 0), Vector3d(0, 1, 0), Vector3d(0, 0, 1)},
                     {{0, 1, 2, 3}});
}

}  // namespace

TEST_CASE("single tetrahedron: one tet, four boundary faces, no interior") {
    const TetMesh m = single_tet();
    CHECK(m.tet_count() == 1);
    CHECK(m.interior_face_count == 0);
    CHECK(m.boundary_face_count == 4);
    CHECK(m.tet_volume[0] == doctest::Approx(1.0 / 6.0));
    CHECK(m.min_edge == doctest::Approx(1.0));
    CHECK(m.max_edge == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("two tets sharing a face produce one interior face") {
    const TetMesh m = make_mesh({Vector3d(0, 0, 0), Vector3d(1, 0, 0), Vector3d(0, 1, 0),
                                 Vector3d(0, 0, 1), Vector3d(1, 1, 1)},
                                {{0, 1, 2, 3}, {1, 2, 3, 4}});
    CHECK(m.tet_count() == 2);
    CHECK(m.interior_face_count == 1);
    CHECK(m.boundary_face_count == 6);
}

TEST_CASE("inverted tets are rejected with a descriptive error") {
    CHECK_THROWS_AS(make_mesh({Vector3d(0, 0, 0), Vector3d(1, 0, 0), Vector3d(0, 1, 0),
                               Vector3d(0, 0, 1)},
                              {{0, 2, 1, 3}}),
                    parse_error);
}

TEST_CASE("out-of-range node indices are rejected") {
    CHECK_THROWS_AS(make_mesh({Vector3d(0, 0, 0), Vector3d(1, 0, 0), Vector3d(0, 1, 0)},
                              {{0, 1, 2, 5}}),
                    parse_error);
}

TEST_CASE("boundary face normals point outward") {
    const TetMesh m = single_tet();
    const Vector3d centroid = m.tet_centroid[0];
    for (const auto& f : m.faces) {
        CHECK(f.normal.dot(f.center - centroid) > 0.0);
    }
}

TEST_CASE("gmsh v2 round trip preserves the mesh") {
    const TetMesh m = make_mesh({Vector3d(0, 0, 0), Vector3d(1e-7, 0, 0), Vector3d(0, 1e-7, 0),
                                 Vector3d(0, 0, 1e-7), Vector3d(1e-7, 1e-7, 1e-7)},
                                {{0, 1, 2, 3}, {1, 2, 3, 4}});
    const std::string path = "roundtrip_test.msh";
    save_mesh_msh(m, path);
    const TetMesh back = load_mesh(path);
    std::remove(path.c_str());
    REQUIRE(back.tet_count() == m.tet_count());
    CHECK(back.interior_face_count == m.interior_face_count);
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        CHECK((back.nodes[i] - m.nodes[i]).norm() < 1e-20);
    }
}

TEST_CASE("native json meshes load") {
    const std::string path = "mesh_test.json";
    {
        std::ofstream out(path);
        out << R"({"nodes": [[0,0,0],[1,0,0],[0,1,0],[0,0,1]], "tets": [[0,1,2,3]]})";
    }
    const TetMesh m = load_mesh(path);
    std::remove(path.c_str());
    CHECK(m.tet_count() == 1);
    CHECK_THROWS_AS(load_mesh("definitely_missing_5123.msh"), parse_error);
}
