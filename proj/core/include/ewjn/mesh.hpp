#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ewjn {

// Tetrahedral mesh with face adjacency. Tets must have positive signed
// volume; every face borders one tet (boundary) or two (interior).
struct TetMesh {
    std::vector<Eigen::Vector3d> nodes;
    std::vector<std::array<int, 4>> tets;

    struct Face {
        std::array<int, 3> nodes;  // sorted node ids
        int tet_plus = -1;         // owner with outward/defining orientation
        int tet_minus = -1;        // -1 for boundary faces
        double area = 0.0;
        Eigen::Vector3d normal;    // unit, from plus tet into minus tet (or outward)
        Eigen::Vector3d center;
    };
    std::vector<Face> faces;
    std::vector<std::array<int, 4>> tet_faces;  // face ids per tet

    // Derived geometry.
    std::vector<double> tet_volume;
    std::vector<Eigen::Vector3d> tet_centroid;
    std::vector<double> tet_diameter;  // longest edge
    double min_edge = 0.0;
    double max_edge = 0.0;
    int interior_face_count = 0;
    int boundary_face_count = 0;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t tet_count() const { return tets.size(); }
};

// Validates connectivity and builds adjacency/geometry. Throws parse_error on
// inverted tets or non-manifold faces.
TetMesh make_mesh(std::vector<Eigen::Vector3d> nodes, std::vector<std::array<int, 4>> tets);

// Reads Gmsh ASCII v2 (.msh) or the native JSON {"nodes": [...], "tets": [...]}
// format, chosen by content sniffing.
TetMesh load_mesh(const std::string& path);

void save_mesh_msh(const TetMesh& mesh, const std::string& path);

}  // namespace ewjn
