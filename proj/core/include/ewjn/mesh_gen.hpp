#pragma once

#include "ewjn/mesh.hpp"

namespace ewjn {

// Ball of given radius: icosphere shells (subdivision `level`) at `layers`
// radial steps, prisms split into tets with globally consistent diagonals.
TetMesh generate_ball(double radius, int level, int layers,
                      const Eigen::Vector3d& center = Eigen::Vector3d::Zero());

// Axis-aligned box [origin, origin + size], cubic cells of edge `cell`
// (rounded to an integer grid), each cube split into 6 tets (Kuhn).
TetMesh generate_box(const Eigen::Vector3d& origin, const Eigen::Vector3d& size, double cell);

// Disjoint union of meshes (separate connected components).
TetMesh merge_meshes(const std::vector<TetMesh>& parts);

}  // namespace ewjn
