#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace ewjn {

// Analytic potential integrals for the VIE self/near terms.

// integral over the triangle (v0, v1, v2) of 1/|r' - obs| dS'.
double tri_inv_r(const Eigen::Vector3d& v0, const Eigen::Vector3d& v1, const Eigen::Vector3d& v2,
                 const Eigen::Vector3d& obs);

// integral over the triangle of |r' - obs| dS'.
double tri_r(const Eigen::Vector3d& v0, const Eigen::Vector3d& v1, const Eigen::Vector3d& v2,
             const Eigen::Vector3d& obs);

// integral over the tet of 1/|r' - obs| dV'.
double tet_inv_r(const std::array<Eigen::Vector3d, 4>& v, const Eigen::Vector3d& obs);

// integral over the tet of (r' - obs)/|r' - obs| dV'.
Eigen::Vector3d tet_grad_r(const std::array<Eigen::Vector3d, 4>& v, const Eigen::Vector3d& obs);

// Fixed quadrature rules in barycentric coordinates; weights sum to 1.
struct TetRule {
    std::vector<std::array<double, 4>> bary;
    std::vector<double> weight;
};
struct TriRule {
    std::vector<std::array<double, 3>> bary;
    std::vector<double> weight;
};

const TetRule& tet_rule_4();   // degree 2
const TetRule& tet_rule_11();  // degree 4 (Keast)
const TriRule& tri_rule_7();   // degree 5

}  // namespace ewjn
