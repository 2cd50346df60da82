#include "ewjn/singular.hpp"

#include <cmath>

namespace ewjn {

using Eigen::Vector3d;

namespace detail {

// Core routine shared by tri_inv_r / tri_r. Computes both integrals at once.
void tri_potentials(const Vector3d& v0, const Vector3d& v1, const Vector3d& v2, const Vector3d& obs,
                    double& inv_r, double& r_int) {
    const Vector3d n_raw = (v1 - v0).cross(v2 - v0);
    const double two_area = n_raw.norm();
    inv_r = 0.0;
    r_int = 0.0;
    if (two_area < 1e-300) return;
    const Vector3d n = n_raw / two_area;

    const double w = n.dot(obs - v0);
    const Vector3d proj = obs - w * n;
    const double aw = std::abs(w);
    const double scale = std::sqrt(two_area);

    const Vector3d verts[3] = {v0, v1, v2};
    double sum_inv = 0.0;
    double sum_r = 0.0;
    for (int e = 0; e < 3; ++e) {
        const Vector3d a = verts[e];
        const Vector3d b = verts[(e + 1) % 3];
        const Vector3d edge = b - a;
        const double len = edge.norm();
        if (len < 1e-15 * scale) continue;
        const Vector3d shat = edge / len;
        const Vector3d mhat = shat.cross(n);  // outward in-plane normal for CCW loops

        const double t = mhat.dot(a - proj);
        const double sa = shat.dot(a - proj);
        const double sb = shat.dot(b - proj);
        const double ra = (obs - a).norm();
        const double rb = (obs - b).norm();
        const double r02 = t * t + w * w;

        // ln((rb + sb)/(ra + sa)) with the numerically stable variant when the
        // direct form cancels.
        double f2;
        if (sa + sb >= 0.0) {
            const double num = rb + sb;
            const double den = ra + sa;
            f2 = (den > 1e-300 * scale) ? std::log(num / den) : 0.0;
        } else {
            const double num = ra - sa;
            const double den = rb - sb;
            f2 = (den > 1e-300 * scale) ? std::log(num / den) : 0.0;
        }

        if (std::abs(t) <= 1e-14 * scale) {
            // The w-odd arctangent pairs cancel in the t -> 0 limit and every
            // remaining term carries a factor t.
            continue;
        }
        const double atan_swr = std::atan(sb * w / (t * rb)) - std::atan(sa * w / (t * ra));
        const double atan_st = std::atan(sb / t) - std::atan(sa / t);

        sum_inv += t * f2 + w * atan_swr - aw * atan_st;
        sum_r += (t * (sb * rb - sa * ra) * 0.5 + t * (0.5 * r02 + w * w) * f2 +
                  w * w * w * atan_swr - aw * aw * aw * atan_st) /
                 3.0;
    }
    inv_r = sum_inv;
    r_int = sum_r;
}

}  // namespace detail

double tri_inv_r(const Vector3d& v0, const Vector3d& v1, const Vector3d& v2, const Vector3d& obs) {
    double a, b;
    detail::tri_potentials(v0, v1, v2, obs, a, b);
    return a;
}

double tri_r(const Vector3d& v0, const Vector3d& v1, const Vector3d& v2, const Vector3d& obs) {
    double a, b;
    detail::tri_potentials(v0, v1, v2, obs, a, b);
    return b;
}

namespace {

// Outward-oriented faces of a tet; face k is opposite vertex k.
struct TetFaces {
    std::array<std::array<Vector3d, 3>, 4> tri;
    std::array<Vector3d, 4> normal;
};

TetFaces oriented_faces(const std::array<Vector3d, 4>& v) {
    static const int lf[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
    TetFaces f;
    for (int k = 0; k < 4; ++k) {
        std::array<Vector3d, 3> tri = {v[lf[k][0]], v[lf[k][1]], v[lf[k][2]]};
        Vector3d n = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
        if (n.dot(tri[0] - v[k]) < 0.0) {
            std::swap(tri[1], tri[2]);
            n = -n;
        }
        f.tri[k] = tri;
        f.normal[k] = n.normalized();
    }
    return f;
}

}  // namespace

double tet_inv_r(const std::array<Vector3d, 4>& v, const Vector3d& obs) {
    const TetFaces f = oriented_faces(v);
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double w = f.normal[k].dot(obs - f.tri[k][0]);
        total += -0.5 * w * tri_inv_r(f.tri[k][0], f.tri[k][1], f.tri[k][2], obs);
    }
    return total;
}

Eigen::Vector3d tet_grad_r(const std::array<Vector3d, 4>& v, const Vector3d& obs) {
    const TetFaces f = oriented_faces(v);
    Vector3d total = Vector3d::Zero();
    for (int k = 0; k < 4; ++k) {
        total += f.normal[k] * tri_r(f.tri[k][0], f.tri[k][1], f.tri[k][2], obs);
    }
    return total;
}

const TetRule& tet_rule_4() {
    static const TetRule rule = [] {
        TetRule r;
        const double a = 0.5854101966249685;
        const double b = 0.1381966011250105;
        for (int i = 0; i < 4; ++i) {
            std::array<double, 4> bc = {b, b, b, b};
            bc[i] = a;
            r.bary.push_back(bc);
            r.weight.push_back(0.25);
        }
        return r;
    }();
    return rule;
}

const TetRule& tet_rule_11() {
    static const TetRule rule = [] {
        TetRule r;
        r.bary.push_back({0.25, 0.25, 0.25, 0.25});
        r.weight.push_back(-0.07893333333333333333);
        const double a = 11.0 / 14.0;
        const double b = 1.0 / 14.0;
        for (int i = 0; i < 4; ++i) {
            std::array<double, 4> bc = {b, b, b, b};
            bc[i] = a;
            r.bary.push_back(bc);
            r.weight.push_back(0.04573333333333333333);
        }
        const double c = 0.3994035761667992;
        const double d = 0.1005964238332008;
        static const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
        for (const auto& p : pairs) {
            std::array<double, 4> bc = {d, d, d, d};
            bc[p[0]] = c;
            bc[p[1]] = c;
            r.bary.push_back(bc);
            r.weight.push_back(0.14933333333333333333 / 1.0);
        }
        return r;
    }();
    return rule;
}

const TriRule& tri_rule_7() {
    static const TriRule rule = [] {
        TriRule r;
        r.bary.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        r.weight.push_back(0.225);
        const double a1 = 0.0597158717897698;
        const double b1 = 0.4701420641051151;
        const double w1 = 0.1323941527885062;
        const double a2 = 0.7974269853530873;
        const double b2 = 0.1012865073234563;
        const double w2 = 0.1259391805448271;
        for (int i = 0; i < 3; ++i) {
            std::array<double, 3> bc1 = {b1, b1, b1};
            bc1[i] = a1;
            r.bary.push_back(bc1);
            r.weight.push_back(w1);
            std::array<double, 3> bc2 = {b2, b2, b2};
            bc2[i] = a2;
            r.bary.push_back(bc2);
            r.weight.push_back(w2);
        }
        return r;
    }();
    return rule;
}

}  // namespace ewjn
