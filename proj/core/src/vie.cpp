#include "ewjn/vie.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

#include "ewjn/constants.hpp"
#include "ewjn/errors.hpp"
#include "ewjn/singular.hpp"

namespace ewjn {

using Eigen::Matrix3cd;
using Eigen::MatrixXcd;
using Eigen::Vector3cd;
using Eigen::Vector3d;
using Eigen::VectorXcd;

SWGSpace build_swg_space(const TetMesh& mesh, bool half_swg) {
    SWGSpace s;
    s.face_dof.assign(mesh.faces.size(), -1);
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        if (mesh.faces[f].tet_minus != -1) {
            s.face_dof[f] = static_cast<int>(s.dof_face.size());
            s.dof_face.push_back(static_cast<int>(f));
        }
    }
    s.n_interior = static_cast<int>(s.dof_face.size());
    if (half_swg) {
        for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
            if (mesh.faces[f].tet_minus == -1) {
                s.face_dof[f] = static_cast<int>(s.dof_face.size());
                s.dof_face.push_back(static_cast<int>(f));
            }
        }
    }
    s.n_total = static_cast<int>(s.dof_face.size());
    return s;
}

namespace {

// Free-space scalar Green's function with the exp(-i w t) convention, and its
// smooth part (e^{i k R} - 1)/(4 pi R).
cplx green(double k0, double r) { return std::exp(cplx(0.0, k0 * r)) / (4.0 * pi * r); }

cplx green_smooth(double k0, double r) {
    const double kr = k0 * r;
    if (kr < 1e-4) {
        const cplx ikr(0.0, kr);
        // (e^{ikr} - 1)/r = ik (1 + ikr/2 + (ikr)^2/6 + (ikr)^3/24)
        return cplx(0.0, k0) * (1.0 + ikr * (0.5 + ikr * (1.0 / 6.0 + ikr / 24.0))) / (4.0 * pi);
    }
    return (std::exp(cplx(0.0, kr)) - 1.0) / (4.0 * pi * r);
}

struct TetQuad {
    std::vector<Vector3d> pts;
    std::vector<double> w;  // includes the tet volume
};

TetQuad tet_points(const TetMesh& mesh, int t, const TetRule& rule) {
    TetQuad q;
    const auto& k = mesh.tets[t];
    const Vector3d v[4] = {mesh.nodes[k[0]], mesh.nodes[k[1]], mesh.nodes[k[2]], mesh.nodes[k[3]]};
    q.pts.resize(rule.bary.size());
    q.w.resize(rule.bary.size());
    for (std::size_t i = 0; i < rule.bary.size(); ++i) {
        Vector3d p = Vector3d::Zero();
        for (int j = 0; j < 4; ++j) p += rule.bary[i][j] * v[j];
        q.pts[i] = p;
        q.w[i] = rule.weight[i] * mesh.tet_volume[t];
    }
    return q;
}

// Apex (opposite vertex) of `face` within tet t, and the dof sign of the SWG
// basis on that side (+1 in the plus tet, -1 in the minus tet).
struct FaceInTet {
    Vector3d apex;
    double sign;
    double area;
};

FaceInTet face_in_tet(const TetMesh& mesh, int face_id, int t) {
    const auto& f = mesh.faces[face_id];
    const auto& k = mesh.tets[t];
    for (int i = 0; i < 4; ++i) {
        const int n = k[i];
        if (n != f.nodes[0] && n != f.nodes[1] && n != f.nodes[2]) {
            return {mesh.nodes[n], (t == f.tet_plus) ? 1.0 : -1.0, f.area};
        }
    }
    throw numeric_error("face_in_tet: face is not part of the tet", 0.0);
}

std::array<Vector3d, 4> tet_vertices(const TetMesh& mesh, int t) {
    const auto& k = mesh.tets[t];
    return {mesh.nodes[k[0]], mesh.nodes[k[1]], mesh.nodes[k[2]], mesh.nodes[k[3]]};
}

// Pairwise tet interactions accumulated per source-tet block, scattered
// serially afterwards for deterministic summation.
struct PairData {
    cplx p[4][4];  // unsigned-basis vector-potential blocks
    cplx s;        // plain double volume integral of g
};

enum class PairTier { far, near, touching };

PairTier classify(const TetMesh& mesh, int to, int ts, double near_factor) {
    for (int a : mesh.tets[to]) {
        for (int b : mesh.tets[ts]) {
            if (a == b) return PairTier::touching;
        }
    }
    const double dist = (mesh.tet_centroid[to] - mesh.tet_centroid[ts]).norm();
    const double scale = std::max(mesh.tet_diameter[to], mesh.tet_diameter[ts]);
    if (dist < 1.0 * scale) return PairTier::touching;
    if (dist < near_factor * scale) return PairTier::near;
    return PairTier::far;
}

// Quadrature points of a tet, optionally refined once into the 8 Bey children
// (used for the outer integral over touching pairs, where the analytically
// integrated inner potential still varies strongly).
TetQuad tet_points_refined(const TetMesh& mesh, int t, const TetRule& rule, int levels) {
    if (levels <= 0) return tet_points(mesh, t, rule);
    TetQuad q;
    const auto& k = mesh.tets[t];
    std::vector<std::array<Eigen::Vector3d, 4>> stack = {
        {mesh.nodes[k[0]], mesh.nodes[k[1]], mesh.nodes[k[2]], mesh.nodes[k[3]]}};
    for (int l = 0; l < levels; ++l) {
        std::vector<std::array<Eigen::Vector3d, 4>> next;
        for (const auto& v : stack) {
            const Vector3d m01 = 0.5 * (v[0] + v[1]), m02 = 0.5 * (v[0] + v[2]),
                           m03 = 0.5 * (v[0] + v[3]), m12 = 0.5 * (v[1] + v[2]),
                           m13 = 0.5 * (v[1] + v[3]), m23 = 0.5 * (v[2] + v[3]);
            next.push_back({v[0], m01, m02, m03});
            next.push_back({m01, v[1], m12, m13});
            next.push_back({m02, m12, v[2], m23});
            next.push_back({m03, m13, m23, v[3]});
            next.push_back({m01, m02, m03, m13});
            next.push_back({m01, m02, m12, m13});
            next.push_back({m02, m03, m13, m23});
            next.push_back({m02, m12, m13, m23});
        }
        stack.swap(next);
    }
    for (const auto& v : stack) {
        const double vol = std::abs((v[1] - v[0]).cross(v[2] - v[0]).dot(v[3] - v[0])) / 6.0;
        for (std::size_t i = 0; i < rule.bary.size(); ++i) {
            Vector3d p = Vector3d::Zero();
            for (int j = 0; j < 4; ++j) p += rule.bary[i][j] * v[j];
            q.pts.push_back(p);
            q.w.push_back(rule.weight[i] * vol);
        }
    }
    return q;
}

void pair_interaction(const TetMesh& mesh, double k0, int to, int ts, double near_factor,
                      int touching_subdiv, PairData& out) {
    const PairTier tier = classify(mesh, to, ts, near_factor);
    const TetRule& outer_rule = (tier == PairTier::far) ? tet_rule_4() : tet_rule_11();
    const TetRule& inner_rule = (tier == PairTier::far) ? tet_rule_4() : tet_rule_11();

    const TetQuad qo = (tier == PairTier::touching)
                           ? tet_points_refined(mesh, to, outer_rule, touching_subdiv)
                           : tet_points(mesh, to, outer_rule);
    const TetQuad qs = tet_points(mesh, ts, inner_rule);

    Vector3d apex_o[4], apex_s[4];
    double coef_o[4], coef_s[4];
    for (int a = 0; a < 4; ++a) {
        const int fo = mesh.tet_faces[to][a];
        const int fs = mesh.tet_faces[ts][a];
        apex_o[a] = mesh.nodes[mesh.tets[to][a]];
        apex_s[a] = mesh.nodes[mesh.tets[ts][a]];
        coef_o[a] = mesh.faces[fo].area / (3.0 * mesh.tet_volume[to]);
        coef_s[a] = mesh.faces[fs].area / (3.0 * mesh.tet_volume[ts]);
        (void)fs;
    }

    for (auto& row : out.p)
        for (auto& v : row) v = 0.0;
    out.s = 0.0;

    if (tier == PairTier::far) {
        for (std::size_t i = 0; i < qo.pts.size(); ++i) {
            for (std::size_t j = 0; j < qs.pts.size(); ++j) {
                const double r = (qo.pts[i] - qs.pts[j]).norm();
                const cplx g = qo.w[i] * qs.w[j] * green(k0, r);
                out.s += g;
                for (int a = 0; a < 4; ++a) {
                    const Vector3d da = coef_o[a] * (qo.pts[i] - apex_o[a]);
                    for (int b = 0; b < 4; ++b) {
                        const Vector3d db = coef_s[b] * (qs.pts[j] - apex_s[b]);
                        out.p[a][b] += g * da.dot(db);
                    }
                }
            }
        }
        return;
    }

    // Near/touching: smooth part by quadrature, 1/(4 pi R) analytically over
    // the source tet for each observation point.
    const auto vs = tet_vertices(mesh, ts);
    for (std::size_t i = 0; i < qo.pts.size(); ++i) {
        const Vector3d p = qo.pts[i];
        cplx i_scal(0.0, 0.0);
        Vector3cd i_vec = Vector3cd::Zero();
        for (std::size_t j = 0; j < qs.pts.size(); ++j) {
            const Vector3d d = qs.pts[j] - p;
            const cplx g = qs.w[j] * green_smooth(k0, d.norm());
            i_scal += g;
            i_vec += g * d.cast<cplx>();
        }
        const double inv4pi = 1.0 / (4.0 * pi);
        i_scal += inv4pi * tet_inv_r(vs, p);
        i_vec += (inv4pi * tet_grad_r(vs, p)).cast<cplx>();

        out.s += qo.w[i] * i_scal;
        for (int b = 0; b < 4; ++b) {
            const Vector3cd fb = coef_s[b] * (i_vec + (p - apex_s[b]).cast<cplx>() * i_scal);
            for (int a = 0; a < 4; ++a) {
                const Vector3d da = coef_o[a] * (p - apex_o[a]);
                out.p[a][b] += qo.w[i] * (da.x() * fb.x() + da.y() * fb.y() + da.z() * fb.z());
            }
        }
    }
}

struct TriQuad {
    std::vector<Vector3d> pts;
    std::vector<double> w;  // includes the face area
};

TriQuad tri_points(const TetMesh& mesh, int face_id) {
    const auto& f = mesh.faces[face_id];
    const Vector3d v0 = mesh.nodes[f.nodes[0]], v1 = mesh.nodes[f.nodes[1]],
                   v2 = mesh.nodes[f.nodes[2]];
    const TriRule& rule = tri_rule_7();
    TriQuad q;
    q.pts.resize(rule.bary.size());
    q.w.resize(rule.bary.size());
    for (std::size_t i = 0; i < rule.bary.size(); ++i) {
        q.pts[i] = rule.bary[i][0] * v0 + rule.bary[i][1] * v1 + rule.bary[i][2] * v2;
        q.w[i] = rule.weight[i] * f.area;
    }
    return q;
}

// integral over tet of g(p, r') dV' with graded handling.
cplx tet_g_integral(const TetMesh& mesh, double k0, int ts, const Vector3d& p, bool near) {
    const TetQuad qs = tet_points(mesh, ts, near ? tet_rule_11() : tet_rule_4());
    cplx acc(0.0, 0.0);
    if (near) {
        for (std::size_t j = 0; j < qs.pts.size(); ++j) {
            acc += qs.w[j] * green_smooth(k0, (qs.pts[j] - p).norm());
        }
        acc += tet_inv_r(tet_vertices(mesh, ts), p) / (4.0 * pi);
    } else {
        for (std::size_t j = 0; j < qs.pts.size(); ++j) {
            acc += qs.w[j] * green(k0, (qs.pts[j] - p).norm());
        }
    }
    return acc;
}

// integral over boundary face of g(p, r') dS' with graded handling.
cplx tri_g_integral(const TetMesh& mesh, double k0, int face_id, const Vector3d& p, bool near) {
    const TriQuad q = tri_points(mesh, face_id);
    cplx acc(0.0, 0.0);
    if (near) {
        for (std::size_t j = 0; j < q.pts.size(); ++j) {
            acc += q.w[j] * green_smooth(k0, (q.pts[j] - p).norm());
        }
        const auto& f = mesh.faces[face_id];
        acc += tri_inv_r(mesh.nodes[f.nodes[0]], mesh.nodes[f.nodes[1]], mesh.nodes[f.nodes[2]], p) /
               (4.0 * pi);
    } else {
        for (std::size_t j = 0; j < q.pts.size(); ++j) {
            acc += q.w[j] * green(k0, (q.pts[j] - p).norm());
        }
    }
    return acc;
}

int effective_jobs(int jobs) {
    if (jobs > 0) return jobs;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

template <class Fn>
void parallel_for(int n, int jobs, Fn&& fn) {
    jobs = std::min(jobs, n);
    if (jobs <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

VIESystem assemble(const TetMesh& mesh, cplx eps, double omega, const VIEOptions& options) {
    if (eps.imag() < 0.0) {
        throw std::invalid_argument("assemble: Im(eps) must be >= 0 in the exp(-i w t) convention");
    }
    if (!(omega > 0.0)) throw std::invalid_argument("assemble: omega must be > 0");

    VIESystem sys;
    sys.mesh = mesh;
    sys.swg = build_swg_space(mesh, options.half_swg);
    sys.eps = eps;
    sys.kappa = (eps - 1.0) / eps;
    sys.omega = omega;
    sys.options = options;

    const int n = sys.swg.n_total;
    if (n > options.dof_budget) {
        throw capacity_error("assemble: " + std::to_string(n) + " DOFs exceed the budget of " +
                             std::to_string(options.dof_budget));
    }
    const double k0 = omega / phys.c;
    const cplx kappa = sys.kappa;
    const int nt = static_cast<int>(mesh.tet_count());
    const int jobs = effective_jobs(options.jobs);

    sys.matrix = MatrixXcd::Zero(n, n);
    MatrixXcd& A = sys.matrix;

    // Gram part (per tet, exact for the quadratic integrand).
    for (int t = 0; t < nt; ++t) {
        const TetQuad q = tet_points(mesh, t, tet_rule_4());
        for (int a = 0; a < 4; ++a) {
            const int fa = mesh.tet_faces[t][a];
            const int m = sys.swg.face_dof[fa];
            if (m < 0) continue;
            const FaceInTet fia = face_in_tet(mesh, fa, t);
            for (int b = 0; b < 4; ++b) {
                const int fb = mesh.tet_faces[t][b];
                const int nn = sys.swg.face_dof[fb];
                if (nn < 0) continue;
                const FaceInTet fib = face_in_tet(mesh, fb, t);
                double acc = 0.0;
                for (std::size_t i = 0; i < q.pts.size(); ++i) {
                    const Vector3d da = fia.area / (3.0 * mesh.tet_volume[t]) * (q.pts[i] - fia.apex);
                    const Vector3d db = fib.area / (3.0 * mesh.tet_volume[t]) * (q.pts[i] - fib.apex);
                    acc += q.w[i] * da.dot(db);
                }
                A(m, nn) += fia.sign * fib.sign * acc / eps;
            }
        }
    }

    // Volume-volume interactions in source blocks; parallel compute over the
    // observation tet, deterministic serial scatter.
    const int block = 128;
    std::vector<PairData> pairs(static_cast<std::size_t>(nt) * block);
    for (int ts0 = 0; ts0 < nt; ts0 += block) {
        const int bs = std::min(block, nt - ts0);
        parallel_for(nt, jobs, [&](int to) {
            for (int k = 0; k < bs; ++k) {
                pair_interaction(mesh, k0, to, ts0 + k, options.near_factor,
                                 options.touching_outer_subdiv,
                                 pairs[static_cast<std::size_t>(to) * block + k]);
            }
        });
        for (int to = 0; to < nt; ++to) {
            for (int k = 0; k < bs; ++k) {
                const int ts = ts0 + k;
                const PairData& pd = pairs[static_cast<std::size_t>(to) * block + k];
                for (int a = 0; a < 4; ++a) {
                    const int m = sys.swg.face_dof[mesh.tet_faces[to][a]];
                    if (m < 0) continue;
                    const FaceInTet fia = face_in_tet(mesh, mesh.tet_faces[to][a], to);
                    const double qa = fia.sign * fia.area / mesh.tet_volume[to];
                    for (int b = 0; b < 4; ++b) {
                        const int nn = sys.swg.face_dof[mesh.tet_faces[ts][b]];
                        if (nn < 0) continue;
                        const FaceInTet fib = face_in_tet(mesh, mesh.tet_faces[ts][b], ts);
                        const double qb = fib.sign * fib.area / mesh.tet_volume[ts];
                        A(m, nn) += -k0 * k0 * kappa * fia.sign * fib.sign * pd.p[a][b] +
                                    kappa * qa * qb * pd.s;
                    }
                }
            }
        }
    }

    // Half-SWG surface-charge interactions.
    if (options.half_swg) {
        std::vector<int> bfaces;
        for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
            if (mesh.faces[f].tet_minus == -1) bfaces.push_back(static_cast<int>(f));
        }
        const int nb = static_cast<int>(bfaces.size());

        // surface (test) x volume (source) and volume (test) x surface (source)
        std::vector<std::vector<cplx>> sv(nb, std::vector<cplx>(4 * nt, cplx(0, 0)));
        parallel_for(nb, jobs, [&](int bi) {
            const int fm = bfaces[bi];
            const TriQuad tq = tri_points(mesh, fm);
            const Vector3d fc = mesh.faces[fm].center;
            for (int ts = 0; ts < nt; ++ts) {
                const bool near =
                    (fc - mesh.tet_centroid[ts]).norm() <
                    options.near_factor * std::max(mesh.tet_diameter[ts], std::sqrt(mesh.faces[fm].area));
                cplx acc(0.0, 0.0);
                for (std::size_t i = 0; i < tq.pts.size(); ++i) {
                    acc += tq.w[i] * tet_g_integral(mesh, k0, ts, tq.pts[i], near);
                }
                sv[bi][ts] = acc;
            }
        });
        for (int bi = 0; bi < nb; ++bi) {
            const int fm = bfaces[bi];
            const int m = sys.swg.face_dof[fm];
            for (int ts = 0; ts < nt; ++ts) {
                const cplx ssum = sv[bi][ts];
                for (int b = 0; b < 4; ++b) {
                    const int nn = sys.swg.face_dof[mesh.tet_faces[ts][b]];
                    if (nn < 0) continue;
                    const FaceInTet fib = face_in_tet(mesh, mesh.tet_faces[ts][b], ts);
                    const double qb = fib.sign * fib.area / mesh.tet_volume[ts];
                    // test surface density -1 against source volume charge.
                    A(m, nn) += (-1.0) * kappa * qb * ssum;
                    // transpose role: test volume charge against source surface
                    // density -kappa; g is symmetric, reuse the same integral.
                    A(nn, m) += (-kappa) * qb * ssum;
                }
            }
        }

        // surface x surface
        std::vector<std::vector<cplx>> ss(nb, std::vector<cplx>(nb, cplx(0, 0)));
        parallel_for(nb, jobs, [&](int bi) {
            const int fm = bfaces[bi];
            const TriQuad tq = tri_points(mesh, fm);
            for (int bj = 0; bj < nb; ++bj) {
                const int fn = bfaces[bj];
                const bool near = (mesh.faces[fm].center - mesh.faces[fn].center).norm() <
                                  options.near_factor *
                                      std::sqrt(std::max(mesh.faces[fm].area, mesh.faces[fn].area)) * 4.0;
                cplx acc(0.0, 0.0);
                for (std::size_t i = 0; i < tq.pts.size(); ++i) {
                    acc += tq.w[i] * tri_g_integral(mesh, k0, fn, tq.pts[i], near);
                }
                ss[bi][bj] = acc;
            }
        });
        for (int bi = 0; bi < nb; ++bi) {
            const int m = sys.swg.face_dof[bfaces[bi]];
            for (int bj = 0; bj < nb; ++bj) {
                const int nn = sys.swg.face_dof[bfaces[bj]];
                A(m, nn) += (-1.0) * (-kappa) * ss[bi][bj];
            }
        }
    }

    return sys;
}

namespace {

// Adaptive octasection integration of a vector-valued integrand over a tet,
// refining toward an external point (dipole or observation position).
template <class F>
Vector3cd graded_tet_integral(const std::array<Vector3d, 4>& v, double volume,
                              const Vector3d& focus, const F& f, int depth) {
    const Vector3d centroid = 0.25 * (v[0] + v[1] + v[2] + v[3]);
    double diam = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) diam = std::max(diam, (v[i] - v[j]).norm());

    if (depth <= 0 || (centroid - focus).norm() > 3.0 * diam) {
        const TetRule& rule = tet_rule_11();
        Vector3cd acc = Vector3cd::Zero();
        for (std::size_t i = 0; i < rule.bary.size(); ++i) {
            Vector3d p = Vector3d::Zero();
            for (int j = 0; j < 4; ++j) p += rule.bary[i][j] * v[j];
            acc += rule.weight[i] * volume * f(p);
        }
        return acc;
    }

    // Bey red refinement into 8 children.
    const Vector3d m01 = 0.5 * (v[0] + v[1]), m02 = 0.5 * (v[0] + v[2]), m03 = 0.5 * (v[0] + v[3]),
                   m12 = 0.5 * (v[1] + v[2]), m13 = 0.5 * (v[1] + v[3]), m23 = 0.5 * (v[2] + v[3]);
    const std::array<std::array<Vector3d, 4>, 8> kids = {{{v[0], m01, m02, m03},
                                                          {m01, v[1], m12, m13},
                                                          {m02, m12, v[2], m23},
                                                          {m03, m13, m23, v[3]},
                                                          {m01, m02, m03, m13},
                                                          {m01, m02, m12, m13},
                                                          {m02, m03, m13, m23},
                                                          {m02, m12, m13, m23}}};
    Vector3cd acc = Vector3cd::Zero();
    for (const auto& kid : kids) {
        const double kv = std::abs((kid[1] - kid[0]).cross(kid[2] - kid[0]).dot(kid[3] - kid[0])) / 6.0;
        acc += graded_tet_integral(kid, kv, focus, f, depth - 1);
    }
    return acc;
}

void factorize(VIESystem& sys) {
    if (sys.lu) return;
    sys.lu = std::make_shared<MatrixXcd>(sys.matrix);
    sys.pivots = std::make_shared<std::vector<int>>(sys.size());
    const int n = sys.size();
    const int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n,
                                    reinterpret_cast<lapack_complex_double*>(sys.lu->data()), n,
                                    sys.pivots->data());
    if (info != 0) {
        sys.lu.reset();
        throw solver_error("zgetrf failed (info " + std::to_string(info) + ")", 0.0);
    }
}

}  // namespace

double condition_estimate(const VIESystem& system) {
    if (!system.lu) {
        throw solver_error("condition_estimate: system is not factored yet", 0.0);
    }
    double anorm = 0.0;
    for (int j = 0; j < system.size(); ++j) {
        anorm = std::max(anorm, system.matrix.col(j).cwiseAbs().sum());
    }
    double rcond = 0.0;
    LAPACKE_zgecon(LAPACK_COL_MAJOR, '1', system.size(),
                   reinterpret_cast<const lapack_complex_double*>(system.lu->data()), system.size(),
                   anorm, &rcond);
    return rcond;
}

VectorXcd solve_dipole(VIESystem& sys, const DipoleSource& source) {
    const double k0 = sys.omega / phys.c;
    const int n = sys.size();
    const TetMesh& mesh = sys.mesh;

    // E^i(r) = i w mu0 grad_r g(r, r0) x m.
    auto e_inc = [&](const Vector3d& r) -> Vector3cd {
        const Vector3d d = r - source.position;
        const double rr = d.norm();
        const cplx g = green(k0, rr);
        const cplx dgdr = (cplx(0.0, k0) - 1.0 / rr) * g;
        const Vector3cd grad = (dgdr / rr) * d.cast<cplx>();
        return cplx(0.0, 1.0) * sys.omega * phys.mu_0 * grad.cross(source.moment);
    };

    VectorXcd rhs = VectorXcd::Zero(n);
    const int nt = static_cast<int>(mesh.tet_count());
    std::vector<std::array<Vector3cd, 4>> per_tet(nt);
    parallel_for(nt, effective_jobs(sys.options.jobs), [&](int t) {
        const auto v = tet_vertices(mesh, t);
        for (int a = 0; a < 4; ++a) {
            const int fa = mesh.tet_faces[t][a];
            if (sys.swg.face_dof[fa] < 0) {
                per_tet[t][a] = Vector3cd::Zero();
                continue;
            }
            const FaceInTet fia = face_in_tet(mesh, fa, t);
            const double coef = fia.area / (3.0 * mesh.tet_volume[t]);
            // Scalar integrand f_m . E^i carried in component 0.
            auto f = [&](const Vector3d& p) -> Vector3cd {
                const Vector3cd e = e_inc(p);
                const Vector3d basis = coef * (p - fia.apex);
                const cplx s = e.x() * basis.x() + e.y() * basis.y() + e.z() * basis.z();
                return Vector3cd(s, 0.0, 0.0);
            };
            const Vector3cd val = graded_tet_integral(v, mesh.tet_volume[t], source.position, f, 6);
            per_tet[t][a] = Vector3cd(fia.sign * val(0), 0.0, 0.0);
        }
    });
    for (int t = 0; t < nt; ++t) {
        for (int a = 0; a < 4; ++a) {
            const int m = sys.swg.face_dof[mesh.tet_faces[t][a]];
            if (m >= 0) rhs(m) += phys.eps_0 * per_tet[t][a](0);
        }
    }

    factorize(sys);
    const int info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, 1,
                                    reinterpret_cast<const lapack_complex_double*>(sys.lu->data()), n,
                                    sys.pivots->data(),
                                    reinterpret_cast<lapack_complex_double*>(rhs.data()), n);
    if (info != 0) throw solver_error("zgetrs failed", 0.0);
    return rhs;
}

Vector3cd scattered_h(const VIESystem& sys, const VectorXcd& coeffs, const Vector3d& obs) {
    const double k0 = sys.omega / phys.c;
    const TetMesh& mesh = sys.mesh;
    const int nt = static_cast<int>(mesh.tet_count());

    // H_sc(r) = -i w sum kappa_T integral grad_r g x D(r') dV'.
    std::vector<Vector3cd> per_tet(nt, Vector3cd::Zero());
    parallel_for(nt, effective_jobs(sys.options.jobs), [&](int t) {
        const auto v = tet_vertices(mesh, t);
        // D(r') inside tet t from the four face dofs.
        std::array<FaceInTet, 4> fia;
        std::array<cplx, 4> amp;
        for (int a = 0; a < 4; ++a) {
            const int fa = mesh.tet_faces[t][a];
            const int m = sys.swg.face_dof[fa];
            fia[a] = (m >= 0) ? face_in_tet(mesh, fa, t) : FaceInTet{Vector3d::Zero(), 0.0, 0.0};
            amp[a] = (m >= 0) ? coeffs(m) : cplx(0.0, 0.0);
        }
        auto f = [&](const Vector3d& p) -> Vector3cd {
            Vector3cd d_field = Vector3cd::Zero();
            for (int a = 0; a < 4; ++a) {
                if (amp[a] == cplx(0.0, 0.0)) continue;
                const double coef = fia[a].area / (3.0 * mesh.tet_volume[t]);
                d_field += amp[a] * fia[a].sign * coef * (p - fia[a].apex).cast<cplx>();
            }
            const Vector3d dv = obs - p;
            const double rr = dv.norm();
            const cplx g = green(k0, rr);
            const cplx dgdr = (cplx(0.0, k0) - 1.0 / rr) * g;
            const Vector3cd grad = (dgdr / rr) * dv.cast<cplx>();
            return grad.cross(d_field);
        };
        per_tet[t] = graded_tet_integral(v, mesh.tet_volume[t], obs, f, 6);
    });
    Vector3cd acc = Vector3cd::Zero();
    for (int t = 0; t < nt; ++t) acc += per_tet[t];
    return cplx(0.0, -1.0) * sys.omega * sys.kappa * acc;
}

Matrix3cd solve_gm(VIESystem& sys, const Vector3d& source_pos, const Vector3d& obs_pos) {
    Matrix3cd gm;
    for (int k = 0; k < 3; ++k) {
        DipoleSource src;
        src.position = source_pos;
        src.omega = sys.omega;
        src.moment = Vector3cd::Zero();
        src.moment(k) = 1.0;
        const VectorXcd d = solve_dipole(sys, src);
        const Vector3cd h = scattered_h(sys, d, obs_pos);
        const double k0 = sys.omega / phys.c;
        gm.col(k) = h / (k0 * k0);
    }
    return gm;
}

}  // namespace ewjn
