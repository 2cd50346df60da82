#include "ewjn/mesh_gen.hpp"

#include <cmath>
#include <map>

#include "ewjn/errors.hpp"

namespace ewjn {

namespace {

using Eigen::Vector3d;

struct IcoSphere {
    std::vector<Vector3d> verts;  // unit radius
    std::vector<std::array<int, 3>> faces;
};

IcoSphere icosahedron() {
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    IcoSphere s;
    const double v[12][3] = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                             {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                             {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
    for (const auto& p : v) s.verts.push_back(Vector3d(p[0], p[1], p[2]).normalized());
    const int f[20][3] = {{0, 11, 5},  {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                          {1, 5, 9},   {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                          {3, 9, 4},   {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                          {4, 9, 5},   {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (const auto& t : f) s.faces.push_back({t[0], t[1], t[2]});
    return s;
}

IcoSphere subdivide(const IcoSphere& in) {
    IcoSphere out;
    out.verts = in.verts;
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        const auto key = std::minmax(a, b);
        auto [it, inserted] = midpoint.try_emplace(key, static_cast<int>(out.verts.size()));
        if (inserted) out.verts.push_back((out.verts[a] + out.verts[b]).normalized());
        return it->second;
    };
    for (const auto& f : in.faces) {
        const int ab = mid(f[0], f[1]);
        const int bc = mid(f[1], f[2]);
        const int ca = mid(f[2], f[0]);
        out.faces.push_back({f[0], ab, ca});
        out.faces.push_back({f[1], bc, ab});
        out.faces.push_back({f[2], ca, bc});
        out.faces.push_back({ab, bc, ca});
    }
    return out;
}

void orient_positive(std::array<int, 4>& t, const std::vector<Vector3d>& nodes) {
    const Vector3d a = nodes[t[0]], b = nodes[t[1]], c = nodes[t[2]], d = nodes[t[3]];
    if ((b - a).cross(c - a).dot(d - a) < 0.0) std::swap(t[2], t[3]);
}

}  // namespace

TetMesh generate_ball(double radius, int level, int layers, const Vector3d& center) {
    if (!(radius > 0.0) || level < 0 || layers < 1) {
        throw std::invalid_argument("generate_ball: bad parameters");
    }
    IcoSphere shell = icosahedron();
    for (int l = 0; l < level; ++l) shell = subdivide(shell);
    const int ns = static_cast<int>(shell.verts.size());

    std::vector<Vector3d> nodes;
    nodes.push_back(center);  // node 0
    for (int k = 1; k <= layers; ++k) {
        const double r = radius * k / layers;
        for (const auto& v : shell.verts) nodes.push_back(center + r * v);
    }
    auto shell_node = [&](int layer, int i) { return 1 + (layer - 1) * ns + i; };

    std::vector<std::array<int, 4>> tets;
    // Innermost: center to the first shell.
    for (const auto& f : shell.faces) {
        std::array<int, 4> t = {0, shell_node(1, f[0]), shell_node(1, f[1]), shell_node(1, f[2])};
        orient_positive(t, nodes);
        tets.push_back(t);
    }
    // Prisms between consecutive shells, split with index-sorted diagonals so
    // neighboring prisms agree on the quad-face triangulation.
    for (int k = 1; k < layers; ++k) {
        for (const auto& f : shell.faces) {
            std::array<int, 3> b = f;
            std::sort(b.begin(), b.end());
            const int v0 = shell_node(k, b[0]), v1 = shell_node(k, b[1]), v2 = shell_node(k, b[2]);
            const int w0 = shell_node(k + 1, b[0]), w1 = shell_node(k + 1, b[1]),
                      w2 = shell_node(k + 1, b[2]);
            std::array<int, 4> t1 = {v0, v1, v2, w0};
            std::array<int, 4> t2 = {v1, v2, w0, w1};
            std::array<int, 4> t3 = {v2, w0, w1, w2};
            orient_positive(t1, nodes);
            orient_positive(t2, nodes);
            orient_positive(t3, nodes);
            tets.push_back(t1);
            tets.push_back(t2);
            tets.push_back(t3);
        }
    }
    return make_mesh(std::move(nodes), std::move(tets));
}

TetMesh generate_box(const Vector3d& origin, const Vector3d& size, double cell) {
    if (!(cell > 0.0) || !(size.minCoeff() > 0.0)) {
        throw std::invalid_argument("generate_box: bad parameters");
    }
    const int nx = std::max(1, static_cast<int>(std::lround(size.x() / cell)));
    const int ny = std::max(1, static_cast<int>(std::lround(size.y() / cell)));
    const int nz = std::max(1, static_cast<int>(std::lround(size.z() / cell)));

    std::vector<Vector3d> nodes;
    nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1));
    auto id = [&](int i, int j, int k) { return (i * (ny + 1) + j) * (nz + 1) + k; };
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j <= ny; ++j)
            for (int k = 0; k <= nz; ++k)
                nodes.push_back(origin + Vector3d(size.x() * i / nx, size.y() * j / ny,
                                                  size.z() * k / nz));

    // Kuhn subdivision: six tets sharing the main diagonal of each cube; the
    // common diagonal direction makes neighboring cubes face-compatible.
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    std::vector<std::array<int, 4>> tets;
    tets.reserve(static_cast<std::size_t>(nx) * ny * nz * 6);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            for (int k = 0; k < nz; ++k) {
                const int base[3] = {i, j, k};
                for (const auto& perm : perms) {
                    int p[3] = {base[0], base[1], base[2]};
                    std::array<int, 4> t;
                    t[0] = id(p[0], p[1], p[2]);
                    for (int step = 0; step < 3; ++step) {
                        ++p[perm[step]];
                        t[step + 1] = id(p[0], p[1], p[2]);
                    }
                    orient_positive(t, nodes);
                    tets.push_back(t);
                }
            }
        }
    }
    return make_mesh(std::move(nodes), std::move(tets));
}

TetMesh merge_meshes(const std::vector<TetMesh>& parts) {
    std::vector<Vector3d> nodes;
    std::vector<std::array<int, 4>> tets;
    for (const auto& part : parts) {
        const int offset = static_cast<int>(nodes.size());
        nodes.insert(nodes.end(), part.nodes.begin(), part.nodes.end());
        for (auto t : part.tets) {
            for (int& v : t) v += offset;
            tets.push_back(t);
        }
    }
    return make_mesh(std::move(nodes), std::move(tets));
}

}  // namespace ewjn
