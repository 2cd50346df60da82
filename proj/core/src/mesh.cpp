#include "ewjn/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ewjn/errors.hpp"

namespace ewjn {

namespace {

double signed_volume(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c,
                     const Eigen::Vector3d& d) {
    return (b - a).cross(c - a).dot(d - a) / 6.0;
}

}  // namespace

TetMesh make_mesh(std::vector<Eigen::Vector3d> nodes, std::vector<std::array<int, 4>> tets) {
    TetMesh mesh;
    mesh.nodes = std::move(nodes);
    mesh.tets = std::move(tets);
    const int nn = static_cast<int>(mesh.nodes.size());
    if (mesh.tets.empty()) throw parse_error("mesh: no tetrahedra");

    mesh.tet_volume.resize(mesh.tet_count());
    mesh.tet_centroid.resize(mesh.tet_count());
    mesh.tet_diameter.resize(mesh.tet_count());
    mesh.tet_faces.resize(mesh.tet_count());
    mesh.min_edge = 1e300;
    mesh.max_edge = 0.0;

    for (std::size_t t = 0; t < mesh.tet_count(); ++t) {
        const auto& k = mesh.tets[t];
        for (int i = 0; i < 4; ++i) {
            if (k[i] < 0 || k[i] >= nn) {
                throw parse_error("mesh: tet " + std::to_string(t) + " references missing node");
            }
        }
        const Eigen::Vector3d a = mesh.nodes[k[0]], b = mesh.nodes[k[1]], c = mesh.nodes[k[2]],
                              d = mesh.nodes[k[3]];
        const double v = signed_volume(a, b, c, d);
        if (!(v > 0.0)) {
            throw parse_error("mesh: tet " + std::to_string(t) +
                              " has non-positive volume (inverted or degenerate)");
        }
        mesh.tet_volume[t] = v;
        mesh.tet_centroid[t] = 0.25 * (a + b + c + d);
        double dia = 0.0;
        const Eigen::Vector3d pts[4] = {a, b, c, d};
        for (int i = 0; i < 4; ++i) {
            for (int j = i + 1; j < 4; ++j) {
                const double e = (pts[i] - pts[j]).norm();
                dia = std::max(dia, e);
                mesh.min_edge = std::min(mesh.min_edge, e);
                mesh.max_edge = std::max(mesh.max_edge, e);
            }
        }
        mesh.tet_diameter[t] = dia;
    }

    // Face map: sorted node triple -> face id.
    std::map<std::array<int, 3>, int> face_ids;
    // Local face i is opposite local vertex i.
    static const int local_faces[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
    for (std::size_t t = 0; t < mesh.tet_count(); ++t) {
        for (int lf = 0; lf < 4; ++lf) {
            std::array<int, 3> tri = {mesh.tets[t][local_faces[lf][0]],
                                      mesh.tets[t][local_faces[lf][1]],
                                      mesh.tets[t][local_faces[lf][2]]};
            std::array<int, 3> key = tri;
            std::sort(key.begin(), key.end());
            auto [it, inserted] = face_ids.try_emplace(key, static_cast<int>(mesh.faces.size()));
            if (inserted) {
                TetMesh::Face f;
                f.nodes = key;
                f.tet_plus = static_cast<int>(t);
                const Eigen::Vector3d p0 = mesh.nodes[tri[0]], p1 = mesh.nodes[tri[1]],
                                      p2 = mesh.nodes[tri[2]];
                const Eigen::Vector3d cr = (p1 - p0).cross(p2 - p0);
                f.area = 0.5 * cr.norm();
                // Orient away from the opposite vertex of the plus tet.
                Eigen::Vector3d n = cr.normalized();
                const Eigen::Vector3d apex = mesh.nodes[mesh.tets[t][lf]];
                if (n.dot(p0 - apex) < 0.0) n = -n;
                f.normal = n;
                f.center = (p0 + p1 + p2) / 3.0;
                mesh.faces.push_back(f);
                mesh.tet_faces[t][lf] = it->second;
            } else {
                TetMesh::Face& f = mesh.faces[it->second];
                if (f.tet_minus != -1) {
                    throw parse_error("mesh: face shared by more than two tets (non-manifold)");
                }
                f.tet_minus = static_cast<int>(t);
                mesh.tet_faces[t][lf] = it->second;
            }
        }
    }

    for (const auto& f : mesh.faces) {
        if (f.tet_minus == -1) ++mesh.boundary_face_count;
        else ++mesh.interior_face_count;
    }
    return mesh;
}

namespace {

TetMesh load_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("mesh json: ") + e.what());
    }
    if (!j.contains("nodes") || !j.contains("tets")) {
        throw parse_error("mesh json: expected 'nodes' and 'tets' arrays");
    }
    std::vector<Eigen::Vector3d> nodes;
    for (const auto& n : j["nodes"]) {
        if (!n.is_array() || n.size() != 3) throw parse_error("mesh json: node is not a 3-array");
        nodes.emplace_back(n[0].get<double>(), n[1].get<double>(), n[2].get<double>());
    }
    std::vector<std::array<int, 4>> tets;
    for (const auto& t : j["tets"]) {
        if (!t.is_array() || t.size() != 4) throw parse_error("mesh json: tet is not a 4-array");
        tets.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>(), t[3].get<int>()});
    }
    return make_mesh(std::move(nodes), std::move(tets));
}

TetMesh load_gmsh_v2(std::istream& in) {
    std::string line;
    std::vector<Eigen::Vector3d> nodes;
    std::map<long, int> node_index;  // gmsh ids need not be contiguous
    std::vector<std::array<int, 4>> tets;
    bool saw_nodes = false, saw_elements = false;

    while (std::getline(in, line)) {
        if (line.rfind("$MeshFormat", 0) == 0) {
            std::getline(in, line);
            std::istringstream fmt(line);
            double version = 0.0;
            fmt >> version;
            if (version < 2.0 || version >= 3.0) {
                throw parse_error("mesh gmsh: only ASCII v2 files are supported");
            }
        } else if (line.rfind("$Nodes", 0) == 0) {
            saw_nodes = true;
            std::getline(in, line);
            const long count = std::stol(line);
            for (long i = 0; i < count; ++i) {
                if (!std::getline(in, line)) throw parse_error("mesh gmsh: truncated node block");
                std::istringstream ls(line);
                long id;
                double x, y, z;
                if (!(ls >> id >> x >> y >> z)) throw parse_error("mesh gmsh: malformed node line");
                node_index[id] = static_cast<int>(nodes.size());
                nodes.emplace_back(x, y, z);
            }
        } else if (line.rfind("$Elements", 0) == 0) {
            saw_elements = true;
            std::getline(in, line);
            const long count = std::stol(line);
            for (long i = 0; i < count; ++i) {
                if (!std::getline(in, line)) throw parse_error("mesh gmsh: truncated element block");
                std::istringstream ls(line);
                long id, type, ntags;
                if (!(ls >> id >> type >> ntags)) throw parse_error("mesh gmsh: malformed element line");
                long tag;
                for (long k = 0; k < ntags; ++k) ls >> tag;
                if (type != 4) continue;  // only 4-node tets
                long a, b, c, d;
                if (!(ls >> a >> b >> c >> d)) throw parse_error("mesh gmsh: malformed tet element");
                auto idx = [&](long nid) {
                    auto it = node_index.find(nid);
                    if (it == node_index.end()) {
                        throw parse_error("mesh gmsh: element references missing node");
                    }
                    return it->second;
                };
                tets.push_back({idx(a), idx(b), idx(c), idx(d)});
            }
        }
    }
    if (!saw_nodes || !saw_elements) throw parse_error("mesh gmsh: missing $Nodes or $Elements");
    return make_mesh(std::move(nodes), std::move(tets));
}

}  // namespace

TetMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("mesh: cannot open " + path);
    // Sniff: gmsh files start with $MeshFormat, the native format with '{'.
    const int first = in.peek();
    if (first == '{') return load_json(in);
    return load_gmsh_v2(in);
}

void save_mesh_msh(const TetMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("mesh: cannot write " + path);
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n" << mesh.nodes.size() << "\n";
    out.precision(17);
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        out << (i + 1) << " " << mesh.nodes[i].x() << " " << mesh.nodes[i].y() << " "
            << mesh.nodes[i].z() << "\n";
    }
    out << "$EndNodes\n$Elements\n" << mesh.tets.size() << "\n";
    for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
        out << (t + 1) << " 4 2 0 1";
        for (int k = 0; k < 4; ++k) out << " " << (mesh.tets[t][k] + 1);
        out << "\n";
    }
    out << "$EndElements\n";
}

}  // namespace ewjn
