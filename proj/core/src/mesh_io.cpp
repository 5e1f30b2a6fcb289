#include "hexcube/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "hexcube/errors.hpp"

namespace hexcube {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext;
}

std::string next_data_line(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r\n") != std::string::npos) return line;
    }
    return {};
}

TriMesh load_off(std::istream& in) {
    std::string header = next_data_line(in);
    // Tolerate counts on the header line ("OFF 8 12 18").
    std::istringstream hs(header);
    std::string magic;
    hs >> magic;
    if (magic != "OFF") throw ParseError("missing OFF header");
    long nv = -1, nf = -1, ne = -1;
    if (!(hs >> nv >> nf >> ne)) {
        std::istringstream cs(next_data_line(in));
        if (!(cs >> nv >> nf >> ne)) throw ParseError("bad OFF count line");
    }
    if (nv <= 0 || nf <= 0) throw ParseError("OFF with no vertices or faces");

    TriMesh mesh;
    mesh.vertices.reserve(nv);
    for (long i = 0; i < nv; ++i) {
        std::istringstream ls(next_data_line(in));
        Vec3 v;
        if (!(ls >> v.x >> v.y >> v.z)) throw ParseError("bad OFF vertex line");
        mesh.vertices.push_back(v);
    }
    for (long f = 0; f < nf; ++f) {
        std::istringstream ls(next_data_line(in));
        int n = 0;
        if (!(ls >> n)) throw ParseError("bad OFF face line");
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i)
            if (!(ls >> idx[i])) throw ParseError("bad OFF face index");
        if (n < 3) throw ParseError("OFF face with fewer than 3 vertices");
        for (int i = 1; i + 1 < n; ++i)
            mesh.triangles.push_back({idx[0], idx[i], idx[i + 1]});
    }
    return mesh;
}

TriMesh load_obj(std::istream& in) {
    TriMesh mesh;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z)) throw ParseError("bad OBJ vertex line");
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string token;
            while (ls >> token) {
                // "i", "i/t", "i/t/n", "i//n" all start with the vertex index.
                int v = std::stoi(token.substr(0, token.find('/')));
                if (v < 0) v = static_cast<int>(mesh.vertices.size()) + v + 1;
                idx.push_back(v - 1);
            }
            if (idx.size() < 3) throw ParseError("OBJ face with fewer than 3 vertices");
            for (std::size_t i = 1; i + 1 < idx.size(); ++i)
                mesh.triangles.push_back({idx[0], static_cast<int>(idx[i]),
                                          static_cast<int>(idx[i + 1])});
        }
    }
    if (mesh.vertices.empty()) throw ParseError("OBJ with no vertices");
    return mesh;
}

TriMesh load_stl_ascii(std::istream& in) {
    std::string first;
    std::getline(in, first);
    if (first.rfind("solid", 0) != 0)
        throw ParseError("not an ASCII STL (binary STL is unsupported)");

    std::vector<Vec3> raw;
    std::string token;
    while (in >> token) {
        if (token == "vertex") {
            Vec3 v;
            if (!(in >> v.x >> v.y >> v.z)) throw ParseError("bad STL vertex");
            raw.push_back(v);
        }
    }
    if (raw.size() < 9 || raw.size() % 3 != 0)
        throw ParseError("STL vertex count is not a multiple of 3");

    // Deduplicate facet corners by grid hashing.
    BBox box;
    for (const auto& v : raw) box.expand(v);
    const double tol = 1e-7 * box.diagonal();
    const double cell = std::max(tol, 1e-300);
    std::map<std::tuple<long long, long long, long long>, std::vector<int>> grid;

    TriMesh mesh;
    std::vector<int> remap(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const Vec3& p = raw[i];
        long long gx = static_cast<long long>(std::floor(p.x / cell));
        long long gy = static_cast<long long>(std::floor(p.y / cell));
        long long gz = static_cast<long long>(std::floor(p.z / cell));
        int found = -1;
        for (long long dz = -1; dz <= 1 && found < 0; ++dz)
            for (long long dy = -1; dy <= 1 && found < 0; ++dy)
                for (long long dx = -1; dx <= 1 && found < 0; ++dx) {
                    auto it = grid.find({gx + dx, gy + dy, gz + dz});
                    if (it == grid.end()) continue;
                    for (int cand : it->second)
                        if (distance(mesh.vertices[cand], p) <= tol) {
                            found = cand;
                            break;
                        }
                }
        if (found < 0) {
            found = mesh.vertex_count();
            mesh.vertices.push_back(p);
            grid[{gx, gy, gz}].push_back(found);
        }
        remap[i] = found;
    }
    for (std::size_t t = 0; t + 2 < raw.size(); t += 3)
        mesh.triangles.push_back({remap[t], remap[t + 1], remap[t + 2]});
    return mesh;
}

void print_double(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

TriMesh load_surface_mesh(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
    std::string ext = lower_extension(path);
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    TriMesh mesh;
    if (ext == ".off")
        mesh = load_off(in);
    else if (ext == ".obj")
        mesh = load_obj(in);
    else if (ext == ".stl")
        mesh = load_stl_ascii(in);
    else
        throw ParseError("unsupported extension '" + ext + "' (expect .off/.obj/.stl)");

    validate_closed_genus_zero(mesh);
    return mesh;
}

void write_hex_vtk(const HexMesh& mesh, const std::filesystem::path& path) {
    std::string out;
    out.reserve(mesh.nodes.size() * 60 + mesh.cells.size() * 40);
    out += "# vtk DataFile Version 3.0\nhexcube volumetric mesh\nASCII\n";
    out += "DATASET UNSTRUCTURED_GRID\n";
    out += "POINTS " + std::to_string(mesh.nodes.size()) + " double\n";
    for (const auto& p : mesh.nodes) {
        print_double(out, p.x);
        out += ' ';
        print_double(out, p.y);
        out += ' ';
        print_double(out, p.z);
        out += '\n';
    }
    out += "CELLS " + std::to_string(mesh.cells.size()) + " " +
           std::to_string(mesh.cells.size() * 9) + "\n";
    for (const auto& c : mesh.cells) {
        out += '8';
        for (int v : c) {
            out += ' ';
            out += std::to_string(v);
        }
        out += '\n';
    }
    out += "CELL_TYPES " + std::to_string(mesh.cells.size()) + "\n";
    for (std::size_t i = 0; i < mesh.cells.size(); ++i) out += "12\n";

    const bool has_volume = mesh.cell_volume.size() == mesh.cells.size();
    const bool has_shell = mesh.cell_shell.size() == mesh.cells.size();
    if (has_volume || has_shell)
        out += "CELL_DATA " + std::to_string(mesh.cells.size()) + "\n";
    if (has_volume) {
        out += "SCALARS volume double 1\nLOOKUP_TABLE default\n";
        for (double v : mesh.cell_volume) {
            print_double(out, v);
            out += '\n';
        }
    }
    if (has_shell) {
        out += "SCALARS shell int 1\nLOOKUP_TABLE default\n";
        for (int s : mesh.cell_shell) out += std::to_string(s) + '\n';
    }

    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path.string());
    f << out;
    if (!f) throw IoError("write failed for " + path.string());
}

HexMesh load_hex_vtk(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    HexMesh mesh;
    std::string token;
    while (in >> token) {
        if (token == "DATASET") {
            in >> token;
            if (token != "UNSTRUCTURED_GRID")
                throw ParseError("expected UNSTRUCTURED_GRID, got " + token);
        } else if (token == "POINTS") {
            std::size_t n;
            std::string type;
            in >> n >> type;
            mesh.nodes.resize(n);
            for (auto& p : mesh.nodes)
                if (!(in >> p.x >> p.y >> p.z)) throw ParseError("bad POINTS data");
        } else if (token == "CELLS") {
            std::size_t n, total;
            in >> n >> total;
            mesh.cells.resize(n);
            for (auto& c : mesh.cells) {
                int count;
                in >> count;
                if (count != 8) throw ParseError("only 8-node hexahedra are supported");
                for (int v = 0; v < 8; ++v)
                    if (!(in >> c[v])) throw ParseError("bad CELLS data");
            }
        } else if (token == "CELL_TYPES") {
            std::size_t n;
            in >> n;
            for (std::size_t i = 0; i < n; ++i) {
                int type;
                in >> type;
                if (type != 12) throw ParseError("unexpected VTK cell type");
            }
        } else if (token == "SCALARS") {
            std::string name, type, next;
            in >> name >> type >> next;
            if (next != "LOOKUP_TABLE") {
                if (next != "1") throw ParseError("only single-component scalars supported");
                in >> next;  // LOOKUP_TABLE
            }
            in >> next;  // table name
            if (name == "volume") {
                mesh.cell_volume.resize(mesh.cells.size());
                for (auto& v : mesh.cell_volume)
                    if (!(in >> v)) throw ParseError("bad volume data");
            } else if (name == "shell") {
                mesh.cell_shell.resize(mesh.cells.size());
                for (auto& s : mesh.cell_shell)
                    if (!(in >> s)) throw ParseError("bad shell data");
            } else {
                for (std::size_t i = 0; i < mesh.cells.size(); ++i) in >> token;
            }
        }
    }
    if (mesh.nodes.empty() || mesh.cells.empty())
        throw ParseError("VTK file holds no hexahedral mesh");
    // Recover the lattice dimension when the node count is a perfect cube.
    int n = static_cast<int>(std::llround(std::cbrt(static_cast<double>(mesh.nodes.size()))));
    if (static_cast<std::size_t>(n) * n * n == mesh.nodes.size() &&
        mesh.cells.size() == static_cast<std::size_t>(n - 1) * (n - 1) * (n - 1))
        mesh.lattice_nodes_per_axis = n;
    return mesh;
}

void write_scalar_grid_vtk(const ScalarGrid& grid, const std::filesystem::path& path) {
    const auto& L = grid.layout;
    std::string out;
    out.reserve(grid.values.size() * 12 + 256);
    out += "# vtk DataFile Version 3.0\nhexcube level set\nASCII\n";
    out += "DATASET STRUCTURED_POINTS\n";
    out += "DIMENSIONS " + std::to_string(L.dims[0]) + " " + std::to_string(L.dims[1]) + " " +
           std::to_string(L.dims[2]) + "\n";
    out += "ORIGIN ";
    print_double(out, L.origin.x + 0.5 * L.spacing);
    out += ' ';
    print_double(out, L.origin.y + 0.5 * L.spacing);
    out += ' ';
    print_double(out, L.origin.z + 0.5 * L.spacing);
    out += "\nSPACING ";
    print_double(out, L.spacing);
    out += ' ';
    print_double(out, L.spacing);
    out += ' ';
    print_double(out, L.spacing);
    out += "\nPOINT_DATA " + std::to_string(grid.values.size()) + "\n";
    out += "SCALARS phi double 1\nLOOKUP_TABLE default\n";
    for (double v : grid.values) {
        print_double(out, v);
        out += '\n';
    }
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path.string());
    f << out;
    if (!f) throw IoError("write failed for " + path.string());
}

void write_surface_off(const TriMesh& mesh, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path.string());
    f << "OFF\n" << mesh.vertices.size() << ' ' << mesh.triangles.size() << " 0\n";
    std::string out;
    for (const auto& v : mesh.vertices) {
        print_double(out, v.x);
        out += ' ';
        print_double(out, v.y);
        out += ' ';
        print_double(out, v.z);
        out += '\n';
    }
    for (const auto& t : mesh.triangles)
        out += "3 " + std::to_string(t[0]) + ' ' + std::to_string(t[1]) + ' ' +
               std::to_string(t[2]) + '\n';
    f << out;
    if (!f) throw IoError("write failed for " + path.string());
}

}  // namespace hexcube
