#include "hexcube/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "hexcube/errors.hpp"

namespace hexcube {

std::size_t BinaryVolume::occupied_count() const {
    return static_cast<std::size_t>(
        std::count(occupancy.begin(), occupancy.end(), std::uint8_t{1}));
}

double ScalarGrid::sample(const Vec3& p) const {
    const auto& L = layout;
    double gx = (p.x - L.origin.x) / L.spacing - 0.5;
    double gy = (p.y - L.origin.y) / L.spacing - 0.5;
    double gz = (p.z - L.origin.z) / L.spacing - 0.5;
    gx = std::clamp(gx, 0.0, static_cast<double>(L.dims[0] - 1));
    gy = std::clamp(gy, 0.0, static_cast<double>(L.dims[1] - 1));
    gz = std::clamp(gz, 0.0, static_cast<double>(L.dims[2] - 1));
    int i = std::min(static_cast<int>(gx), L.dims[0] - 2);
    int j = std::min(static_cast<int>(gy), L.dims[1] - 2);
    int k = std::min(static_cast<int>(gz), L.dims[2] - 2);
    i = std::max(i, 0);
    j = std::max(j, 0);
    k = std::max(k, 0);
    double fx = gx - i, fy = gy - j, fz = gz - k;
    double c00 = at(i, j, k) * (1 - fx) + at(i + 1, j, k) * fx;
    double c10 = at(i, j + 1, k) * (1 - fx) + at(i + 1, j + 1, k) * fx;
    double c01 = at(i, j, k + 1) * (1 - fx) + at(i + 1, j, k + 1) * fx;
    double c11 = at(i, j + 1, k + 1) * (1 - fx) + at(i + 1, j + 1, k + 1) * fx;
    double c0 = c00 * (1 - fy) + c10 * fy;
    double c1 = c01 * (1 - fy) + c11 * fy;
    return c0 * (1 - fz) + c1 * fz;
}

namespace {

// x-crossings of the ray (y, z) fixed, direction +x, against one triangle.
// Returns false on a grazing / degenerate configuration that needs a jitter.
bool ray_crossing(const TriMesh& mesh, const std::array<int, 3>& tri, double y, double z,
                  double& x_hit) {
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3& b = mesh.vertices[tri[1]];
    const Vec3& c = mesh.vertices[tri[2]];
    // Project on the (y, z) plane and compute signed areas against the point.
    auto area2 = [&](const Vec3& p, const Vec3& q) {
        return (p.y - y) * (q.z - z) - (p.z - z) * (q.y - y);
    };
    double w0 = area2(b, c);
    double w1 = area2(c, a);
    double w2 = area2(a, b);
    double sum = w0 + w1 + w2;
    if (sum == 0.0) {
        // Triangle parallel to the ray: no crossing (the perpendicular faces
        // carry the parity).
        x_hit = std::numeric_limits<double>::quiet_NaN();
        return true;
    }
    if (sum < 0.0) {
        w0 = -w0;
        w1 = -w1;
        w2 = -w2;
        sum = -sum;
    }
    const double eps = 1e-12 * sum;
    if (w0 < -eps || w1 < -eps || w2 < -eps) {
        x_hit = std::numeric_limits<double>::quiet_NaN();
        return true;  // clean miss
    }
    if (w0 < eps || w1 < eps || w2 < eps) return false;  // hits an edge or vertex
    x_hit = (w0 * a.x + w1 * b.x + w2 * c.x) / sum;
    return true;
}

}  // namespace

BinaryVolume voxelize(const TriMesh& mesh, double spacing, int pad) {
    if (spacing <= 0.0) throw ResolutionTooHigh("spacing must be positive");
    BBox box = bounding_box(mesh);

    BinaryVolume vol;
    vol.layout.spacing = spacing;
    for (int axis = 0; axis < 3; ++axis) {
        double lo = box.min[axis] - pad * spacing;
        int n = static_cast<int>(std::ceil((box.max[axis] - lo) / spacing)) + pad;
        vol.layout.origin[axis] = lo;
        vol.layout.dims[axis] = n;
    }
    const auto& L = vol.layout;
    if (L.size() > 512ull * 512ull * 512ull)
        throw ResolutionTooHigh("grid " + std::to_string(L.dims[0]) + "x" +
                                std::to_string(L.dims[1]) + "x" + std::to_string(L.dims[2]) +
                                " exceeds 512^3; increase spacing");
    vol.occupancy.assign(L.size(), 0);

    // Bin triangles by their (y, z) voxel footprint so each column only tests
    // nearby triangles.
    const int ny = L.dims[1], nz = L.dims[2];
    std::vector<std::vector<int>> bins(static_cast<std::size_t>(ny) * nz);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        double ylo = std::min({mesh.vertices[tri[0]].y, mesh.vertices[tri[1]].y,
                               mesh.vertices[tri[2]].y});
        double yhi = std::max({mesh.vertices[tri[0]].y, mesh.vertices[tri[1]].y,
                               mesh.vertices[tri[2]].y});
        double zlo = std::min({mesh.vertices[tri[0]].z, mesh.vertices[tri[1]].z,
                               mesh.vertices[tri[2]].z});
        double zhi = std::max({mesh.vertices[tri[0]].z, mesh.vertices[tri[1]].z,
                               mesh.vertices[tri[2]].z});
        int j0 = std::clamp(static_cast<int>((ylo - L.origin.y) / spacing - 0.5) - 1, 0, ny - 1);
        int j1 = std::clamp(static_cast<int>((yhi - L.origin.y) / spacing - 0.5) + 1, 0, ny - 1);
        int k0 = std::clamp(static_cast<int>((zlo - L.origin.z) / spacing - 0.5) - 1, 0, nz - 1);
        int k1 = std::clamp(static_cast<int>((zhi - L.origin.z) / spacing - 0.5) + 1, 0, nz - 1);
        for (int k = k0; k <= k1; ++k)
            for (int j = j0; j <= j1; ++j)
                bins[static_cast<std::size_t>(k) * ny + j].push_back(t);
    }

    std::vector<double> crossings;
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            const auto& cand = bins[static_cast<std::size_t>(k) * ny + j];
            if (cand.empty()) continue;
            const double y0 = L.origin.y + (j + 0.5) * spacing;
            const double z0 = L.origin.z + (k + 0.5) * spacing;

            bool resolved = false;
            for (int attempt = 0; attempt < 8 && !resolved; ++attempt) {
                // Deterministic jitter sequence; attempt 0 is the exact center.
                double dy = attempt == 0 ? 0.0 : spacing * 1e-5 * attempt;
                double dz = attempt == 0 ? 0.0 : spacing * 1.7e-5 * attempt;
                crossings.clear();
                bool grazing = false;
                for (int t : cand) {
                    double x_hit;
                    if (!ray_crossing(mesh, mesh.triangles[t], y0 + dy, z0 + dz, x_hit)) {
                        grazing = true;
                        break;
                    }
                    if (!std::isnan(x_hit)) crossings.push_back(x_hit);
                }
                if (grazing) continue;
                if (crossings.size() % 2 != 0)
                    throw NonWatertight("odd ray-crossing parity in column (" +
                                        std::to_string(j) + ", " + std::to_string(k) + ")");
                resolved = true;
            }
            if (!resolved)
                throw NonWatertight("could not resolve grazing ray hits in column (" +
                                    std::to_string(j) + ", " + std::to_string(k) + ")");
            if (crossings.empty()) continue;
            std::sort(crossings.begin(), crossings.end());
            for (std::size_t c = 0; c + 1 < crossings.size(); c += 2) {
                int i0 = static_cast<int>(std::ceil((crossings[c] - L.origin.x) / spacing - 0.5));
                int i1 = static_cast<int>(std::floor((crossings[c + 1] - L.origin.x) / spacing - 0.5));
                i0 = std::max(i0, 0);
                i1 = std::min(i1, L.dims[0] - 1);
                for (int i = i0; i <= i1; ++i) vol.occupancy[L.index(i, j, k)] = 1;
            }
        }
    }
    return vol;
}

namespace {

// One pass of fast sweeping for the eikonal |grad d| = 1 on unsigned distance.
void sweep_pass(ScalarGrid& d, int si, int sj, int sk) {
    const auto& L = d.layout;
    const double h = L.spacing;
    int i0 = si > 0 ? 0 : L.dims[0] - 1, i1 = si > 0 ? L.dims[0] : -1;
    int j0 = sj > 0 ? 0 : L.dims[1] - 1, j1 = sj > 0 ? L.dims[1] : -1;
    int k0 = sk > 0 ? 0 : L.dims[2] - 1, k1 = sk > 0 ? L.dims[2] : -1;
    for (int k = k0; k != k1; k += sk) {
        for (int j = j0; j != j1; j += sj) {
            for (int i = i0; i != i1; i += si) {
                double a = std::min(i > 0 ? d.at(i - 1, j, k) : 1e30,
                                    i < L.dims[0] - 1 ? d.at(i + 1, j, k) : 1e30);
                double b = std::min(j > 0 ? d.at(i, j - 1, k) : 1e30,
                                    j < L.dims[1] - 1 ? d.at(i, j + 1, k) : 1e30);
                double c = std::min(k > 0 ? d.at(i, j, k - 1) : 1e30,
                                    k < L.dims[2] - 1 ? d.at(i, j, k + 1) : 1e30);
                // Solve the quadratic update with sorted neighbor values.
                double v[3] = {a, b, c};
                std::sort(v, v + 3);
                double x = v[0] + h;
                if (x > v[1]) {
                    double s = v[0] + v[1];
                    x = 0.5 * (s + std::sqrt(std::max(0.0, 2 * h * h - (v[1] - v[0]) * (v[1] - v[0]))));
                    if (x > v[2]) {
                        double q = v[0] + v[1] + v[2];
                        double disc = q * q - 3.0 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] - h * h);
                        x = (q + std::sqrt(std::max(0.0, disc))) / 3.0;
                    }
                }
                double& cur = d.values[L.index(i, j, k)];
                if (x < cur) cur = x;
            }
        }
    }
}

}  // namespace

ScalarGrid signed_distance(const BinaryVolume& vol) {
    if (vol.occupied_count() == 0) throw EmptyVolume("no occupied voxels");
    const auto& L = vol.layout;
    const double h = L.spacing;

    // Unsigned distance seeded exactly in a 5-voxel band around the interface.
    ScalarGrid d;
    d.layout = L;
    d.values.assign(L.size(), 1e30);

    // Interface voxels: occupied with an unoccupied 6-neighbor (and vice versa).
    std::vector<Index3> boundary;
    auto occ = [&](int i, int j, int k) -> int {
        if (!L.contains(i, j, k)) return 0;
        return vol.occupancy[L.index(i, j, k)];
    };
    for (int k = 0; k < L.dims[2]; ++k)
        for (int j = 0; j < L.dims[1]; ++j)
            for (int i = 0; i < L.dims[0]; ++i) {
                int me = occ(i, j, k);
                bool iface = (occ(i - 1, j, k) != me) || (occ(i + 1, j, k) != me) ||
                             (occ(i, j - 1, k) != me) || (occ(i, j + 1, k) != me) ||
                             (occ(i, j, k - 1) != me) || (occ(i, j, k + 1) != me);
                if (iface && me == 1) boundary.push_back({i, j, k});
            }

    // The interface passes halfway between center pairs; seed exact distances
    // to the exposed voxel faces (point-to-rectangle) within the band.
    const int band = 5;
    for (const auto& b : boundary) {
        Vec3 bc = L.center(b[0], b[1], b[2]);
        for (int f = 0; f < 6; ++f) {
            static const int off[6][3] = {{-1, 0, 0}, {1, 0, 0},  {0, -1, 0},
                                          {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
            if (occ(b[0] + off[f][0], b[1] + off[f][1], b[2] + off[f][2]) == 1) continue;
            const int axis = f / 2;
            Vec3 face_center = bc + Vec3{off[f][0] * 0.5 * h, off[f][1] * 0.5 * h,
                                         off[f][2] * 0.5 * h};
            for (int dk = -band; dk <= band; ++dk)
                for (int dj = -band; dj <= band; ++dj)
                    for (int di = -band; di <= band; ++di) {
                        int i = b[0] + di, j = b[1] + dj, k = b[2] + dk;
                        if (!L.contains(i, j, k)) continue;
                        Vec3 rel = L.center(i, j, k) - face_center;
                        double dn = rel[axis];
                        double du = std::max(std::abs(rel[(axis + 1) % 3]) - 0.5 * h, 0.0);
                        double dv = std::max(std::abs(rel[(axis + 2) % 3]) - 0.5 * h, 0.0);
                        double dist = std::sqrt(dn * dn + du * du + dv * dv);
                        double& cur = d.values[L.index(i, j, k)];
                        if (dist < cur) cur = dist;
                    }
        }
    }

    // Fast sweeping fills the rest (two rounds of the 8 orderings).
    for (int round = 0; round < 2; ++round)
        for (int si : {1, -1})
            for (int sj : {1, -1})
                for (int sk : {1, -1}) sweep_pass(d, si, sj, sk);

    // Apply sign: negative inside.
    for (int k = 0; k < L.dims[2]; ++k)
        for (int j = 0; j < L.dims[1]; ++j)
            for (int i = 0; i < L.dims[0]; ++i) {
                double& v = d.values[L.index(i, j, k)];
                if (vol.occupancy[L.index(i, j, k)]) v = -v;
            }
    return d;
}

long long cubical_euler_characteristic(const BinaryVolume& vol) {
    const auto& L = vol.layout;
    // chi = V - E + F - C over the cubical complex of occupied voxels.
    // Count distinct vertices, edges, and faces by marking on shifted grids.
    auto occ = [&](int i, int j, int k) -> bool {
        return L.contains(i, j, k) && vol.occupancy[L.index(i, j, k)];
    };
    long long cells = 0, faces = 0, edges = 0, verts = 0;
    const int nx = L.dims[0] + 1, ny = L.dims[1] + 1, nz = L.dims[2] + 1;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                bool o000 = occ(i, j, k);
                if (o000) ++cells;
                // Faces on the low sides of voxel (i,j,k).
                if (o000 || occ(i - 1, j, k)) ++faces;  // x-face
                if (o000 || occ(i, j - 1, k)) ++faces;  // y-face
                if (o000 || occ(i, j, k - 1)) ++faces;  // z-face
                // Edges: x-edge at (i, j, k) is shared by voxels (i, j-1..j, k-1..k).
                bool xe = o000 || occ(i, j - 1, k) || occ(i, j, k - 1) || occ(i, j - 1, k - 1);
                bool ye = o000 || occ(i - 1, j, k) || occ(i, j, k - 1) || occ(i - 1, j, k - 1);
                bool ze = o000 || occ(i - 1, j, k) || occ(i, j - 1, k) || occ(i - 1, j - 1, k);
                edges += (xe ? 1 : 0) + (ye ? 1 : 0) + (ze ? 1 : 0);
                // Vertex at (i, j, k) is shared by 8 voxels.
                bool v = false;
                for (int dk = -1; dk <= 0 && !v; ++dk)
                    for (int dj = -1; dj <= 0 && !v; ++dj)
                        for (int di = -1; di <= 0 && !v; ++di)
                            if (occ(i + di, j + dj, k + dk)) v = true;
                if (v) ++verts;
            }
    return verts - edges + faces - cells;
}

bool occupancy_is_connected(const BinaryVolume& vol) {
    const auto& L = vol.layout;
    auto flood = [&](std::uint8_t target, Index3 seed) -> std::size_t {
        std::vector<char> seen(L.size(), 0);
        std::queue<Index3> q;
        if (!L.contains(seed[0], seed[1], seed[2])) return 0;
        if (vol.occupancy[L.index(seed[0], seed[1], seed[2])] != target) return 0;
        q.push(seed);
        seen[L.index(seed[0], seed[1], seed[2])] = 1;
        std::size_t count = 0;
        while (!q.empty()) {
            auto [i, j, k] = q.front();
            q.pop();
            ++count;
            static const int off[6][3] = {{-1, 0, 0}, {1, 0, 0},  {0, -1, 0},
                                          {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
            for (const auto& o : off) {
                int ni = i + o[0], nj = j + o[1], nk = k + o[2];
                if (!L.contains(ni, nj, nk)) continue;
                std::size_t idx = L.index(ni, nj, nk);
                if (!seen[idx] && vol.occupancy[idx] == target) {
                    seen[idx] = 1;
                    q.push({ni, nj, nk});
                }
            }
        }
        return count;
    };

    std::size_t occupied = vol.occupied_count();
    if (occupied == 0) return false;
    Index3 seed{-1, -1, -1};
    for (int k = 0; k < L.dims[2] && seed[0] < 0; ++k)
        for (int j = 0; j < L.dims[1] && seed[0] < 0; ++j)
            for (int i = 0; i < L.dims[0] && seed[0] < 0; ++i)
                if (vol.occupancy[L.index(i, j, k)]) seed = {i, j, k};
    if (flood(1, seed) != occupied) return false;
    // Complement must also be one component (no internal cavities); the padding
    // guarantees voxel (0, 0, 0) is outside.
    return flood(0, {0, 0, 0}) == L.size() - occupied;
}

}  // namespace hexcube
