#include "hexcube/volume_flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hexcube/errors.hpp"
#include "hexcube/voxel_grid.hpp"
#include "sparse_solve.hpp"

namespace hexcube {

double CellField::mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return values.empty() ? 0.0 : s / values.size();
}

std::size_t FaceField::index(int axis, int i, int j, int k) const {
    const int n = cells_per_axis;
    switch (axis) {
        case 0: return (static_cast<std::size_t>(k) * n + j) * (n + 1) + i;
        case 1: return (static_cast<std::size_t>(k) * (n + 1) + j) * n + i;
        default: return (static_cast<std::size_t>(k) * n + j) * n + i;
    }
}

FaceField lattice_gradient(const CellField& p) {
    const int n = p.cells_per_axis;
    const double inv_h = static_cast<double>(n);  // h = 1/n exactly
    FaceField f;
    f.cells_per_axis = n;
    f.comp[0].assign(static_cast<std::size_t>(n + 1) * n * n, 0.0);
    f.comp[1].assign(static_cast<std::size_t>(n) * (n + 1) * n, 0.0);
    f.comp[2].assign(static_cast<std::size_t>(n) * n * (n + 1), 0.0);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                if (i + 1 < n)
                    f.comp[0][f.index(0, i + 1, j, k)] =
                        (p.values[p.index(i + 1, j, k)] - p.values[p.index(i, j, k)]) * inv_h;
                if (j + 1 < n)
                    f.comp[1][f.index(1, i, j + 1, k)] =
                        (p.values[p.index(i, j + 1, k)] - p.values[p.index(i, j, k)]) * inv_h;
                if (k + 1 < n)
                    f.comp[2][f.index(2, i, j, k + 1)] =
                        (p.values[p.index(i, j, k + 1)] - p.values[p.index(i, j, k)]) * inv_h;
            }
    return f;
}

CellField lattice_divergence(const FaceField& f) {
    const int n = f.cells_per_axis;
    const double inv_h = static_cast<double>(n);
    CellField d;
    d.cells_per_axis = n;
    d.values.assign(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                d.values[d.index(i, j, k)] =
                    (f.comp[0][f.index(0, i + 1, j, k)] - f.comp[0][f.index(0, i, j, k)]) * inv_h +
                    (f.comp[1][f.index(1, i, j + 1, k)] - f.comp[1][f.index(1, i, j, k)]) * inv_h +
                    (f.comp[2][f.index(2, i, j, k + 1)] - f.comp[2][f.index(2, i, j, k)]) * inv_h;
    return d;
}

CellField jacobian_field(const VolumetricMap& map, const CellField* model_density) {
    const int n = map.nodes_per_axis() - 1;
    const double h = 1.0 / n;
    const double cell_vol = h * h * h;

    CellField jac;
    jac.cells_per_axis = n;
    jac.values.resize(map.cube->hexes.size());

    std::string inverted;
    int inverted_count = 0;
    for (std::size_t c = 0; c < map.cube->hexes.size(); ++c) {
        std::array<Vec3, 8> corners;
        for (int v = 0; v < 8; ++v) corners[v] = map.images[map.cube->hexes[c][v]];
        double vol = hex_volume_tets(corners);
        if (vol <= 0.0) {
            if (++inverted_count <= 8) inverted += " " + std::to_string(c);
            continue;
        }
        double density = model_density ? model_density->values[c] : 1.0;
        jac.values[c] = vol * density / cell_vol;
    }
    if (inverted_count > 0)
        throw InvertedCell(std::to_string(inverted_count) +
                           " image hexahedra have non-positive volume (cells:" + inverted + ")");

    double m = jac.mean();
    if (m <= 0.0) throw InvertedCell("Jacobian field has non-positive mean");
    for (double& v : jac.values) v /= m;
    return jac;
}

PotentialSolve solve_divergence_potential(const CellField& rhs) {
    const int n = rhs.cells_per_axis;
    const std::size_t cells = rhs.values.size();
    double mean = rhs.mean();
    if (std::abs(mean) > 1e-9)
        throw IncompatibleRHS("rhs mean " + std::to_string(mean) + " exceeds 1e-9");

    // Exact compatibility for the singular Neumann system.
    CellField balanced = rhs;
    for (double& v : balanced.values) v -= mean;

    // div(grad p) = rhs  <=>  S p = -rhs with S the PSD 7-point stiffness.
    const double inv_h2 = static_cast<double>(n) * n;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(cells * 7);
    auto cid = [&](int i, int j, int k) { return static_cast<int>(balanced.index(i, j, k)); };
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                int c = cid(i, j, k);
                const int nb[6][3] = {{i - 1, j, k}, {i + 1, j, k}, {i, j - 1, k},
                                      {i, j + 1, k}, {i, j, k - 1}, {i, j, k + 1}};
                for (const auto& o : nb) {
                    if (o[0] < 0 || o[1] < 0 || o[2] < 0 || o[0] >= n || o[1] >= n || o[2] >= n)
                        continue;
                    trips.emplace_back(c, cid(o[0], o[1], o[2]), -inv_h2);
                    trips.emplace_back(c, c, inv_h2);
                }
            }
    std::vector<double> neg_rhs(cells);
    for (std::size_t c = 0; c < cells; ++c) neg_rhs[c] = -balanced.values[c];

    PotentialSolve out;
    out.p.cells_per_axis = n;
    detail::PinnedSpdSolver solver(static_cast<int>(cells), trips, 0);
    out.p.values = solver.solve(neg_rhs);

    out.velocity_faces = lattice_gradient(out.p);

    // Residual of the composed operators against the balanced rhs.
    CellField div = lattice_divergence(out.velocity_faces);
    double num = 0.0, den = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
        double r = div.values[c] - balanced.values[c];
        num += r * r;
        den += balanced.values[c] * balanced.values[c];
    }
    out.residual = den > 0 ? std::sqrt(num / den) : std::sqrt(num);
    if (den > 0 && out.residual > 1e-8)
        throw SolverFailure("divergence-potential residual " + std::to_string(out.residual));

    // Node velocities: per axis, average the touching faces of that axis.
    // Normal components vanish at each wall (boundary faces hold zero and are
    // re-zeroed explicitly), so faces slide within themselves, edge nodes along
    // their edge, and corners stay fixed; g remains a cube self-map.
    const int nn = n + 1;
    out.v.nodes_per_axis = nn;
    out.v.values.assign(static_cast<std::size_t>(nn) * nn * nn, Vec3{0, 0, 0});
    const auto& F = out.velocity_faces;
    for (int k = 0; k < nn; ++k)
        for (int j = 0; j < nn; ++j)
            for (int i = 0; i < nn; ++i) {
                Vec3 v{0, 0, 0};
                {  // x faces at (i, j', k')
                    double sum = 0.0;
                    int count = 0;
                    for (int dj = -1; dj <= 0; ++dj)
                        for (int dk = -1; dk <= 0; ++dk) {
                            int jj = j + dj, kk = k + dk;
                            if (jj < 0 || kk < 0 || jj >= n || kk >= n) continue;
                            sum += F.comp[0][F.index(0, i, jj, kk)];
                            ++count;
                        }
                    if (count) v.x = sum / count;
                }
                {
                    double sum = 0.0;
                    int count = 0;
                    for (int di = -1; di <= 0; ++di)
                        for (int dk = -1; dk <= 0; ++dk) {
                            int ii = i + di, kk = k + dk;
                            if (ii < 0 || kk < 0 || ii >= n || kk >= n) continue;
                            sum += F.comp[1][F.index(1, ii, j, kk)];
                            ++count;
                        }
                    if (count) v.y = sum / count;
                }
                {
                    double sum = 0.0;
                    int count = 0;
                    for (int di = -1; di <= 0; ++di)
                        for (int dj = -1; dj <= 0; ++dj) {
                            int ii = i + di, jj = j + dj;
                            if (ii < 0 || jj < 0 || ii >= n || jj >= n) continue;
                            sum += F.comp[2][F.index(2, ii, jj, k)];
                            ++count;
                        }
                    if (count) v.z = sum / count;
                }
                if (i == 0 || i == nn - 1) v.x = 0.0;
                if (j == 0 || j == nn - 1) v.y = 0.0;
                if (k == 0 || k == nn - 1) v.z = 0.0;
                out.v.values[out.v.index(i, j, k)] = v;
            }
    return out;
}

NodeVectorField moser_velocity(const NodeVectorField& v, const CellField& jac, double t) {
    const int nn = v.nodes_per_axis;
    const int n = jac.cells_per_axis;
    NodeVectorField x;
    x.nodes_per_axis = nn;
    x.values.resize(v.values.size());
    for (int k = 0; k < nn; ++k)
        for (int j = 0; j < nn; ++j)
            for (int i = 0; i < nn; ++i) {
                double sum = 0.0;
                int count = 0;
                for (int dk = -1; dk <= 0; ++dk)
                    for (int dj = -1; dj <= 0; ++dj)
                        for (int di = -1; di <= 0; ++di) {
                            int ci = i + di, cj = j + dj, ck = k + dk;
                            if (ci < 0 || cj < 0 || ck < 0 || ci >= n || cj >= n || ck >= n)
                                continue;
                            sum += jac.values[jac.index(ci, cj, ck)];
                            ++count;
                        }
                double jn = sum / count;
                std::size_t id = x.index(i, j, k);
                x.values[id] = v.values[id] * (-1.0 / ((1.0 - t) * jn + t));
            }
    return x;
}

namespace {

// Trilinear sample of a node field at q in [0,1]^3.
Vec3 sample_node_field(const NodeVectorField& f, const Vec3& q) {
    const int nn = f.nodes_per_axis;
    const double h = 1.0 / (nn - 1);
    double gx = std::clamp(q.x / h, 0.0, nn - 1.0);
    double gy = std::clamp(q.y / h, 0.0, nn - 1.0);
    double gz = std::clamp(q.z / h, 0.0, nn - 1.0);
    int i = std::min(static_cast<int>(gx), nn - 2);
    int j = std::min(static_cast<int>(gy), nn - 2);
    int k = std::min(static_cast<int>(gz), nn - 2);
    double fx = gx - i, fy = gy - j, fz = gz - k;
    auto at = [&](int a, int b, int c) { return f.values[f.index(a, b, c)]; };
    Vec3 c00 = at(i, j, k) * (1 - fx) + at(i + 1, j, k) * fx;
    Vec3 c10 = at(i, j + 1, k) * (1 - fx) + at(i + 1, j + 1, k) * fx;
    Vec3 c01 = at(i, j, k + 1) * (1 - fx) + at(i + 1, j, k + 1) * fx;
    Vec3 c11 = at(i, j + 1, k + 1) * (1 - fx) + at(i + 1, j + 1, k + 1) * fx;
    Vec3 c0 = c00 * (1 - fy) + c10 * fy;
    Vec3 c1 = c01 * (1 - fy) + c11 * fy;
    return c0 * (1 - fz) + c1 * fz;
}

// Jacobian cell field averaged to nodes once, then sampled trilinearly.
NodeVectorField jacobian_to_nodes(const CellField& jac) {
    const int n = jac.cells_per_axis;
    const int nn = n + 1;
    NodeVectorField f;
    f.nodes_per_axis = nn;
    f.values.assign(static_cast<std::size_t>(nn) * nn * nn, Vec3{0, 0, 0});
    for (int k = 0; k < nn; ++k)
        for (int j = 0; j < nn; ++j)
            for (int i = 0; i < nn; ++i) {
                double sum = 0.0;
                int count = 0;
                for (int dk = -1; dk <= 0; ++dk)
                    for (int dj = -1; dj <= 0; ++dj)
                        for (int di = -1; di <= 0; ++di) {
                            int ci = i + di, cj = j + dj, ck = k + dk;
                            if (ci < 0 || cj < 0 || ck < 0 || ci >= n || cj >= n || ck >= n)
                                continue;
                            sum += jac.values[jac.index(ci, cj, ck)];
                            ++count;
                        }
                f.values[f.index(i, j, k)] = {sum / count, 0, 0};
            }
    return f;
}

void project_boundary(std::vector<Vec3>& g, int nn) {
    auto id = [nn](int i, int j, int k) {
        return (static_cast<std::size_t>(k) * nn + j) * nn + i;
    };
    for (int k = 0; k < nn; ++k)
        for (int j = 0; j < nn; ++j)
            for (int i = 0; i < nn; ++i) {
                Vec3& p = g[id(i, j, k)];
                if (i == 0) p.x = 0.0;
                if (i == nn - 1) p.x = 1.0;
                if (j == 0) p.y = 0.0;
                if (j == nn - 1) p.y = 1.0;
                if (k == 0) p.z = 0.0;
                if (k == nn - 1) p.z = 1.0;
                p.x = std::clamp(p.x, 0.0, 1.0);
                p.y = std::clamp(p.y, 0.0, 1.0);
                p.z = std::clamp(p.z, 0.0, 1.0);
            }
}

bool lattice_has_inverted_cell(const std::vector<Vec3>& g, const CubeComplex& cube) {
    std::array<Vec3, 8> corners;
    for (const auto& hex : cube.hexes) {
        for (int v = 0; v < 8; ++v) corners[v] = g[hex[v]];
        if (hex_volume_tets(corners) <= 0.0) return true;
    }
    return false;
}

struct CellPoint {
    Index3 cell{0, 0, 0};
    Vec3 local{0, 0, 0};  // components snapped exactly to 0/1 at the walls
};

// Newton inversion of the piecewise-trilinear g at target x.  Candidate cells
// start at the lattice cell of `seed` and fall back to a full scan.
CellPoint invert_trilinear(const std::vector<Vec3>& g, const CubeComplex& cube, const Vec3& x,
                           const Index3& seed) {
    const int nn = cube.nodes_per_axis();
    const int n = nn - 1;
    const double h = 1.0 / n;

    auto try_cell = [&](int ci, int cj, int ck, CellPoint& result) {
        std::array<Vec3, 8> c;
        for (int b = 0; b < 8; ++b)
            c[b] = g[cube.node_id(ci + (b & 1), cj + ((b >> 1) & 1), ck + ((b >> 2) & 1))];
        // Quick reject on the cell's bounding box.
        BBox box;
        for (const auto& p : c) box.expand(p);
        const double slack = 0.25 * h;
        if (x.x < box.min.x - slack || x.x > box.max.x + slack || x.y < box.min.y - slack ||
            x.y > box.max.y + slack || x.z < box.min.z - slack || x.z > box.max.z + slack)
            return false;

        Vec3 u{0.5, 0.5, 0.5};
        for (int it = 0; it < 50; ++it) {
            Vec3 f = trilinear_core_fallback(c, u) - x;
            if (norm(f) < 1e-12) break;
            // Jacobian of the trilinear map at u.
            auto lerp = [](const Vec3& a, const Vec3& b, double t) { return a + (b - a) * t; };
            Vec3 du = lerp(lerp(c[1] - c[0], c[3] - c[2], u.y), lerp(c[5] - c[4], c[7] - c[6], u.y),
                           u.z);
            Vec3 dv = lerp(lerp(c[2] - c[0], c[3] - c[1], u.x), lerp(c[6] - c[4], c[7] - c[5], u.x),
                           u.z);
            Vec3 dw = lerp(lerp(c[4] - c[0], c[5] - c[1], u.x), lerp(c[6] - c[2], c[7] - c[3], u.x),
                           u.y);
            double det = triple(du, dv, dw);
            if (std::abs(det) < 1e-300) return false;
            // Cramer solve J s = f.
            Vec3 s{triple(f, dv, dw) / det, triple(du, f, dw) / det, triple(du, dv, f) / det};
            u -= s;
            u.x = std::clamp(u.x, -0.25, 1.25);
            u.y = std::clamp(u.y, -0.25, 1.25);
            u.z = std::clamp(u.z, -0.25, 1.25);
        }
        Vec3 f = trilinear_core_fallback(c, u) - x;
        const double tol = 1e-10;
        if (norm(f) > tol) return false;
        if (u.x < -1e-8 || u.x > 1 + 1e-8 || u.y < -1e-8 || u.y > 1 + 1e-8 || u.z < -1e-8 ||
            u.z > 1 + 1e-8)
            return false;
        auto snap = [](double t) {
            t = std::clamp(t, 0.0, 1.0);
            if (t < 1e-9) return 0.0;
            if (t > 1.0 - 1e-9) return 1.0;
            return t;
        };
        result.cell = {ci, cj, ck};
        result.local = {snap(u.x), snap(u.y), snap(u.z)};
        return true;
    };

    CellPoint result;
    // Expanding rings around the seed cell.
    for (int ring = 0; ring <= n; ++ring) {
        for (int dk = -ring; dk <= ring; ++dk)
            for (int dj = -ring; dj <= ring; ++dj)
                for (int di = -ring; di <= ring; ++di) {
                    if (std::max({std::abs(di), std::abs(dj), std::abs(dk)}) != ring) continue;
                    int ci = seed[0] + di, cj = seed[1] + dj, ck = seed[2] + dk;
                    if (ci < 0 || cj < 0 || ck < 0 || ci >= n || cj >= n || ck >= n) continue;
                    if (try_cell(ci, cj, ck, result)) return result;
                }
    }
    throw InversionFailure("g is not invertible at (" + std::to_string(x.x) + ", " +
                           std::to_string(x.y) + ", " + std::to_string(x.z) + ")");
}

}  // namespace

double map_volume_variance(const VolumetricMap& map) {
    std::vector<double> vols(map.cube->hexes.size());
    std::array<Vec3, 8> corners;
    double mean = 0.0;
    for (std::size_t c = 0; c < vols.size(); ++c) {
        for (int v = 0; v < 8; ++v) corners[v] = map.images[map.cube->hexes[c][v]];
        vols[c] = hex_volume_tets(corners);
        mean += vols[c];
    }
    mean /= vols.size();
    if (mean == 0.0) throw ZeroMeanVolume("image cells have zero mean volume");
    double var = 0.0;
    for (double v : vols) {
        double d = v / mean - 1.0;
        var += d * d;
    }
    return var / vols.size();
}

VolumeFlowResult integrate_volume_flow(const VolumetricMap& map, int steps) {
    if (steps < 1) throw ConfigError("volume flow needs at least one step");
    VolumeFlowResult result;
    result.variance_before = map_volume_variance(map);

    CellField jac = jacobian_field(map);
    double dev = 0.0;
    for (double v : jac.values) dev = std::max(dev, std::abs(v - 1.0));
    if (dev < 1e-12) {
        // Already volume uniform: X vanishes and g is the identity.
        result.map = map;
        result.accepted = true;
        result.variance_after = result.variance_before;
        return result;
    }

    CellField rhs;
    rhs.cells_per_axis = jac.cells_per_axis;
    rhs.values.resize(jac.values.size());
    for (std::size_t c = 0; c < jac.values.size(); ++c) rhs.values[c] = 1.0 - jac.values[c];

    PotentialSolve pot = solve_divergence_potential(rhs);
    NodeVectorField jac_nodes = jacobian_to_nodes(jac);

    const int nn = map.nodes_per_axis();
    const CubeComplex& cube = *map.cube;

    std::vector<Vec3> g;
    bool ok = false;
    int substeps = steps;
    for (int retry = 0; retry <= 3 && !ok; ++retry) {
        g.assign(cube.nodes.begin(), cube.nodes.end());
        ok = true;
        for (int s = 0; s < substeps && ok; ++s) {
            double t = static_cast<double>(s) / substeps;
            double dt = 1.0 / substeps;
            for (auto& p : g) {
                Vec3 vel = sample_node_field(pot.v, p);
                double jn = sample_node_field(jac_nodes, p).x;
                Vec3 xt = vel * (-1.0 / ((1.0 - t) * jn + t));
                p += xt * dt;
            }
            project_boundary(g, nn);
            if (lattice_has_inverted_cell(g, cube)) ok = false;
        }
        if (!ok) {
            result.retries = retry + 1;
            substeps *= 2;
        }
    }
    if (!ok) {
        // Even the finest step size inverted a cell: keep the input.
        result.map = map;
        result.accepted = false;
        result.variance_after = result.variance_before;
        return result;
    }

    // Resample f at g^{-1} of every lattice node.
    VolumetricMap flowed;
    flowed.cube = map.cube;
    flowed.images.resize(map.images.size());
    const int n = nn - 1;
    for (int k = 0; k < nn; ++k)
        for (int j = 0; j < nn; ++j)
            for (int i = 0; i < nn; ++i) {
                Vec3 x = cube.nodes[cube.node_id(i, j, k)];
                Index3 seed{std::min(i, n - 1), std::min(j, n - 1), std::min(k, n - 1)};
                CellPoint y = invert_trilinear(g, cube, x, seed);
                // f at the reference point (piecewise trilinear in the images).
                std::array<Vec3, 8> c;
                for (int b = 0; b < 8; ++b)
                    c[b] = map.images[cube.node_id(y.cell[0] + (b & 1),
                                                   y.cell[1] + ((b >> 1) & 1),
                                                   y.cell[2] + ((b >> 2) & 1))];
                flowed.images[cube.node_id(i, j, k)] = trilinear_core_fallback(c, y.local);
            }

    // Gate: never hand back a map that lost volume or inverted a cell.
    bool image_ok = true;
    {
        std::array<Vec3, 8> c;
        for (const auto& hex : cube.hexes) {
            for (int v = 0; v < 8; ++v) c[v] = flowed.images[hex[v]];
            if (hex_volume_tets(c) <= 0.0) {
                image_ok = false;
                break;
            }
        }
    }
    result.variance_after = image_ok ? map_volume_variance(flowed) : result.variance_before;
    if (image_ok && result.variance_after <= result.variance_before) {
        result.map = std::move(flowed);
        result.accepted = true;
    } else {
        result.map = map;
        result.accepted = false;
        result.variance_after = result.variance_before;
    }
    return result;
}

}  // namespace hexcube
