#include "hexcube/sphere_map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "hexcube/errors.hpp"
#include "sparse_solve.hpp"

namespace hexcube {

double CotangentSystem::coeff(int r, int c) const {
    for (int p = row_ptr[r]; p < row_ptr[r + 1]; ++p)
        if (col[p] == c) return val[p];
    return 0.0;
}

double CotangentSystem::row_sum(int r) const {
    double s = 0.0;
    for (int p = row_ptr[r]; p < row_ptr[r + 1]; ++p) s += val[p];
    return s;
}

double CotangentSystem::max_abs_coeff() const {
    double m = 0.0;
    for (double v : val) m = std::max(m, std::abs(v));
    return m;
}

void CotangentSystem::multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(size, 0.0);
    for (int r = 0; r < size; ++r)
        for (int p = row_ptr[r]; p < row_ptr[r + 1]; ++p) y[r] += val[p] * x[col[p]];
}

int select_puncture_triangle(const TriMesh& mesh, std::optional<Vec3> hint) {
    int best = 0;
    if (hint) {
        double best_d = norm2(mesh.triangle_centroid(0) - *hint);
        for (int t = 1; t < mesh.triangle_count(); ++t) {
            double d = norm2(mesh.triangle_centroid(t) - *hint);
            if (d < best_d) {
                best_d = d;
                best = t;
            }
        }
    } else {
        double best_z = mesh.triangle_centroid(0).z;
        for (int t = 1; t < mesh.triangle_count(); ++t) {
            double z = mesh.triangle_centroid(t).z;
            if (z > best_z) {
                best_z = z;
                best = t;
            }
        }
    }
    return best;
}

CotangentSystem build_cotangent_system(const TriMesh& mesh, int puncture) {
    const int n = mesh.vertex_count();
    if (n <= 4) throw DegenerateGeometry("mesh too small for the cotangent system");
    if (puncture < 0 || puncture >= mesh.triangle_count())
        throw DegenerateGeometry("puncture triangle id out of range");

    // Accumulate off-diagonal contributions; the puncture triangle is left out
    // of the Dirichlet energy so its edges keep only the remaining opposite
    // angle.
    std::vector<std::vector<std::pair<int, double>>> rows(n);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        if (t == puncture) continue;
        const auto& tri = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) {
            int p = tri[e], q = tri[(e + 1) % 3], r = tri[(e + 2) % 3];
            double angle = corner_angle(mesh.vertices[r], mesh.vertices[p], mesh.vertices[q]);
            if (angle < 1e-4)
                throw NumericalDegeneracy("corner angle " + std::to_string(angle) +
                                          " rad in triangle " + std::to_string(t));
            double w = -0.5 * corner_cotangent(mesh.vertices[r], mesh.vertices[p],
                                               mesh.vertices[q]);
            rows[p].emplace_back(q, w);
            rows[q].emplace_back(p, w);
        }
    }

    CotangentSystem sys;
    sys.size = n;
    sys.puncture = puncture;
    sys.row_ptr.assign(n + 1, 0);
    for (int r = 0; r < n; ++r) {
        auto& row = rows[r];
        std::sort(row.begin(), row.end(),
                  [](const auto& l, const auto& r_) { return l.first < r_.first; });
        // Merge duplicate columns and append the zero-sum diagonal.
        double diag = 0.0;
        std::vector<std::pair<int, double>> merged;
        for (std::size_t i = 0; i < row.size();) {
            int c = row[i].first;
            double v = 0.0;
            while (i < row.size() && row[i].first == c) v += row[i++].second;
            merged.emplace_back(c, v);
            diag -= v;
        }
        merged.emplace_back(r, diag);
        std::sort(merged.begin(), merged.end(),
                  [](const auto& l, const auto& r_) { return l.first < r_.first; });
        for (auto& [c, v] : merged) {
            sys.col.push_back(c);
            sys.val.push_back(v);
        }
        sys.row_ptr[r + 1] = static_cast<int>(sys.col.size());
    }

    // Dipole right-hand sides at the puncture corners A, B, C.  theta is the
    // foot-of-altitude parameter of C on AB; E = A + theta (B - A).
    const auto& ptri = mesh.triangles[puncture];
    const Vec3 A = mesh.vertices[ptri[0]], B = mesh.vertices[ptri[1]], C = mesh.vertices[ptri[2]];
    sys.puncture_corners = {ptri[0], ptri[1], ptri[2]};
    const double ab = norm(B - A);
    const double theta = dot(B - A, C - A) / (ab * ab);
    const Vec3 E = A + (B - A) * theta;
    const double ce = norm(C - E);
    if (ab < 1e-300 || ce < 1e-300)
        throw NumericalDegeneracy("degenerate puncture triangle");

    // b carries the conjugate dipole: hat-function derivatives along the
    // in-plane normal of AB, signed so the lifted map keeps the source's
    // outward orientation (the components must also sum to zero for the
    // singular system to be solvable).
    sys.a.assign(n, 0.0);
    sys.b.assign(n, 0.0);
    sys.a[ptri[0]] = -1.0 / ab;
    sys.a[ptri[1]] = 1.0 / ab;
    sys.b[ptri[0]] = -(1.0 - theta) / ce;
    sys.b[ptri[1]] = -theta / ce;
    sys.b[ptri[2]] = 1.0 / ce;
    return sys;
}

PlanarCoords solve_planar_coordinates(const CotangentSystem& sys) {
    PlanarCoords out;
    const int n = sys.size;
    double na = 0.0, nb = 0.0;
    for (int i = 0; i < n; ++i) {
        na += sys.a[i] * sys.a[i];
        nb += sys.b[i] * sys.b[i];
    }
    if (na == 0.0 && nb == 0.0) {
        out.x.assign(n, 0.0);
        out.y.assign(n, 0.0);
        return out;
    }

    // Factor once with the puncture corner C pinned to remove the constant
    // nullspace, then shift both solutions to zero mean.
    detail::PinnedSpdSolver solver(sys, sys.puncture_corners[2]);
    out.x = solver.solve(sys.a);
    out.y = solver.solve(sys.b);

    auto demean = [n](std::vector<double>& v) {
        double m = 0.0;
        for (double t : v) m += t;
        m /= n;
        for (double& t : v) t -= m;
    };
    demean(out.x);
    demean(out.y);

    auto residual = [&](const std::vector<double>& x, const std::vector<double>& rhs) {
        std::vector<double> y;
        sys.multiply(x, y);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < n; ++i) {
            num += (y[i] - rhs[i]) * (y[i] - rhs[i]);
            den += rhs[i] * rhs[i];
        }
        return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
    };
    out.residual_x = residual(out.x, sys.a);
    out.residual_y = residual(out.y, sys.b);
    if (out.residual_x > 1e-8 || out.residual_y > 1e-8)
        throw SolverFailure("planar solve residuals " + std::to_string(out.residual_x) + ", " +
                            std::to_string(out.residual_y) + " exceed 1e-8");
    return out;
}

Vec3 inverse_stereographic_point(double x, double y) {
    double r2 = x * x + y * y;
    if (!std::isfinite(r2)) return {0, 0, 1};
    double s = 1.0 / (1.0 + r2);
    return {2 * x * s, 2 * y * s, 2 * r2 * s - 1.0};
}

namespace {

std::vector<double> source_vertex_areas(const TriMesh& src) {
    std::vector<double> weight(src.vertex_count(), 0.0);
    for (int t = 0; t < src.triangle_count(); ++t) {
        double a = src.triangle_area(t) / 3.0;
        for (int v : src.triangles[t]) weight[v] += a;
    }
    return weight;
}

// Sphere inversion through the interior point a (|a| < 1); a Mobius map of
// the sphere that shifts mass away from the a direction.
Vec3 sphere_inversion(const Vec3& p, const Vec3& a) {
    Vec3 d = p - a;
    double s = (1.0 - norm2(a)) / norm2(d);
    return normalized(d * s - a);
}

// Drives the source-area-weighted centroid of the positions to the origin by
// damped Mobius inversions (the remaining conformal freedom after the
// Dirichlet solve).  Centering makes maps of like surfaces comparable, so
// composed shell correspondences stay near the identity.
void mobius_center(SphereMap& map, const std::vector<double>& weight) {
    double wsum = 0.0;
    for (double w : weight) wsum += w;
    for (int iter = 0; iter < 200; ++iter) {
        Vec3 c{0, 0, 0};
        for (std::size_t v = 0; v < map.positions.size(); ++v) c += map.positions[v] * weight[v];
        c = c / wsum;
        if (norm(c) < 1e-10) break;
        Vec3 a = c * 0.5;  // damped; |a| < 1/2 keeps the inversion well-posed
        for (auto& p : map.positions) p = sphere_inversion(p, a);
    }
}

}  // namespace

SphereMap inverse_stereographic(std::shared_ptr<const TriMesh> source,
                                const PlanarCoords& planar, int puncture) {
    const int n = static_cast<int>(planar.x.size());

    // The Dirichlet solution fixes the map only up to the Mobius freedom of
    // the plane.  First recenter and rescale in the plane so half the source
    // area lands on each hemisphere (the raw solution collapses the surface
    // into a cap), then lift and Mobius-center on the sphere.
    std::vector<double> weight = source_vertex_areas(*source);
    double wsum = 0.0, cx = 0.0, cy = 0.0;
    for (int v = 0; v < n; ++v) {
        wsum += weight[v];
        cx += weight[v] * planar.x[v];
        cy += weight[v] * planar.y[v];
    }
    cx /= wsum;
    cy /= wsum;

    std::vector<int> order(n);
    std::vector<double> radius(n);
    for (int v = 0; v < n; ++v) {
        order[v] = v;
        radius[v] = std::hypot(planar.x[v] - cx, planar.y[v] - cy);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) { return radius[a] < radius[b]; });
    double half = 0.5 * wsum, acc = 0.0, scale = 1.0;
    for (int v : order) {
        acc += weight[v];
        if (acc >= half) {
            scale = radius[v];
            break;
        }
    }
    if (scale <= 0.0) scale = 1.0;

    SphereMap map;
    map.source = std::move(source);
    map.puncture = puncture;
    map.positions.resize(n);
    for (int v = 0; v < n; ++v) {
        Vec3 p = inverse_stereographic_point((planar.x[v] - cx) / scale,
                                             (planar.y[v] - cy) / scale);
        map.positions[v] = normalized(p);  // renormalize against roundoff
    }
    mobius_center(map, weight);
    align_to_source_frame(map);
    return map;
}

SphereMap conformal_to_sphere(std::shared_ptr<const TriMesh> source, std::optional<Vec3> hint) {
    int puncture = select_puncture_triangle(*source, hint);
    CotangentSystem sys = build_cotangent_system(*source, puncture);
    PlanarCoords planar = solve_planar_coordinates(sys);
    SphereMap map = inverse_stereographic(std::move(source), planar, puncture);
    // Isolated folds appear on irregular meshes and relax away; widespread
    // folds mean the surface's conformal range exceeds double precision
    // (extreme necks map below representable scale).
    int remaining = untangle_sphere_map(map);
    if (remaining > 0)
        throw SolverFailure("conformal map is not injective (" + std::to_string(remaining) +
                            " folded triangles); the surface is too distorted for a single "
                            "sphere map at this resolution");
    return map;
}

std::vector<double> spherical_triangle_areas(const SphereMap& map) {
    const auto& tris = map.mesh().triangles;
    std::vector<double> areas(tris.size());
    for (std::size_t t = 0; t < tris.size(); ++t)
        areas[t] = spherical_triangle_area(map.positions[tris[t][0]], map.positions[tris[t][1]],
                                           map.positions[tris[t][2]]);
    return areas;
}

double total_signed_spherical_area(const SphereMap& map) {
    double total = 0.0;
    for (double a : spherical_triangle_areas(map)) total += a;
    return total;
}

int flipped_spherical_triangle_count(const SphereMap& map) {
    auto areas = spherical_triangle_areas(map);
    double total = 0.0;
    for (double a : areas) total += a;
    const double sign = total >= 0 ? 1.0 : -1.0;
    int flipped = 0;
    for (double a : areas)
        if (sign * a <= 0.0) ++flipped;
    return flipped;
}

int untangle_sphere_map(SphereMap& map, int max_rounds) {
    const TriMesh& mesh = map.mesh();
    std::vector<std::vector<int>> one_ring(map.positions.size());
    for (const auto& tri : mesh.triangles)
        for (int v = 0; v < 3; ++v) one_ring[tri[v]].push_back(tri[(v + 1) % 3]);

    for (int round = 0; round < max_rounds; ++round) {
        auto areas = spherical_triangle_areas(map);
        double total = 0.0;
        for (double a : areas) total += a;
        std::vector<int> bad;
        for (std::size_t t = 0; t < areas.size(); ++t)
            if (areas[t] * total <= 0.0)
                for (int v : mesh.triangles[t]) bad.push_back(v);
        if (bad.empty()) return 0;
        std::sort(bad.begin(), bad.end());
        bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
        for (int v : bad) {
            Vec3 sum{0, 0, 0};
            for (int w : one_ring[v]) sum += map.positions[w];
            if (!one_ring[v].empty()) map.positions[v] = normalized(sum / one_ring[v].size());
        }
    }
    return flipped_spherical_triangle_count(map);
}

void align_to_source_frame(SphereMap& map) {
    const TriMesh& src = map.mesh();
    Vec3 center = mesh_centroid(src);
    auto areas = spherical_triangle_areas(map);

    // Area-weighted correlation between source directions and sphere images;
    // the optimal rotation comes from its SVD (Kabsch).
    Eigen::Matrix3d K = Eigen::Matrix3d::Zero();
    for (int t = 0; t < src.triangle_count(); ++t) {
        const auto& tri = src.triangles[t];
        Vec3 d = normalized(src.triangle_centroid(t) - center);
        Vec3 p = normalized(map.positions[tri[0]] + map.positions[tri[1]] +
                            map.positions[tri[2]]);
        double w = std::abs(areas[t]);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) K(r, c) += w * p[r] * d[c];
    }
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(K, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d U = svd.matrixU(), V = svd.matrixV();
    double sign = (V * U.transpose()).determinant() >= 0 ? 1.0 : -1.0;
    Eigen::Matrix3d R = V * Eigen::Vector3d(1, 1, sign).asDiagonal() * U.transpose();

    for (auto& p : map.positions) {
        Eigen::Vector3d q = R * Eigen::Vector3d(p.x, p.y, p.z);
        p = normalized(Vec3{q[0], q[1], q[2]});
    }
}

void align_azimuth(SphereMap& map) {
    const TriMesh& src = map.mesh();
    double mean_x = mesh_centroid(src).x;
    auto areas = spherical_triangle_areas(map);

    double mx = 0.0, my = 0.0;
    for (int t = 0; t < src.triangle_count(); ++t) {
        const auto& tri = src.triangles[t];
        Vec3 c = (map.positions[tri[0]] + map.positions[tri[1]] + map.positions[tri[2]]) / 3.0;
        double len = std::hypot(c.x, c.y);
        if (len < 1e-12) continue;
        double weight = std::abs(areas[t]) * (src.triangle_centroid(t).x - mean_x);
        mx += weight * c.x / len;
        my += weight * c.y / len;
    }
    double m = std::hypot(mx, my);
    if (m < 1e-12) return;  // no azimuthal signal; keep the map as solved
    double ca = mx / m, sa = my / m;
    // Rotate by -alpha about z.
    for (auto& p : map.positions) {
        double x = ca * p.x + sa * p.y;
        double y = -sa * p.x + ca * p.y;
        p.x = x;
        p.y = y;
    }
}

}  // namespace hexcube
