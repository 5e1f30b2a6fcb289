#include "hexcube/quality.hpp"

#include <algorithm>
#include <cmath>

#include "hexcube/errors.hpp"

namespace hexcube {

namespace {

// VTK corner id from lattice bits (bit0 = x, bit1 = y, bit2 = z).
constexpr int kVtkFromBits[8] = {0, 1, 3, 2, 4, 5, 7, 6};

inline int vtk_id(int bx, int by, int bz) { return kVtkFromBits[bx + 2 * by + 4 * bz]; }

int bin32(double value, double lo, double hi) {
    int b = static_cast<int>((value - lo) / (hi - lo) * 32.0);
    return std::clamp(b, 0, 31);
}

}  // namespace

ElementQuality element_quality(const std::array<Vec3, 8>& c) {
    ElementQuality q;

    // Min scaled Jacobian: at each corner the three emanating edges, with the
    // determinant sign fixed by the corner parity.
    q.min_scaled_jacobian = 2.0;
    for (int bz = 0; bz < 2; ++bz)
        for (int by = 0; by < 2; ++by)
            for (int bx = 0; bx < 2; ++bx) {
                const Vec3& p = c[vtk_id(bx, by, bz)];
                Vec3 ex = c[vtk_id(1 - bx, by, bz)] - p;
                Vec3 ey = c[vtk_id(bx, 1 - by, bz)] - p;
                Vec3 ez = c[vtk_id(bx, by, 1 - bz)] - p;
                double lx = norm(ex), ly = norm(ey), lz = norm(ez);
                double det;
                if (lx == 0.0 || ly == 0.0 || lz == 0.0)
                    det = 0.0;
                else
                    det = triple(ex / lx, ey / ly, ez / lz);
                if ((bx + by + bz) % 2 != 0) det = -det;
                q.min_scaled_jacobian = std::min(q.min_scaled_jacobian, det);
            }

    // Principal axes: mean of the four parallel edge vectors.
    Vec3 X[3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2) {
            X[0] += (c[vtk_id(1, b1, b2)] - c[vtk_id(0, b1, b2)]) * 0.25;
            X[1] += (c[vtk_id(b1, 1, b2)] - c[vtk_id(b1, 0, b2)]) * 0.25;
            X[2] += (c[vtk_id(b1, b2, 1)] - c[vtk_id(b1, b2, 0)]) * 0.25;
        }
    double len[3] = {norm(X[0]), norm(X[1]), norm(X[2])};
    double lmax = std::max({len[0], len[1], len[2]});
    double lmin = std::min({len[0], len[1], len[2]});
    q.aspect_ratio = lmin > 0 ? lmax / lmin : std::numeric_limits<double>::infinity();

    // Taper: mixed second differences against the smaller paired axis.
    auto cross_diff = [&](int a, int b) {
        // Difference along axis a of the difference along axis b, averaged
        // over the remaining axis.
        Vec3 sum{0, 0, 0};
        int other = 3 - a - b;
        for (int bo = 0; bo < 2; ++bo) {
            int bits[3];
            bits[other] = bo;
            auto corner = [&](int ba, int bb) {
                bits[a] = ba;
                bits[b] = bb;
                return c[vtk_id(bits[0], bits[1], bits[2])];
            };
            sum += (corner(1, 1) - corner(0, 1) - corner(1, 0) + corner(0, 0)) * 0.25;
        }
        return sum;
    };
    q.taper = 0.0;
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& pr : pairs) {
        double denom = std::min(len[pr[0]], len[pr[1]]);
        double t = denom > 0 ? norm(cross_diff(pr[0], pr[1])) / denom
                             : std::numeric_limits<double>::infinity();
        q.taper = std::max(q.taper, t);
    }
    return q;
}

QualityReport compute_quality(const HexMesh& mesh) {
    QualityReport report;
    report.nodes = mesh.node_count();
    report.hexahedra = mesh.cell_count();
    if (mesh.cell_count() == 0) return report;

    report.min_scaled_jacobian.reserve(mesh.cell_count());
    report.aspect_ratio.reserve(mesh.cell_count());
    report.taper.reserve(mesh.cell_count());
    long long concave = 0;
    for (int e = 0; e < mesh.cell_count(); ++e) {
        ElementQuality q = element_quality(cell_corners(mesh, e));
        report.min_scaled_jacobian.push_back(q.min_scaled_jacobian);
        report.aspect_ratio.push_back(q.aspect_ratio);
        report.taper.push_back(q.taper);
        if (q.min_scaled_jacobian <= 0.0) ++concave;
        report.min_jacobian_histogram[bin32(q.min_scaled_jacobian, -1.0, 1.0)]++;
        report.aspect_ratio_histogram[bin32(q.aspect_ratio, 1.0, 9.0)]++;
        report.taper_histogram[bin32(q.taper, 0.0, 1.6)]++;
    }
    report.concave_fraction = static_cast<double>(concave) / mesh.cell_count();
    report.volume_variance = volume_variance(mesh);
    return report;
}

double volume_variance(const HexMesh& mesh) {
    if (mesh.cell_count() == 0) throw ZeroMeanVolume("mesh has no cells");
    std::vector<double> vols = mesh.cell_volume;
    if (vols.size() != mesh.cells.size()) {
        vols.resize(mesh.cells.size());
        for (int e = 0; e < mesh.cell_count(); ++e)
            vols[e] = hex_volume_tets(cell_corners(mesh, e));
    }
    double mean = 0.0;
    for (double v : vols) mean += v;
    mean /= vols.size();
    if (mean == 0.0) throw ZeroMeanVolume("cell volumes have zero mean");
    double var = 0.0;
    for (double v : vols) {
        double d = v / mean - 1.0;
        var += d * d;
    }
    return var / vols.size();
}

}  // namespace hexcube
