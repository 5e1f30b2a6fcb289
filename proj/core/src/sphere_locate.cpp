#include "hexcube/sphere_locate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hexcube/errors.hpp"

namespace hexcube {

SphereLocator::SphereLocator(const SphereMap& map)
    : map_(map), adjacency_(triangle_adjacency(map.mesh())) {}

std::array<double, 3> SphereLocator::raw_bary(int t, const Vec3& q) const {
    const auto& tri = map_.mesh().triangles[t];
    const Vec3& a = map_.positions[tri[0]];
    const Vec3& b = map_.positions[tri[1]];
    const Vec3& c = map_.positions[tri[2]];
    double det = triple(a, b, c);
    if (det == 0.0) return {-1.0, -1.0, -1.0};
    return {triple(q, b, c) / det, triple(a, q, c) / det, triple(a, b, q) / det};
}

SphereLocator::Hit SphereLocator::locate(const Vec3& q, int hint) const {
    const int nt = map_.mesh().triangle_count();
    int t = (hint >= 0 && hint < nt) ? hint : 0;
    const double tol = -1e-12;
    for (int step = 0; step < 2 * nt; ++step) {
        auto w = raw_bary(t, q);
        double sum = w[0] + w[1] + w[2];
        if (sum > 0.0) {
            double w0 = w[0] / sum, w1 = w[1] / sum, w2 = w[2] / sum;
            if (w0 >= tol && w1 >= tol && w2 >= tol) {
                Hit hit;
                hit.triangle = t;
                hit.bary = {std::max(w0, 0.0), std::max(w1, 0.0), std::max(w2, 0.0)};
                double s = hit.bary[0] + hit.bary[1] + hit.bary[2];
                for (auto& v : hit.bary) v /= s;
                return hit;
            }
            // Cross the edge opposite the most negative weight.
            double wv[3] = {w0, w1, w2};
            int worst = 0;
            if (wv[1] < wv[worst]) worst = 1;
            if (wv[2] < wv[worst]) worst = 2;
            int next = adjacency_[t][(worst + 1) % 3];
            if (next < 0) break;
            t = next;
        } else {
            break;  // behind the triangle plane; walk is lost
        }
    }
    return locate_brute(q);
}

SphereLocator::Hit SphereLocator::locate_brute(const Vec3& q) const {
    const int nt = map_.mesh().triangle_count();
    Hit best;
    double best_min = -std::numeric_limits<double>::max();
    for (int t = 0; t < nt; ++t) {
        auto w = raw_bary(t, q);
        double sum = w[0] + w[1] + w[2];
        if (sum <= 0.0) continue;
        double w0 = w[0] / sum, w1 = w[1] / sum, w2 = w[2] / sum;
        double low = std::min({w0, w1, w2});
        if (low > best_min) {
            best_min = low;
            best.triangle = t;
            best.bary = {std::max(w0, 0.0), std::max(w1, 0.0), std::max(w2, 0.0)};
            double s = best.bary[0] + best.bary[1] + best.bary[2];
            for (auto& v : best.bary) v /= s;
        }
    }
    if (best.triangle < 0) throw LocationFailure("no spherical triangle faces the query");
    return best;
}

Vec3 SphereLocator::interpolate_source(const Hit& hit, const Vec3& q) const {
    const auto& tri = map_.mesh().triangles[hit.triangle];
    // Vertex queries reproduce the source vertex exactly.
    for (int v = 0; v < 3; ++v)
        if (map_.positions[tri[v]] == q) return map_.mesh().vertices[tri[v]];
    return map_.mesh().vertices[tri[0]] * hit.bary[0] + map_.mesh().vertices[tri[1]] * hit.bary[1] +
           map_.mesh().vertices[tri[2]] * hit.bary[2];
}

}  // namespace hexcube
