#include "hexcube/shell_extraction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hexcube/errors.hpp"
#include "hexcube/isosurface.hpp"
#include "hexcube/mesh_distance.hpp"

namespace hexcube {

namespace {

std::vector<int> schedule_steps(const EvolutionTrace& trace, int N, SnapshotSchedule schedule) {
    const int L = trace.steps_to_convergence();
    if (L < N)
        throw NoConvergence("evolution converged in " + std::to_string(L) +
                            " steps; cannot schedule " + std::to_string(N) + " shells");
    std::vector<int> steps(N);
    if (schedule == SnapshotSchedule::StepUniform) {
        for (int k = 1; k <= N; ++k)
            steps[k - 1] = std::max(1, static_cast<int>(std::llround(
                                           L - (k - 1) * static_cast<double>(L) / N)));
    } else {
        const auto& vol = trace.volume_history();
        long long final_vol = vol[L - 1];
        steps[0] = L;
        for (int k = 2; k <= N; ++k) {
            long long target = static_cast<long long>(
                std::llround(final_vol * static_cast<double>(N - k + 1) / N));
            int s = 1;
            while (s < L && vol[s - 1] < target) ++s;
            steps[k - 1] = s;
        }
    }
    return steps;
}

TriMesh extract_genus_zero(const ScalarGrid& snapshot, double spacing, int k) {
    const double isos[3] = {0.0, -0.1 * spacing, 0.1 * spacing};
    std::string last_error;
    for (double iso : isos) {
        TriMesh mesh = extract_isosurface(snapshot, iso);
        try {
            validate_closed_genus_zero(mesh);
            return mesh;
        } catch (const Error& e) {
            last_error = e.what();
        }
    }
    throw TopologyError("shell " + std::to_string(k) +
                        " is not genus zero at iso 0 or +/-0.1 voxel: " + last_error);
}

// Central-difference gradient of a sampled grid, normalized.
Vec3 grid_gradient(const ScalarGrid& g, const Vec3& p) {
    const double h = 0.5 * g.layout.spacing;
    Vec3 grad{(g.sample({p.x + h, p.y, p.z}) - g.sample({p.x - h, p.y, p.z})) / (2 * h),
              (g.sample({p.x, p.y + h, p.z}) - g.sample({p.x, p.y - h, p.z})) / (2 * h),
              (g.sample({p.x, p.y, p.z + h}) - g.sample({p.x, p.y, p.z - h})) / (2 * h)};
    return normalized(grad);
}

}  // namespace

std::vector<int> shell_snapshot_steps(const EvolutionTrace& trace, int N,
                                      SnapshotSchedule schedule) {
    return schedule_steps(trace, N, schedule);
}

std::vector<TriMesh> extract_shells(const EvolutionTrace& trace, int N,
                                    SnapshotSchedule schedule) {
    if (N < 1) throw ConfigError("shell count must be >= 1");
    const double h = trace.beta().layout.spacing;

    std::vector<int> steps = schedule_steps(trace, N, schedule);
    std::vector<ScalarGrid> snapshots = trace.snapshots_at(steps);

    std::vector<TriMesh> shells(N);
    for (int k = 1; k <= N; ++k) shells[k - 1] = extract_genus_zero(snapshots[k - 1], h, k);

    // Minimum-separation projection: push inner-shell vertices deeper where
    // they crowd the adjacent outer shell.  The target depth covers the 0.25
    // voxel contract plus the sub-voxel wiggle of both triangulated zero sets,
    // and grows by the largest displacement already applied to the outer
    // shell so separation holds against the moved surface, not just its
    // snapshot.
    double outer_max_disp = 0.0;
    for (int k = 2; k <= N; ++k) {
        const ScalarGrid& outer = snapshots[k - 2];
        TriMesh& mesh = shells[k - 1];
        const double target = 0.75 * h + outer_max_disp;
        double max_disp = 0.0;
        auto push_pass = [&] {
            bool moved = false;
            for (auto& v : mesh.vertices) {
                double s = outer.sample(v);
                if (s > -target) {
                    Vec3 n = grid_gradient(outer, v);
                    double push = s + target;
                    v -= n * push;
                    max_disp = std::max(max_disp, push);
                    moved = true;
                }
            }
            return moved;
        };
        bool any_moved = false;
        for (int pass = 0; pass < 3; ++pass) {
            if (!push_pass()) break;
            any_moved = true;
        }
        if (any_moved) {
            // Convergent push directions can squash triangles; a light
            // low-pass relaxes them, then one more pass restores the depth.
            mesh = taubin_smooth(mesh, 2);
            push_pass();
        }
        outer_max_disp = max_disp;

        try {
            validate_closed_genus_zero(mesh);
        } catch (const Error& e) {
            throw OverlapError("separation projection broke shell " + std::to_string(k) + ": " +
                               e.what());
        }
    }

    // Verify strict nesting and >= 0.25 voxel pairwise separation between
    // consecutive shells (vertex-to-surface, both directions).
    for (int k = 2; k <= N; ++k) {
        const ScalarGrid& outer_snap = snapshots[k - 2];
        for (const auto& v : shells[k - 1].vertices)
            if (outer_snap.sample(v) >= 0.0)
                throw OverlapError("shell " + std::to_string(k) +
                                   " is not strictly inside shell " + std::to_string(k - 1));
        TriangleDistanceGrid outer_dist(shells[k - 2]);
        TriangleDistanceGrid inner_dist(shells[k - 1]);
        double sep = std::numeric_limits<double>::max();
        for (const auto& v : shells[k - 1].vertices) sep = std::min(sep, outer_dist.distance(v));
        for (const auto& v : shells[k - 2].vertices) sep = std::min(sep, inner_dist.distance(v));
        if (sep < 0.25 * h - 1e-12)
            throw OverlapError("shells " + std::to_string(k - 1) + "/" + std::to_string(k) +
                               " separated by " + std::to_string(sep / h) + " voxels (< 0.25)");
    }
    return shells;
}

}  // namespace hexcube
