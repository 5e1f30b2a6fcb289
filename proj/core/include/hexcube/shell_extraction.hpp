#pragma once

#include <vector>

#include "hexcube/chan_vese.hpp"
#include "hexcube/tri_mesh.hpp"

namespace hexcube {

enum class SnapshotSchedule {
    StepUniform,    // snapshots at steps L - (k-1) * L / N
    VolumeUniform,  // snapshots where the enclosed volume crosses k/N of the final
};

// Evolution steps at which the N shells are sampled (index 0 = shell 1 = the
// converged surface).
std::vector<int> shell_snapshot_steps(const EvolutionTrace& trace, int N,
                                      SnapshotSchedule schedule);

// Pulls N nested genus-zero surfaces out of the evolution: shell 1 is the
// converged model surface (outermost), shell N the innermost.  Consecutive
// shells are kept at least 0.25 voxel apart by pushing vertices of the inner
// shell deeper along the outer shell's distance gradient.  Throws
// TopologyError when a shell cannot be extracted at genus zero (after +/- 0.1
// voxel iso retries), OverlapError when nesting or separation fails.
std::vector<TriMesh> extract_shells(const EvolutionTrace& trace, int N,
                                    SnapshotSchedule schedule = SnapshotSchedule::StepUniform);

}  // namespace hexcube
