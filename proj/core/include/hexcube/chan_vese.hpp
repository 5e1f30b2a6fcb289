#pragma once

#include <memory>
#include <vector>

#include "hexcube/voxel_grid.hpp"

namespace hexcube {

// Region-based level-set segmentation of a binary volume.  The interface is
// seeded as a small ball at the deepest interior voxel and grows until it
// matches the occupancy boundary, so every intermediate zero-level set is a
// closed surface nested inside the object.  phi < 0 inside.
//
// The trace keeps the inputs needed to replay the (fully deterministic)
// evolution, so snapshots at arbitrary steps can be materialized on demand
// without storing a grid per step.
class EvolutionTrace {
public:
    int steps_to_convergence() const { return steps_to_convergence_; }
    // Accumulated descent of the segmentation energy, one entry per step;
    // non-increasing after every accepted step (reinitialization ramp shifts
    // are netted out).
    const std::vector<double>& energy_history() const { return energy_history_; }
    // Enclosed (phi < 0) voxel count after each step.
    const std::vector<long long>& volume_history() const { return volume_history_; }
    const BinaryVolume& beta() const { return *beta_; }

    // phi after `step` steps, reinitialized to signed-distance quality near the
    // interface, in model units.  Steps are materialized by replaying once.
    std::vector<ScalarGrid> snapshots_at(const std::vector<int>& steps) const;
    ScalarGrid snapshot_at(int step) const;

private:
    friend EvolutionTrace evolve_chan_vese(const BinaryVolume&, int, double, double,
                                           const ScalarGrid*);
    std::shared_ptr<const BinaryVolume> beta_;
    std::vector<float> phi0_;  // seed level set, voxel units
    double eps_ = 1.5;
    double dt_ = 0.5;
    int max_steps_ = 0;
    int steps_to_convergence_ = 0;
    std::vector<double> energy_history_;
    std::vector<long long> volume_history_;
};

// Runs the evolution to convergence (interface stationary and matching the
// occupancy boundary within one voxel Hausdorff distance).  eps is the
// Heaviside half-width in voxels, dt the descent step.  Throws NoConvergence
// when the energy stalls or max_steps is exhausted before matching,
// EmptyInterface when either region empties out.
EvolutionTrace evolve_chan_vese(const BinaryVolume& beta, int max_steps = 5000,
                                double eps = 1.5, double dt = 0.5,
                                const ScalarGrid* sdf_hint = nullptr);

// Regularized Heaviside: 1 inside (phi < -eps), 0 outside (phi > eps), smooth
// monotone ramp between.
double heaviside(double phi, double eps);

}  // namespace hexcube
