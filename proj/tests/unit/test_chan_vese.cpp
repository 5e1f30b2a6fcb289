#include <doctest.h>

#include <cmath>

#include "hexcube/chan_vese.hpp"
#include "hexcube/errors.hpp"
#include "hexcube/shapes.hpp"

using namespace hexcube;

namespace {

BinaryVolume ball_volume(double radius = 1.0, double spacing = 0.1) {
    return voxelize(shapes::icosphere(3, radius), spacing);
}

}  // namespace

TEST_CASE("heaviside: corrected branches are monotone with phi < 0 inside") {
    const double eps = 1.5;
    CHECK(heaviside(-2 * eps, eps) == 1.0);
    CHECK(heaviside(2 * eps, eps) == 0.0);
    CHECK(heaviside(0.0, eps) == doctest::Approx(0.5));
    CHECK(heaviside(-eps, eps) == doctest::Approx(1.0));
    CHECK(heaviside(eps, eps) == doctest::Approx(0.0));
    for (double a = -eps; a < eps - 0.05; a += 0.05)
        CHECK(heaviside(a, eps) >= heaviside(a + 0.05, eps));
}

TEST_CASE("chan-vese: ball converges with separated region means") {
    BinaryVolume beta = ball_volume();
    EvolutionTrace trace = evolve_chan_vese(beta, 4000, 1.5, 0.5);
    CHECK(trace.steps_to_convergence() >= 1);

    // Converged mu_in / mu_out: direct evaluation of the quotient formulas on
    // the converged phi, in the sharp-indicator limit of the regularization.
    ScalarGrid phi = trace.snapshot_at(trace.steps_to_convergence());
    double sh = 0.0, shb = 0.0, s1h = 0.0, s1hb = 0.0;
    for (std::size_t v = 0; v < phi.values.size(); ++v) {
        double h = phi.values[v] < 0 ? 1.0 : 0.0;
        sh += h;
        shb += h * beta.occupancy[v];
        s1h += 1.0 - h;
        s1hb += (1.0 - h) * beta.occupancy[v];
    }
    double mu_in = shb / sh, mu_out = s1hb / s1h;
    CHECK(mu_in >= 0.99);
    CHECK(mu_out <= 0.01);
}

TEST_CASE("chan-vese: energy history is non-increasing") {
    BinaryVolume beta = ball_volume(1.0, 0.12);
    EvolutionTrace trace = evolve_chan_vese(beta);
    const auto& energy = trace.energy_history();
    REQUIRE(!energy.empty());
    const double slack = 1e-9 * std::abs(energy.front());
    for (std::size_t s = 1; s < energy.size(); ++s) CHECK(energy[s] <= energy[s - 1] + slack);
}

TEST_CASE("chan-vese: enclosed volume grows monotonically") {
    BinaryVolume beta = ball_volume(1.0, 0.12);
    EvolutionTrace trace = evolve_chan_vese(beta);
    const auto& volume = trace.volume_history();
    for (std::size_t s = 1; s < volume.size(); ++s) CHECK(volume[s] >= volume[s - 1]);
}

TEST_CASE("chan-vese: all-foreground volume trips the empty-interface guard") {
    BinaryVolume beta;
    beta.layout.dims = {24, 24, 24};
    beta.layout.spacing = 1.0;
    beta.occupancy.assign(beta.layout.size(), 1);
    CHECK_THROWS_AS(evolve_chan_vese(beta, 2000, 1.5, 0.5), Error);
}

TEST_CASE("chan-vese: deterministic replay reproduces the trajectory") {
    BinaryVolume beta = ball_volume(1.0, 0.15);
    EvolutionTrace t1 = evolve_chan_vese(beta);
    EvolutionTrace t2 = evolve_chan_vese(beta);
    CHECK(t1.steps_to_convergence() == t2.steps_to_convergence());
    REQUIRE(t1.energy_history().size() == t2.energy_history().size());
    for (std::size_t s = 0; s < t1.energy_history().size(); ++s)
        CHECK(t1.energy_history()[s] == t2.energy_history()[s]);  // bit identical

    int mid = t1.steps_to_convergence() / 2 + 1;
    ScalarGrid s1 = t1.snapshot_at(mid);
    ScalarGrid s2 = t2.snapshot_at(mid);
    REQUIRE(s1.values.size() == s2.values.size());
    for (std::size_t v = 0; v < s1.values.size(); ++v) CHECK(s1.values[v] == s2.values[v]);
}

TEST_CASE("chan-vese: snapshots nest (later contains earlier)") {
    BinaryVolume beta = ball_volume(1.0, 0.12);
    EvolutionTrace trace = evolve_chan_vese(beta);
    int L = trace.steps_to_convergence();
    auto snaps = trace.snapshots_at({L / 3 + 1, 2 * L / 3 + 1, L});
    // Growing interface: every voxel inside an early snapshot is inside the
    // later ones.
    for (std::size_t v = 0; v < snaps[0].values.size(); ++v) {
        if (snaps[0].values[v] < 0) CHECK(snaps[1].values[v] < 0);
        if (snaps[1].values[v] < 0) CHECK(snaps[2].values[v] < 0);
    }
}
