#include <doctest.h>

#include <cmath>

#include "hexcube/chan_vese.hpp"
#include "hexcube/errors.hpp"
#include "hexcube/mesh_distance.hpp"
#include "hexcube/shapes.hpp"
#include "hexcube/shell_extraction.hpp"
#include "test_support.hpp"

using namespace hexcube;

namespace {

EvolutionTrace ball_trace(double spacing = 0.1) {
    BinaryVolume beta = voxelize(shapes::icosphere(3), spacing);
    return evolve_chan_vese(beta, 4000, 1.5, 0.5, nullptr);
}

}  // namespace

TEST_CASE("extract_shells: ball yields nested near-spheres, radii decreasing") {
    EvolutionTrace trace = ball_trace();
    const double h = trace.beta().layout.spacing;
    auto shells = extract_shells(trace, 3);
    REQUIRE(shells.size() == 3);

    // Centroid-distance oracle: mean vertex radius per shell.
    double radius[3];
    for (int k = 0; k < 3; ++k) {
        validate_closed_genus_zero(shells[k]);
        Vec3 c = mesh_centroid(shells[k]);
        double sum = 0.0;
        for (const auto& v : shells[k].vertices) sum += norm(v - c);
        radius[k] = sum / shells[k].vertex_count();
    }
    CHECK(radius[0] > radius[1]);
    CHECK(radius[1] > radius[2]);
    // Outermost shell is the model surface (radius ~1).
    CHECK(radius[0] == doctest::Approx(1.0).epsilon(0.05));

    // Enclosed volumes strictly decrease with k.
    CHECK(mesh_volume(shells[0]) > mesh_volume(shells[1]));
    CHECK(mesh_volume(shells[1]) > mesh_volume(shells[2]));

    // Pairwise separation >= 0.25 voxel.
    for (int k = 1; k < 3; ++k) {
        TriangleDistanceGrid outer(shells[k - 1]);
        for (const auto& v : shells[k].vertices) CHECK(outer.distance(v) >= 0.25 * h - 1e-12);
    }
}

TEST_CASE("extract_shells: N=1 reproduces the model surface within one voxel") {
    EvolutionTrace trace = ball_trace(0.12);
    auto shells = extract_shells(trace, 1);
    REQUIRE(shells.size() == 1);
    // Every vertex sits within one voxel of the unit sphere.
    for (const auto& v : shells[0].vertices)
        CHECK(std::abs(norm(v) - 1.0) <= trace.beta().layout.spacing);
}

TEST_CASE("extract_shells: strict nesting (winding-number oracle)") {
    EvolutionTrace trace = ball_trace(0.12);
    auto shells = extract_shells(trace, 4);
    // Every vertex of shell k+1 lies inside shell k.
    for (int k = 1; k < 4; ++k) {
        int inside = 0, checked = 0;
        for (int v = 0; v < shells[k].vertex_count(); v += 9) {
            ++checked;
            if (testsupport::inside_by_winding(shells[k - 1], shells[k].vertices[v])) ++inside;
        }
        CHECK(inside == checked);
    }
}

TEST_CASE("extract_shells: deterministic outputs") {
    EvolutionTrace trace = ball_trace(0.15);
    auto a = extract_shells(trace, 2);
    auto b = extract_shells(trace, 2);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        REQUIRE(a[k].vertex_count() == b[k].vertex_count());
        for (int v = 0; v < a[k].vertex_count(); ++v)
            CHECK(a[k].vertices[v] == b[k].vertices[v]);  // bit identical
    }
}

TEST_CASE("extract_shells: volume-uniform schedule spaces enclosed volumes") {
    EvolutionTrace trace = ball_trace(0.1);
    auto shells = extract_shells(trace, 3, SnapshotSchedule::VolumeUniform);
    double v1 = mesh_volume(shells[0]);
    double v2 = mesh_volume(shells[1]);
    double v3 = mesh_volume(shells[2]);
    CHECK(v1 > v2);
    CHECK(v2 > v3);
    // Enclosed volumes of the inner shells track (N-k+1)/N of the final.
    CHECK(v2 == doctest::Approx(v1 * 2.0 / 3.0).epsilon(0.25));
    CHECK(v3 == doctest::Approx(v1 / 3.0).epsilon(0.35));
}

TEST_CASE("extract_shells: shell count must fit the evolution length") {
    EvolutionTrace trace = ball_trace(0.15);
    CHECK_THROWS_AS(extract_shells(trace, trace.steps_to_convergence() + 1), NoConvergence);
}
