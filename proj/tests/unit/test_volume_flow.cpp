#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "hexcube/cube_complex.hpp"
#include "hexcube/errors.hpp"
#include "hexcube/volume_flow.hpp"

using namespace hexcube;

namespace {

VolumetricMap identity_map(int N) {
    VolumetricMap map;
    map.cube = std::make_shared<CubeComplex>(build_cube_shells(N));
    map.images = map.cube->nodes;
    return map;
}

// Smooth volume-distorting diffeomorphism of the unit cube (boundary
// preserved per axis since x(1-x) vanishes at the walls; amplitudes below 2
// keep every axis derivative positive).
VolumetricMap warped_map(int N, double amp) {
    VolumetricMap map = identity_map(N);
    for (auto& p : map.images) {
        double fx = p.x + amp * p.x * (1 - p.x) * (0.5 - p.x) * std::sin(2.1 * p.y + 0.4);
        double fy = p.y + amp * p.y * (1 - p.y) * (0.4 - p.y) * std::cos(1.7 * p.z);
        double fz = p.z + amp * p.z * (1 - p.z) * (0.6 - p.z) * std::sin(1.3 * p.x + 1.0);
        p = {fx, fy, fz};
    }
    return map;
}

}  // namespace

TEST_CASE("jacobian field: identity and uniform scaling normalize to one") {
    VolumetricMap map = identity_map(4);
    CellField jac = jacobian_field(map);
    for (double v : jac.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    for (auto& p : map.images) p *= 1.7;  // uniform scale: s^3 before normalization
    CellField jac_scaled = jacobian_field(map);
    for (double v : jac_scaled.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("jacobian field: inverted image cell is reported") {
    VolumetricMap map = identity_map(3);
    for (auto& p : map.images) p.x = -p.x;  // mirrored map: every cell inverted
    CHECK_THROWS_AS(jacobian_field(map), InvertedCell);
}

TEST_CASE("divergence potential: zero rhs, dipole rhs, compatibility guard") {
    const int n = 7;  // cells per axis

    SUBCASE("rhs = 0 gives v = 0") {
        CellField rhs;
        rhs.cells_per_axis = n;
        rhs.values.assign(n * n * n, 0.0);
        PotentialSolve sol = solve_divergence_potential(rhs);
        for (const auto& v : sol.v.values) {
            CHECK(v.x == 0.0);
            CHECK(v.y == 0.0);
            CHECK(v.z == 0.0);
        }
    }

    SUBCASE("interior source/sink pair: discrete divergence matches rhs") {
        CellField rhs;
        rhs.cells_per_axis = n;
        rhs.values.assign(n * n * n, 0.0);
        rhs.values[rhs.index(1, 3, 3)] = 0.5;
        rhs.values[rhs.index(5, 3, 3)] = -0.5;
        PotentialSolve sol = solve_divergence_potential(rhs);
        CHECK(sol.residual <= 1e-8);

        CellField div = lattice_divergence(sol.velocity_faces);
        double worst = 0.0;
        for (std::size_t c = 0; c < div.values.size(); ++c)
            worst = std::max(worst, std::abs(div.values[c] - rhs.values[c]));
        CHECK(worst <= 1e-8);

        // Flux runs from the source toward the sink.
        CHECK(sol.velocity_faces.comp[0][sol.velocity_faces.index(0, 3, 3, 3)] > 0.0);
    }

    SUBCASE("nonzero mean is rejected") {
        CellField rhs;
        rhs.cells_per_axis = n;
        rhs.values.assign(n * n * n, 0.01);
        CHECK_THROWS_AS(solve_divergence_potential(rhs), IncompatibleRHS);
    }
}

TEST_CASE("divergence potential: no flow through the walls, corners pinned") {
    const int n = 9;
    CellField rhs;
    rhs.cells_per_axis = n;
    rhs.values.assign(n * n * n, 0.0);
    rhs.values[rhs.index(2, 4, 4)] = 1.0;
    rhs.values[rhs.index(6, 4, 4)] = -1.0;
    PotentialSolve sol = solve_divergence_potential(rhs);
    const int nn = n + 1;
    for (int k = 0; k < nn; ++k)
        for (int j = 0; j < nn; ++j)
            for (int i = 0; i < nn; ++i) {
                const Vec3& v = sol.v.values[sol.v.index(i, j, k)];
                if (i == 0 || i == nn - 1) CHECK(v.x == 0.0);
                if (j == 0 || j == nn - 1) CHECK(v.y == 0.0);
                if (k == 0 || k == nn - 1) CHECK(v.z == 0.0);
            }
    // Corner nodes cannot move at all.
    const Vec3& corner = sol.v.values[sol.v.index(0, 0, 0)];
    CHECK((corner.x == 0.0 && corner.y == 0.0 && corner.z == 0.0));
    // Face nodes may slide within their face.
    double tangential = 0.0;
    for (int j = 1; j + 1 < nn; ++j)
        for (int k = 1; k + 1 < nn; ++k)
            tangential = std::max(tangential,
                                  std::abs(sol.v.values[sol.v.index(0, j, k)].y) +
                                      std::abs(sol.v.values[sol.v.index(0, j, k)].z));
    CHECK(tangential > 0.0);
}

TEST_CASE("operator identity: div(grad) equals the 7-point stencil bit-for-bit") {
    const int n = 5;
    const double inv_h2 = static_cast<double>(n) * n;

    // Independent 7-point Neumann stencil.
    auto stencil = [&](const CellField& p, int i, int j, int k) {
        double acc = 0.0;
        const int nb[6][3] = {{i - 1, j, k}, {i + 1, j, k}, {i, j - 1, k},
                              {i, j + 1, k}, {i, j, k - 1}, {i, j, k + 1}};
        for (const auto& o : nb) {
            if (o[0] < 0 || o[1] < 0 || o[2] < 0 || o[0] >= n || o[1] >= n || o[2] >= n) continue;
            acc += (p.values[p.index(o[0], o[1], o[2])] - p.values[p.index(i, j, k)]) * inv_h2;
        }
        return acc;
    };

    SUBCASE("unit vectors: exact equality") {
        for (int unit = 0; unit < n * n * n; unit += 7) {
            CellField p;
            p.cells_per_axis = n;
            p.values.assign(n * n * n, 0.0);
            p.values[unit] = 1.0;
            CellField lap = lattice_divergence(lattice_gradient(p));
            for (int k = 0; k < n; ++k)
                for (int j = 0; j < n; ++j)
                    for (int i = 0; i < n; ++i)
                        CHECK(lap.values[p.index(i, j, k)] == stencil(p, i, j, k));
        }
    }
    SUBCASE("random fields: equality to rounding noise") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> u(-1, 1);
        CellField p;
        p.cells_per_axis = n;
        p.values.resize(n * n * n);
        for (auto& v : p.values) v = u(rng);
        CellField lap = lattice_divergence(lattice_gradient(p));
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    CHECK(lap.values[p.index(i, j, k)] ==
                          doctest::Approx(stencil(p, i, j, k)).epsilon(1e-12));
    }
}

TEST_CASE("moser velocity: endpoint and uniform-jacobian formulas") {
    const int n = 4;
    NodeVectorField v;
    v.nodes_per_axis = n + 1;
    v.values.assign((n + 1) * (n + 1) * (n + 1), Vec3{0.3, -0.2, 0.1});
    CellField jac;
    jac.cells_per_axis = n;

    SUBCASE("t = 1: X = -v regardless of the jacobian") {
        jac.values.assign(n * n * n, 2.5);
        NodeVectorField x = moser_velocity(v, jac, 1.0);
        for (const auto& val : x.values) {
            CHECK(val.x == doctest::Approx(-0.3));
            CHECK(val.y == doctest::Approx(0.2));
            CHECK(val.z == doctest::Approx(-0.1));
        }
    }
    SUBCASE("jac = 1: X = -v for every t") {
        jac.values.assign(n * n * n, 1.0);
        for (double t : {0.0, 0.3, 0.8}) {
            NodeVectorField x = moser_velocity(v, jac, t);
            for (const auto& val : x.values) CHECK(val.x == doctest::Approx(-0.3));
        }
    }
    SUBCASE("t = 0: X = -v / jacobian") {
        jac.values.assign(n * n * n, 2.0);
        NodeVectorField x = moser_velocity(v, jac, 0.0);
        for (const auto& val : x.values) CHECK(val.x == doctest::Approx(-0.15));
    }
}

TEST_CASE("volume flow: identity map is an exact fixed point") {
    VolumetricMap map = identity_map(4);
    VolumeFlowResult result = integrate_volume_flow(map, 10);
    CHECK(result.accepted);
    REQUIRE(result.map.images.size() == map.images.size());
    for (std::size_t i = 0; i < map.images.size(); ++i)
        CHECK(result.map.images[i] == map.images[i]);  // bit exact
}

TEST_CASE("volume flow: warped cube variance halves and conservation holds") {
    VolumetricMap map = warped_map(6, 1.5);
    double var0 = map_volume_variance(map);
    REQUIRE(var0 > 1e-3);

    CellField jac = jacobian_field(map);
    double total = 0.0;
    for (double v : jac.values) total += 1.0 - v;
    CHECK(std::abs(total) <= 1e-9 * jac.values.size());

    VolumeFlowResult result = integrate_volume_flow(map, 20);
    CHECK(result.accepted);
    CHECK(result.variance_after <= 0.5 * var0);

    // Boundary nodes stay on their faces exactly.
    const int nn = result.map.nodes_per_axis();
    for (int k = 0; k < nn; ++k)
        for (int j = 0; j < nn; ++j)
            for (int i = 0; i < nn; ++i) {
                const Vec3& p = result.map.images[result.map.cube->node_id(i, j, k)];
                if (i == 0) CHECK(p.x == 0.0);
                if (i == nn - 1) CHECK(p.x == 1.0);
                if (j == 0) CHECK(p.y == 0.0);
                if (j == nn - 1) CHECK(p.y == 1.0);
                if (k == 0) CHECK(p.z == 0.0);
                if (k == nn - 1) CHECK(p.z == 1.0);
            }
}

TEST_CASE("volume flow: repeated passes drive the jacobian toward one") {
    VolumetricMap map = warped_map(6, 1.5);
    double var = map_volume_variance(map);
    for (int pass = 0; pass < 4; ++pass) {
        VolumeFlowResult r = integrate_volume_flow(map, 20);
        if (!r.accepted) break;
        CHECK(r.variance_after <= var + 1e-15);
        var = r.variance_after;
        map = r.map;
    }
    CellField jac = jacobian_field(map);
    int in_band = 0;
    for (double v : jac.values)
        if (v >= 0.9 && v <= 1.1) ++in_band;
    CHECK(static_cast<double>(in_band) / jac.values.size() >= 0.9);
}
