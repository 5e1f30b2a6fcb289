#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "hexcube/cube_complex.hpp"
#include "hexcube/errors.hpp"
#include "hexcube/map_assembly.hpp"
#include "hexcube/shapes.hpp"
#include "hexcube/sphere_locate.hpp"
#include "hexcube/sphere_map.hpp"

using namespace hexcube;

namespace {

std::shared_ptr<TriMesh> shared_mesh(TriMesh m) { return std::make_shared<TriMesh>(std::move(m)); }

Vec3 random_unit(std::mt19937& rng) {
    std::normal_distribution<double> n(0, 1);
    return normalized({n(rng), n(rng), n(rng)});
}

}  // namespace

TEST_CASE("interpolate_inverse: mapped vertices reproduce their sources exactly") {
    auto ico = shared_mesh(shapes::icosphere(2));
    SphereMap map = conformal_to_sphere(ico);
    std::vector<Vec3> queries(map.positions.begin(), map.positions.begin() + 40);
    auto result = interpolate_inverse(map, queries);
    for (int v = 0; v < 40; ++v) CHECK(result[v] == ico->vertices[v]);  // bit exact
}

TEST_CASE("interpolate_inverse: centroid queries return interior points (walk == brute)") {
    auto ico = shared_mesh(shapes::icosphere(2));
    SphereMap map = conformal_to_sphere(ico);
    SphereLocator locator(map);

    for (int t = 0; t < ico->triangle_count(); t += 7) {
        const auto& tri = ico->triangles[t];
        Vec3 q = normalized(map.positions[tri[0]] + map.positions[tri[1]] +
                            map.positions[tri[2]]);
        auto hit = locator.locate(q, 0);
        auto brute = locator.locate_brute(q);
        CHECK(hit.triangle == brute.triangle);
        for (int b = 0; b < 3; ++b) CHECK(hit.bary[b] >= 0.0);
        CHECK(hit.bary[0] + hit.bary[1] + hit.bary[2] == doctest::Approx(1.0));
    }
}

TEST_CASE("sphere locator: walk agrees with brute force on random directions") {
    auto ico = shared_mesh(shapes::icosphere(3));
    SphereMap map = conformal_to_sphere(ico);
    SphereLocator locator(map);
    std::mt19937 rng(11);
    int hint = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        Vec3 q = random_unit(rng);
        auto walk = locator.locate(q, hint);
        auto brute = locator.locate_brute(q);
        hint = walk.triangle;
        // Same triangle, or an equivalent boundary case: compare interpolants.
        Vec3 a = locator.interpolate_source(walk, q);
        Vec3 b = locator.interpolate_source(brute, q);
        CHECK(norm(a - b) <= 1e-9);
    }
}

TEST_CASE("interpolate_inverse: puncture antipode lands in the symmetric region") {
    auto oct = shared_mesh(shapes::octahedron());
    SphereMap map = conformal_to_sphere(oct);  // puncture touches the +z apex
    // The antipode of the puncture center is deep in the southern cap, which
    // corresponds to the -z apex region of the octahedron.
    Vec3 puncture_center{0, 0, 0};
    for (int v : oct->triangles[map.puncture]) puncture_center += map.positions[v];
    Vec3 q = normalized(puncture_center * (-1.0 / 3.0));
    auto result = interpolate_inverse(map, std::vector<Vec3>{q});
    // Southern cap of the octahedron: no farther than a bottom-face centroid.
    CHECK(result[0].z < -0.2);
    CHECK(norm(result[0] - Vec3{0, 0, -1}) <= norm(Vec3{1.0 / 3, -1.0 / 3, 2.0 / 3}) + 0.05);
}

TEST_CASE("assemble_initial_map: cube model reproduces a near-identity map") {
    // Model shells and cube shells from the same complex: the composition
    // model_map^{-1} o cube_map should stay close to the identity.
    const int N = 3;
    auto cube = std::make_shared<CubeComplex>(build_cube_shells(N));

    std::vector<SphereMap> model_maps, cube_maps;
    std::optional<Vec3> hint;
    for (int k = 1; k <= N; ++k) {
        auto src = shared_mesh(cube->shells[k - 1].surface);
        SphereMap m = conformal_to_sphere(src, hint);
        hint = src->triangle_centroid(m.puncture);
        align_azimuth(m);
        model_maps.push_back(m);
        cube_maps.push_back(m);  // identical maps for both families
    }
    auto [map, mesh] = assemble_initial_map(cube, model_maps, cube_maps);

    CHECK(static_cast<int>(map.images.size()) == (2 * N) * (2 * N) * (2 * N));
    CHECK(mesh.cell_count() == (2 * N - 1) * (2 * N - 1) * (2 * N - 1));
    for (std::size_t i = 0; i < map.images.size(); ++i)
        CHECK(norm(map.images[i] - cube->nodes[i]) <= 1e-9);

    // Shell attribute mirrors the lattice ring structure.
    CHECK(mesh.cell_shell.front() == 1);
    CHECK(mesh.cell_shell[mesh.cell_count() / 2] == N);
}

TEST_CASE("assemble_initial_map: shell count mismatch is rejected") {
    auto cube = std::make_shared<CubeComplex>(build_cube_shells(2));
    std::vector<SphereMap> maps;
    CHECK_THROWS_AS(assemble_initial_map(cube, maps, maps), ShellCountMismatch);
}

TEST_CASE("trilinear core fallback: corners and center") {
    std::array<Vec3, 8> corners;
    for (int c = 0; c < 8; ++c)
        corners[c] = {double(c & 1), double((c >> 1) & 1), double((c >> 2) & 1)};
    for (int c = 0; c < 8; ++c) {
        Vec3 uvw{double(c & 1), double((c >> 1) & 1), double((c >> 2) & 1)};
        CHECK(norm(trilinear_core_fallback(corners, uvw) - uvw) <= 1e-15);
    }
    Vec3 mid = trilinear_core_fallback(corners, {0.5, 0.5, 0.5});
    CHECK(norm(mid - Vec3{0.5, 0.5, 0.5}) <= 1e-15);
}

TEST_CASE("laplacian_smooth: identity cases and concavity reduction") {
    const int N = 3;
    auto cube = std::make_shared<CubeComplex>(build_cube_shells(N));
    VolumetricMap map;
    map.cube = cube;
    map.images = cube->nodes;
    HexMesh mesh = hex_mesh_from_map(map);

    SUBCASE("0 iterations is the identity") {
        HexMesh out = laplacian_smooth(mesh, 0);
        for (int i = 0; i < mesh.node_count(); ++i) CHECK(out.nodes[i] == mesh.nodes[i]);
    }
    SUBCASE("a regular lattice is a fixed point") {
        HexMesh out = laplacian_smooth(mesh, 25);
        for (int i = 0; i < mesh.node_count(); ++i)
            CHECK(norm(out.nodes[i] - mesh.nodes[i]) <= 1e-12);
    }
    SUBCASE("interior jitter is relaxed toward the lattice") {
        HexMesh jittered = mesh;
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u(-0.3, 0.3);
        const int n = cube->nodes_per_axis();
        const double h = 1.0 / (n - 1);
        for (int k = 1; k + 1 < n; ++k)
            for (int j = 1; j + 1 < n; ++j)
                for (int i = 1; i + 1 < n; ++i)
                    jittered.nodes[cube->node_id(i, j, k)] += Vec3{u(rng), u(rng), u(rng)} * h;
        double before = 0.0, after = 0.0;
        HexMesh smoothed = laplacian_smooth(jittered, 30);
        for (int i = 0; i < mesh.node_count(); ++i) {
            before += norm2(jittered.nodes[i] - mesh.nodes[i]);
            after += norm2(smoothed.nodes[i] - mesh.nodes[i]);
        }
        CHECK(after <= 0.05 * before);
    }
}

TEST_CASE("laplacian_smooth: boundary follows fix_boundary") {
    auto cube = std::make_shared<CubeComplex>(build_cube_shells(2));
    VolumetricMap map;
    map.cube = cube;
    map.images = cube->nodes;
    HexMesh mesh = hex_mesh_from_map(map);
    // Pull one boundary node outward.
    mesh.nodes[0] += Vec3{-0.2, -0.2, -0.2};
    HexMesh fixed = laplacian_smooth(mesh, 5, true);
    CHECK(fixed.nodes[0] == mesh.nodes[0]);
    HexMesh relaxed = laplacian_smooth(mesh, 5, false);
    CHECK(norm(relaxed.nodes[0] - mesh.nodes[0]) > 1e-6);
}
