#include <benchmark/benchmark.h>

#include <memory>

#include "hexcube/area_flow.hpp"
#include "hexcube/chan_vese.hpp"
#include "hexcube/cube_complex.hpp"
#include "hexcube/isosurface.hpp"
#include "hexcube/quality.hpp"
#include "hexcube/shapes.hpp"
#include "hexcube/sphere_map.hpp"
#include "hexcube/volume_flow.hpp"
#include "hexcube/voxel_grid.hpp"

using namespace hexcube;

static void BM_Voxelize(benchmark::State& state) {
    TriMesh mesh = shapes::icosphere(3);
    double spacing = 2.0 / state.range(0);
    for (auto _ : state) {
        BinaryVolume vol = voxelize(mesh, spacing);
        benchmark::DoNotOptimize(vol.occupancy.data());
    }
}
BENCHMARK(BM_Voxelize)->Arg(32)->Arg(64)->Arg(128);

static void BM_SignedDistance(benchmark::State& state) {
    BinaryVolume vol = voxelize(shapes::icosphere(3), 2.0 / state.range(0));
    for (auto _ : state) {
        ScalarGrid phi = signed_distance(vol);
        benchmark::DoNotOptimize(phi.values.data());
    }
}
BENCHMARK(BM_SignedDistance)->Arg(32)->Arg(64);

static void BM_Isosurface(benchmark::State& state) {
    BinaryVolume vol = voxelize(shapes::icosphere(3), 2.0 / state.range(0));
    ScalarGrid phi = signed_distance(vol);
    for (auto _ : state) {
        TriMesh mesh = extract_isosurface(phi, 0.0);
        benchmark::DoNotOptimize(mesh.vertices.data());
    }
}
BENCHMARK(BM_Isosurface)->Arg(32)->Arg(64);

static void BM_CotangentSystem(benchmark::State& state) {
    auto ico = std::make_shared<TriMesh>(shapes::icosphere(state.range(0)));
    int puncture = select_puncture_triangle(*ico);
    for (auto _ : state) {
        CotangentSystem sys = build_cotangent_system(*ico, puncture);
        benchmark::DoNotOptimize(sys.val.data());
    }
}
BENCHMARK(BM_CotangentSystem)->Arg(3)->Arg(4)->Arg(5);

static void BM_ConformalSolve(benchmark::State& state) {
    auto ico = std::make_shared<TriMesh>(shapes::icosphere(state.range(0)));
    int puncture = select_puncture_triangle(*ico);
    CotangentSystem sys = build_cotangent_system(*ico, puncture);
    for (auto _ : state) {
        PlanarCoords planar = solve_planar_coordinates(sys);
        benchmark::DoNotOptimize(planar.x.data());
    }
}
BENCHMARK(BM_ConformalSolve)->Arg(3)->Arg(4)->Arg(5);

static void BM_AreaDensity(benchmark::State& state) {
    auto src = std::make_shared<TriMesh>(shapes::ellipsoid(4, 1.0, 0.5, 0.5));
    SphereMap map = conformal_to_sphere(src);
    for (auto _ : state) {
        SphereDensity d = compute_area_density(map);
        benchmark::DoNotOptimize(d.triangle_mu.data());
    }
}
BENCHMARK(BM_AreaDensity);

static void BM_HexQuality(benchmark::State& state) {
    CubeComplex cc = build_cube_shells(state.range(0));
    HexMesh mesh;
    mesh.nodes = cc.nodes;
    mesh.cells = cc.hexes;
    mesh.lattice_nodes_per_axis = cc.nodes_per_axis();
    for (auto _ : state) {
        QualityReport report = compute_quality(mesh);
        benchmark::DoNotOptimize(report.min_scaled_jacobian.data());
    }
}
BENCHMARK(BM_HexQuality)->Arg(6)->Arg(10);

static void BM_VolumeFlowPass(benchmark::State& state) {
    VolumetricMap map;
    map.cube = std::make_shared<CubeComplex>(build_cube_shells(state.range(0)));
    map.images = map.cube->nodes;
    for (auto& p : map.images) {
        double fx = p.x + 2.0 * p.x * (1 - p.x) * (0.5 - p.x) * std::sin(2.1 * p.y);
        double fy = p.y + 2.0 * p.y * (1 - p.y) * (0.4 - p.y) * std::cos(1.7 * p.z);
        p = {fx, fy, p.z};
    }
    for (auto _ : state) {
        VolumeFlowResult r = integrate_volume_flow(map, 20);
        benchmark::DoNotOptimize(r.map.images.data());
    }
}
BENCHMARK(BM_VolumeFlowPass)->Arg(6)->Arg(8);

BENCHMARK_MAIN();
