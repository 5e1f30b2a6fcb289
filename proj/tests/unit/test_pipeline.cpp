#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "hexcube/errors.hpp"
#include "hexcube/mesh_io.hpp"
#include "hexcube/pipeline.hpp"
#include "hexcube/report_io.hpp"
#include "hexcube/shapes.hpp"
#include "test_support.hpp"

using namespace hexcube;

TEST_CASE("config: file parsing, sections, and overrides") {
    testsupport::TempDir dir("config");
    testsupport::write_text(dir.file("run.cfg"),
                            "# pipeline settings\n"
                            "input = model.off\n"
                            "resolution = 4\n"
                            "spacing = auto\n"
                            "[gac]\n"
                            "eps = 2.0\n"
                            "max_steps = 1234\n"
                            "[flows]\n"
                            "area_steps = 15\n"
                            "schedule = volume\n"
                            "[outputs]\n"
                            "hex_vtk = out.vtk\n");
    PipelineConfig c = load_pipeline_config(dir.file("run.cfg"));
    CHECK(c.input == "model.off");
    CHECK(c.resolution == 4);
    CHECK(c.spacing == 0.0);
    CHECK(c.gac.eps == 2.0);
    CHECK(c.gac.max_steps == 1234);
    CHECK(c.flows.area_steps == 15);
    CHECK(c.flows.schedule == "volume");
    CHECK(c.outputs.hex_vtk == "out.vtk");

    // Flag-style overrides win.
    apply_config_line(c, "gac.eps", "1.5");
    CHECK(c.gac.eps == 1.5);
    CHECK_THROWS_AS(apply_config_line(c, "no.such.key", "1"), ConfigError);
    CHECK_THROWS_AS(apply_config_line(c, "resolution", "banana"), ConfigError);

    c.resolution = 1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("metrics report: fields, empty histograms, identity variance") {
    testsupport::TempDir dir("report");
    QualityReport report;
    report.nodes = 2744;
    report.hexahedra = 2197;
    report.volume_variance = 0.1;
    report.concave_fraction = 0.054;

    SUBCASE("values appear verbatim") {
        write_metrics_report(report, dir.file("r.json"));
        std::string text = testsupport::read_text(dir.file("r.json"));
        CHECK(text.find("\"nodes\": 2744") != std::string::npos);
        CHECK(text.find("\"hexahedra\": 2197") != std::string::npos);
        CHECK(text.find("\"volume_variance\": 0.1") != std::string::npos);
        CHECK(text.find("\"concave_fraction\": 0.054") != std::string::npos);
        CHECK(text.find("\"wall_time_sec\"") != std::string::npos);
    }
    SUBCASE("no elements: valid JSON with empty histogram arrays") {
        QualityReport empty;
        std::string text = metrics_report_json(empty);
        CHECK(text.find("\"min_jacobian_histogram\": []") != std::string::npos);
        CHECK(text.find("\"aspect_ratio_histogram\": []") != std::string::npos);
        CHECK(text.find("\"taper_histogram\": []") != std::string::npos);
    }
}

TEST_CASE("pipeline: voxelized cube at N=4 is identity-like" * doctest::timeout(300)) {
    testsupport::TempDir dir("pipecube");
    TriMesh cube = shapes::box({0, 0, 0}, {1, 1, 1});
    write_surface_off(cube, dir.file("cube.off"));

    PipelineConfig config;
    config.input = dir.file("cube.off");
    config.resolution = 4;
    config.spacing = 1.0 / 20.0;
    config.outputs.hex_vtk = dir.file("cube.vtk");
    config.outputs.metrics_json = dir.file("cube.json");
    config.outputs.map_json = dir.file("cube_map.json");

    PipelineResult result = run_pipeline(config);
    CHECK(result.post_flow.nodes == 512);
    CHECK(result.post_flow.hexahedra == 343);
    CHECK(result.post_flow.volume_variance <= 1e-3);
    CHECK(result.post_flow.volume_variance <= result.pre_flow.volume_variance);
    CHECK(result.post_flow.concave_fraction == 0.0);
    // Identity sanity: node images near the regular grid inside the cube.
    const int n = 8;
    double worst = 0.0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                Vec3 expected{i / 7.0, j / 7.0, k / 7.0};
                worst = std::max(worst,
                                 norm(result.mesh.nodes[(k * n + j) * n + i] - expected));
            }
    CHECK(worst <= result.voxel_spacing);

    CHECK(std::filesystem::exists(config.outputs.hex_vtk));
    CHECK(std::filesystem::exists(config.outputs.metrics_json));
    CHECK(std::filesystem::exists(config.outputs.map_json));

    HexMesh loaded = load_hex_vtk(config.outputs.hex_vtk);
    CHECK(loaded.node_count() == 512);
    CHECK(loaded.cell_count() == 343);

    // Stage timings account for the total (within 5% plus scheduling noise).
    double sum = 0.0;
    for (const auto& [name, sec] : result.stage_seconds) sum += sec;
    CHECK(sum <= result.total_seconds * 1.05 + 0.05);
}

TEST_CASE("pipeline: determinism of mesh outputs" * doctest::timeout(600)) {
    testsupport::TempDir dir("pipedet");
    TriMesh ball = shapes::icosphere(2);
    write_surface_off(ball, dir.file("ball.off"));

    PipelineConfig config;
    config.input = dir.file("ball.off");
    config.resolution = 2;
    config.spacing = 2.0 / 16.0;
    config.outputs.hex_vtk = dir.file("a.vtk");
    run_pipeline(config);
    config.outputs.hex_vtk = dir.file("b.vtk");
    run_pipeline(config);
    CHECK(testsupport::read_text(dir.file("a.vtk")) == testsupport::read_text(dir.file("b.vtk")));
}

TEST_CASE("cli binary: exit codes for success and topology failures" * doctest::timeout(600)) {
    testsupport::TempDir dir("cli");
    write_surface_off(shapes::torus(), dir.file("torus.off"));
    std::string cmd = std::string(HEXCUBE_CLI_PATH) + " map " + dir.file("torus.off").string() +
                      " --resolution 3 > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 2);

    write_surface_off(shapes::box({0, 0, 0}, {1, 1, 1}), dir.file("cube.off"));
    std::string ok_cmd = std::string(HEXCUBE_CLI_PATH) + " map " + dir.file("cube.off").string() +
                         " --resolution 2 --spacing 0.08 --out-mesh " +
                         dir.file("out.vtk").string() + " > /dev/null 2>&1";
    status = std::system(ok_cmd.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(std::filesystem::exists(dir.file("out.vtk")));
}
