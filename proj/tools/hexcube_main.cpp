#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hexcube/errors.hpp"
#include "hexcube/pipeline.hpp"

namespace {

int run_map(const std::vector<std::string>& overrides, const std::string& input,
            const std::string& config_path) {
    hexcube::PipelineConfig config;
    if (!config_path.empty()) config = hexcube::load_pipeline_config(config_path);
    if (!input.empty()) config.input = input;
    // Flags win over the config file.
    for (const auto& kv : overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw hexcube::ConfigError("override '" + kv + "' is not key=value");
        hexcube::apply_config_line(config, kv.substr(0, eq), kv.substr(eq + 1));
    }

    hexcube::PipelineResult result = hexcube::run_pipeline(config);

    std::printf("nodes            %lld\n", result.post_flow.nodes);
    std::printf("hexahedra        %lld\n", result.post_flow.hexahedra);
    std::printf("volume variance  %.6f (pre-flow %.6f)\n", result.post_flow.volume_variance,
                result.pre_flow.volume_variance);
    std::printf("concave fraction %.4f (pre-flow %.4f)\n", result.post_flow.concave_fraction,
                result.pre_flow.concave_fraction);
    std::printf("voxel spacing    %.6g\n", result.voxel_spacing);
    for (const auto& [stage, sec] : result.stage_seconds)
        std::printf("  %-16s %8.2fs\n", stage.c_str(), sec);
    std::printf("total            %8.2fs\n", result.total_seconds);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hexcube: volume-preserving map of a genus-zero solid onto a hex-meshed cube"};
    app.require_subcommand(1);

    auto* map_cmd = app.add_subcommand("map", "run the full mapping pipeline");
    std::string input, config_path;
    std::vector<std::string> overrides;
    map_cmd->add_option("input", input, "surface mesh (.off/.obj/.stl ascii)");
    map_cmd->add_option("--config", config_path, "plain-text config file");
    int resolution = -1;
    double spacing = -1.0;
    int smooth_iters = -1;
    std::string out_mesh, out_metrics, out_map;
    bool debug_shells = false;
    map_cmd->add_option("--resolution,-N", resolution, "shell count N (lattice is (2N)^3 nodes)");
    map_cmd->add_option("--spacing", spacing, "voxel spacing in model units (default: auto)");
    map_cmd->add_option("--smooth-iters", smooth_iters, "Laplacian smoothing iterations");
    map_cmd->add_option("--out-mesh", out_mesh, "hexahedral mesh output (legacy VTK)");
    map_cmd->add_option("--out-metrics", out_metrics, "quality report output (JSON)");
    map_cmd->add_option("--out-map", out_map, "node correspondence output (JSON)");
    map_cmd->add_flag("--debug-shells", debug_shells, "dump intermediate shells as OFF files");
    map_cmd->add_option("--set", overrides,
                        "raw key=value override (any config key, e.g. --set gac.dt=0.25)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (resolution >= 0) overrides.push_back("resolution=" + std::to_string(resolution));
        if (spacing >= 0) overrides.push_back("spacing=" + std::to_string(spacing));
        if (smooth_iters >= 0)
            overrides.push_back("smoothing.iterations=" + std::to_string(smooth_iters));
        if (!out_mesh.empty()) overrides.push_back("outputs.hex_vtk=" + out_mesh);
        if (!out_metrics.empty()) overrides.push_back("outputs.metrics_json=" + out_metrics);
        if (!out_map.empty()) overrides.push_back("outputs.map_json=" + out_map);
        if (debug_shells) overrides.push_back("outputs.debug_shells=true");
        return run_map(overrides, input, config_path);
    } catch (const hexcube::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(e.error_class());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
