#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "hexcube/map_assembly.hpp"
#include "hexcube/quality.hpp"
#include "hexcube/shell_extraction.hpp"

namespace hexcube {

// Full pipeline configuration.  Every field maps to a "section.key" config
// line and a --section.key command-line flag; flags win over the file.
struct PipelineConfig {
    std::filesystem::path input;
    int resolution = 6;          // N >= 2
    double spacing = 0.0;        // 0 = auto (bbox max extent / 128)

    struct {
        double eps = 1.5;        // Heaviside half-width, voxels
        double dt = 0.5;
        int max_steps = 5000;
    } gac;

    struct {
        int iterations = 10;
        std::string layers = "interior";  // interior | all
    } smoothing;

    struct {
        int area_steps = 20;
        int volume_steps = 20;
        // Each extra pass tightens the volume variance but resamples the map
        // (slight shear); two passes balance both.
        int volume_restarts = 2;
        bool area_on_cube_shells = true;
        std::string schedule = "step";    // step | volume
    } flows;

    struct {
        std::filesystem::path hex_vtk;
        std::filesystem::path map_json;
        std::filesystem::path metrics_json;
        bool debug_shells = false;
    } outputs;

    void validate() const;  // throws ConfigError
};

struct PipelineResult {
    HexMesh mesh;                 // final mesh, original model coordinates
    VolumetricMap map;            // final map, original model coordinates
    QualityReport pre_flow;
    QualityReport post_flow;
    std::map<std::string, double> stage_seconds;
    double total_seconds = 0.0;
    double voxel_spacing = 0.0;   // spacing actually used (model units)
};

// Parses "key = value" lines with optional [section] headers; '#' comments.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
void apply_config_line(PipelineConfig& config, const std::string& key, const std::string& value);

// Voxelize, segment, extract shells, map every shell conformally with area
// correction, assemble, smooth, run the volume flow, measure, write outputs.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace hexcube
