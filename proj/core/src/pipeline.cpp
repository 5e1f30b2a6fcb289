#include "hexcube/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hexcube/area_flow.hpp"
#include "hexcube/chan_vese.hpp"
#include "hexcube/errors.hpp"
#include "hexcube/mesh_io.hpp"
#include "hexcube/report_io.hpp"
#include "hexcube/volume_flow.hpp"

namespace hexcube {

void PipelineConfig::validate() const {
    if (resolution < 2) throw ConfigError("resolution must be >= 2");
    if (spacing < 0) throw ConfigError("spacing must be positive or 0 (auto)");
    if (gac.eps <= 0 || gac.dt <= 0 || gac.max_steps < 1) throw ConfigError("bad gac settings");
    if (smoothing.iterations < 0) throw ConfigError("smoothing iterations must be >= 0");
    if (smoothing.layers != "interior" && smoothing.layers != "all")
        throw ConfigError("smoothing.layers must be 'interior' or 'all'");
    if (flows.area_steps < 1 || flows.volume_steps < 1 || flows.volume_restarts < 0)
        throw ConfigError("bad flow settings");
    if (flows.schedule != "step" && flows.schedule != "volume")
        throw ConfigError("flows.schedule must be 'step' or 'volume'");
}

void apply_config_line(PipelineConfig& c, const std::string& key, const std::string& value) {
    auto as_int = [&](const std::string& v) {
        try {
            return std::stoi(v);
        } catch (...) {
            throw ConfigError("expected an integer for " + key + ", got '" + v + "'");
        }
    };
    auto as_double = [&](const std::string& v) {
        try {
            return std::stod(v);
        } catch (...) {
            throw ConfigError("expected a number for " + key + ", got '" + v + "'");
        }
    };
    auto as_bool = [&](const std::string& v) {
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw ConfigError("expected a boolean for " + key + ", got '" + v + "'");
    };

    if (key == "input") c.input = value;
    else if (key == "resolution") c.resolution = as_int(value);
    else if (key == "spacing") c.spacing = (value == "auto") ? 0.0 : as_double(value);
    else if (key == "gac.eps") c.gac.eps = as_double(value);
    else if (key == "gac.dt") c.gac.dt = as_double(value);
    else if (key == "gac.max_steps") c.gac.max_steps = as_int(value);
    else if (key == "smoothing.iterations") c.smoothing.iterations = as_int(value);
    else if (key == "smoothing.layers") c.smoothing.layers = value;
    else if (key == "flows.area_steps") c.flows.area_steps = as_int(value);
    else if (key == "flows.volume_steps") c.flows.volume_steps = as_int(value);
    else if (key == "flows.volume_restarts") c.flows.volume_restarts = as_int(value);
    else if (key == "flows.area_on_cube_shells") c.flows.area_on_cube_shells = as_bool(value);
    else if (key == "flows.schedule") c.flows.schedule = value;
    else if (key == "outputs.hex_vtk") c.outputs.hex_vtk = value;
    else if (key == "outputs.map_json") c.outputs.map_json = value;
    else if (key == "outputs.metrics_json") c.outputs.metrics_json = value;
    else if (key == "outputs.debug_shells") c.outputs.debug_shells = as_bool(value);
    else throw ConfigError("unknown config key '" + key + "'");
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    PipelineConfig config;
    std::string line, section;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("bad config line: " + t);
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (!section.empty()) key = section + "." + key;
        apply_config_line(config, key, value);
    }
    return config;
}

namespace {

struct Similarity {
    double scale = 1.0;
    Vec3 offset{0, 0, 0};  // p' = p * scale + offset

    Vec3 forward(const Vec3& p) const { return p * scale + offset; }
    Vec3 inverse(const Vec3& p) const { return (p - offset) / scale; }
};

// Normalizes the model into [0.05, 0.95]^3 (largest axis spans 0.9; others
// centered).
Similarity normalizing_transform(const BBox& box) {
    Similarity s;
    s.scale = 0.9 / std::max(box.max_extent(), 1e-300);
    Vec3 ext = box.extent();
    for (int a = 0; a < 3; ++a)
        s.offset[a] = 0.05 + 0.5 * (0.9 - ext[a] * s.scale) - box.min[a] * s.scale;
    return s;
}

class StageClock {
public:
    explicit StageClock(std::map<std::string, double>& sink) : sink_(sink) {}
    template <typename F>
    auto time(const std::string& name, F&& f) {
        auto start = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            sink_[name] += std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                               .count();
        } else {
            auto result = f();
            sink_[name] += std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                               .count();
            return result;
        }
    }

private:
    std::map<std::string, double>& sink_;
};

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
    config.validate();
    auto total_start = std::chrono::steady_clock::now();
    PipelineResult result;
    StageClock clock(result.stage_seconds);
    const int N = config.resolution;

    TriMesh input = clock.time("load", [&] { return load_surface_mesh(config.input); });

    // Normalize into the unit cube, remember the inverse for the outputs.
    BBox box = bounding_box(input);
    Similarity sim = normalizing_transform(box);
    TriMesh model = input;
    for (auto& v : model.vertices) v = sim.forward(v);
    const double spacing = config.spacing > 0 ? config.spacing * sim.scale
                                              : 0.9 / 128.0;  // auto: max extent / 128
    result.voxel_spacing = spacing / sim.scale;

    BinaryVolume beta = clock.time("voxelize", [&] { return voxelize(model, spacing); });
    ScalarGrid sdf = clock.time("signed_distance", [&] { return signed_distance(beta); });
    EvolutionTrace trace = clock.time("chan_vese", [&] {
        return evolve_chan_vese(beta, config.gac.max_steps, config.gac.eps, config.gac.dt, &sdf);
    });
    std::vector<TriMesh> shells = clock.time("extract_shells", [&] {
        return extract_shells(trace, N,
                              config.flows.schedule == "volume"
                                  ? SnapshotSchedule::VolumeUniform
                                  : SnapshotSchedule::StepUniform);
    });

    auto cube = std::make_shared<CubeComplex>(build_cube_shells(N));

    // Sequential shell mapping; the puncture hints chain through the model
    // shells and across to the matching cube shells.  The cube shells are
    // mapped on a midpoint-refined copy of their quad triangulation (same
    // surface, finer solve) so the discrete conformal error matches the
    // voxel-resolved model shells; the lattice nodes keep their indices.
    const int refine_rounds = [&] {
        double cell = 1.0 / (2 * N - 1);
        int r = 0;
        while (r < 3 && cell / (1 << r) > 1.5 * spacing) ++r;
        return r;
    }();
    std::vector<SphereMap> model_maps, cube_maps;
    clock.time("shell_maps", [&] {
        std::optional<Vec3> model_hint;
        for (int k = 1; k <= N; ++k) {
            auto source = std::make_shared<TriMesh>(std::move(shells[k - 1]));
            SphereMap um = conformal_to_sphere(source, model_hint);
            Vec3 puncture_centroid = source->triangle_centroid(um.puncture);
            model_hint = puncture_centroid;

            SphereDensity density = compute_area_density(um);
            SphereScalar theta = solve_sphere_poisson(um, density);
            SphereMap qm = integrate_area_flow(um, theta, density, config.flows.area_steps);
            align_to_source_frame(qm);
            model_maps.push_back(std::move(qm));

            auto cube_source = std::make_shared<TriMesh>(
                subdivide_midpoint(cube->shells[k - 1].surface, refine_rounds));
            SphereMap Qm = conformal_to_sphere(cube_source, puncture_centroid);
            if (config.flows.area_on_cube_shells) {
                SphereDensity cd = compute_area_density(Qm);
                SphereScalar ct = solve_sphere_poisson(Qm, cd);
                Qm = integrate_area_flow(Qm, ct, cd, config.flows.area_steps);
            }
            align_to_source_frame(Qm);
            // Assembly only consumes the lattice-node positions (the original
            // vertices of the shell triangulation).
            SphereMap lattice_view;
            lattice_view.source = std::make_shared<TriMesh>(cube->shells[k - 1].surface);
            lattice_view.positions.assign(
                Qm.positions.begin(),
                Qm.positions.begin() + cube->shells[k - 1].surface.vertex_count());
            lattice_view.puncture = 0;
            cube_maps.push_back(std::move(lattice_view));
        }
    });

    auto [map0, mesh0] = clock.time("assemble", [&] {
        return assemble_initial_map(cube, model_maps, cube_maps);
    });

    const bool interior_only = config.smoothing.layers == "interior";
    HexMesh smoothed = clock.time("smooth", [&] {
        return laplacian_smooth(mesh0, config.smoothing.iterations, interior_only);
    });

    result.pre_flow = clock.time("quality_pre", [&] { return compute_quality(smoothed); });

    // A heavily twisted assembly can hold cells with non-positive volume, from
    // which the flow refuses to start; extra smoothing rounds open them up.
    VolumetricMap final_map = clock.time("volume_flow", [&] {
        for (int attempt = 0;; ++attempt) {
            VolumetricMap current;
            current.cube = cube;
            current.images = smoothed.nodes;
            try {
                for (int pass = 0; pass < config.flows.volume_restarts; ++pass) {
                    VolumeFlowResult flow =
                        integrate_volume_flow(current, config.flows.volume_steps);
                    if (!flow.accepted) break;
                    double improvement = flow.variance_before - flow.variance_after;
                    current = std::move(flow.map);
                    if (flow.variance_after < 1e-8 || improvement < 0.02 * flow.variance_before)
                        break;
                }
                return current;
            } catch (const InvertedCell&) {
                if (attempt >= 3) throw;
                smoothed = laplacian_smooth(smoothed, 15, interior_only);
                result.pre_flow = compute_quality(smoothed);
            }
        }
    });

    // Back to the original model coordinates.
    VolumetricMap output_map;
    output_map.cube = cube;
    output_map.images.reserve(final_map.images.size());
    for (const auto& p : final_map.images) output_map.images.push_back(sim.inverse(p));
    HexMesh final_mesh = hex_mesh_from_map(output_map);

    result.post_flow = clock.time("quality_post", [&] { return compute_quality(final_mesh); });
    result.mesh = std::move(final_mesh);
    result.map = std::move(output_map);

    clock.time("write_outputs", [&] {
        if (!config.outputs.hex_vtk.empty()) write_hex_vtk(result.mesh, config.outputs.hex_vtk);
        if (!config.outputs.map_json.empty()) {
            nlohmann::ordered_json arr = nlohmann::ordered_json::array();
            for (std::size_t i = 0; i < result.map.images.size(); ++i) {
                const Vec3& p = result.map.images[i];
                arr.push_back({{"cube_node_index", i}, {"image_xyz", {p.x, p.y, p.z}}});
            }
            std::ofstream f(config.outputs.map_json);
            if (!f) throw IoError("cannot write " + config.outputs.map_json.string());
            f << arr.dump(2) << "\n";
        }
        if (config.outputs.debug_shells) {
            std::filesystem::path base = config.outputs.hex_vtk.empty()
                                             ? config.input
                                             : config.outputs.hex_vtk;
            std::vector<int> steps = shell_snapshot_steps(
                trace, N,
                config.flows.schedule == "volume" ? SnapshotSchedule::VolumeUniform
                                                  : SnapshotSchedule::StepUniform);
            std::vector<ScalarGrid> snapshots = trace.snapshots_at(steps);
            for (int k = 1; k <= N; ++k) {
                std::filesystem::path p = base;
                p.replace_extension("shell" + std::to_string(k) + ".off");
                TriMesh shell = *model_maps[k - 1].source;
                for (auto& v : shell.vertices) v = sim.inverse(v);
                write_surface_off(shell, p);
                p.replace_extension("vtk");
                write_scalar_grid_vtk(snapshots[k - 1], p);
            }
        }
    });

    result.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - total_start).count();
    result.post_flow.wall_time_sec = result.total_seconds;
    result.pre_flow.wall_time_sec = result.total_seconds;

    if (!config.outputs.metrics_json.empty())
        write_metrics_report(result.post_flow, config.outputs.metrics_json, &result.pre_flow);
    return result;
}

}  // namespace hexcube
