#pragma once

#include <array>
#include <vector>

#include "hexcube/hex_mesh.hpp"

namespace hexcube {

// Per-element quality measures and mesh-level statistics.  Histograms use 32
// fixed bins: min scaled Jacobian over [-1, 1], aspect ratio over [1, 9],
// taper over [0, 1.6]; out-of-range values land in the end bins.
struct QualityReport {
    long long nodes = 0;
    long long hexahedra = 0;
    double volume_variance = 0.0;  // volumes normalized to mean 1
    double concave_fraction = 0.0;
    std::vector<double> min_scaled_jacobian;  // one per element
    std::vector<double> aspect_ratio;
    std::vector<double> taper;
    std::array<long long, 32> min_jacobian_histogram{};
    std::array<long long, 32> aspect_ratio_histogram{};
    std::array<long long, 32> taper_histogram{};
    double wall_time_sec = 0.0;
};

struct ElementQuality {
    double min_scaled_jacobian = 0.0;  // min over 8 corners of det(normalized edges)
    double aspect_ratio = 0.0;         // max/min principal axis length
    double taper = 0.0;                // max cross-derivative vs principal axes
};

ElementQuality element_quality(const std::array<Vec3, 8>& corners);

QualityReport compute_quality(const HexMesh& mesh);

// Population variance of cell volumes after normalizing their mean to 1.
// Throws ZeroMeanVolume.
double volume_variance(const HexMesh& mesh);

}  // namespace hexcube
