#pragma once

#include <filesystem>
#include <optional>

#include "hexcube/quality.hpp"

namespace hexcube {

// JSON metrics document with keys nodes, hexahedra, volume_variance,
// concave_fraction, min_jacobian_histogram, aspect_ratio_histogram,
// taper_histogram, wall_time_sec.  When a pre-flow report is supplied it is
// nested under "pre_flow" with the same keys.
void write_metrics_report(const QualityReport& report, const std::filesystem::path& path,
                          const QualityReport* pre_flow = nullptr);

std::string metrics_report_json(const QualityReport& report,
                                const QualityReport* pre_flow = nullptr);

}  // namespace hexcube
