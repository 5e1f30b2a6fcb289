#include "hexcube/report_io.hpp"

#include <fstream>

#include <json.hpp>

#include "hexcube/errors.hpp"

namespace hexcube {

namespace {

nlohmann::ordered_json report_fields(const QualityReport& r) {
    nlohmann::ordered_json j;
    j["nodes"] = r.nodes;
    j["hexahedra"] = r.hexahedra;
    j["volume_variance"] = r.volume_variance;
    j["concave_fraction"] = r.concave_fraction;
    auto histogram = [&](const std::array<long long, 32>& h) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        if (r.hexahedra > 0)
            for (long long b : h) arr.push_back(b);
        return arr;  // no elements: empty array
    };
    j["min_jacobian_histogram"] = histogram(r.min_jacobian_histogram);
    j["aspect_ratio_histogram"] = histogram(r.aspect_ratio_histogram);
    j["taper_histogram"] = histogram(r.taper_histogram);
    j["wall_time_sec"] = r.wall_time_sec;
    return j;
}

}  // namespace

std::string metrics_report_json(const QualityReport& report, const QualityReport* pre_flow) {
    nlohmann::ordered_json j = report_fields(report);
    if (pre_flow) j["pre_flow"] = report_fields(*pre_flow);
    return j.dump(2) + "\n";
}

void write_metrics_report(const QualityReport& report, const std::filesystem::path& path,
                          const QualityReport* pre_flow) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path.string());
    f << metrics_report_json(report, pre_flow);
    if (!f) throw IoError("write failed for " + path.string());
}

}  // namespace hexcube
