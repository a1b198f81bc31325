#pragma once

#include <string>
#include <vector>

#include "penduflow/slowflow.hpp"

namespace penduflow {

struct ChartSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct ChartLabels {
    std::string title;
    std::string x_label;
    std::string y_label;
};

/// Self-contained SVG line chart. Series longer than `max_points` are
/// decimated by stride for file size; the CSV stays the primary record.
std::string line_chart(const ChartLabels& labels, const std::vector<ChartSeries>& series,
                       std::size_t max_points = 4000);

/// Direction field on the (Δ, P) plane with stationary points marked.
std::string quiver_chart(const ChartLabels& labels, const std::vector<StreamSample>& field,
                         const std::vector<StationaryPoint>& points);

}  // namespace penduflow
