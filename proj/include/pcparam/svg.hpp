#pragma once

#include "pcparam/geometry.hpp"
#include "pcparam/optimizer.hpp"

#include <string>
#include <vector>

namespace pcparam {

// Fixed 640x480 viewport, fixed number formatting, no timestamps: the same
// input always yields the same bytes.

/// Points as dots; each loop (indices into `points`) drawn as a closed red polyline.
std::string svg_scatter(const Points& points, const std::vector<std::vector<int>>& loops = {},
                        const std::string& title = "");

/// One line per metric (hausdorff, mean_abs_angle, landmark_hausdorff)
/// against the stage index; metrics that are all NaN are skipped.
std::string svg_stage_lines(const TrainLog& log, const std::string& title = "");

/// Bar chart; the bin count is recorded as `data-bins` on the root element.
std::string svg_histogram(const Histogram& hist, const std::string& title = "");

}  // namespace pcparam
