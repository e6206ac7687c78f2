#pragma once

#include <string>
#include <vector>

#include "hedge/errors.hpp"

namespace hedge {
namespace svg {

struct Series {
    std::string label;
    std::vector<double> y;
};

// Polyline chart of equally-spaced series sharing one x axis; a subsample
// of x_labels lands on the axis. Pure text generation, deterministic.
std::string line_chart(const std::string& title, const std::vector<std::string>& x_labels,
                       const std::vector<Series>& series, int width = 960,
                       int height = 420);

// One column per group, segments stacked bottom-up in series order; made
// for weight histories where each column stacks to 1.
std::string stacked_bars(const std::string& title, const std::vector<std::string>& groups,
                         const std::vector<Series>& segments, int width = 960,
                         int height = 420);

}  // namespace svg
}  // namespace hedge
