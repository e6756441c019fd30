#pragma once

#include <string>
#include <vector>

namespace tse {

enum class GridKind { Uniform, SinhStretched };

struct SpatialGrid {
    GridKind kind = GridKind::Uniform;
    std::vector<double> nodes;  // strictly increasing, >= 9 nodes

    double x_min() const { return nodes.front(); }
    double x_max() const { return nodes.back(); }
    int n_intervals() const { return static_cast<int>(nodes.size()) - 1; }
};

SpatialGrid uniform_grid(double x_min, double x_max, int n_intervals);

// Tavella-Randall style concentration around `center`; larger `strength`
// packs more nodes near the center.  Endpoints land exactly on x_min/x_max.
SpatialGrid sinh_grid(double x_min, double x_max, int n_intervals, double center,
                      double strength);

}  // namespace tse
