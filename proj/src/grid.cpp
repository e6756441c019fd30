#include "tse/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace tse {

namespace {

void check_bounds(double x_min, double x_max, int n_intervals) {
    if (!(x_min < x_max))
        throw std::invalid_argument("grid: x_min must be < x_max");
    if (n_intervals < 8)
        throw std::invalid_argument("grid: need at least 8 intervals");
}

}  // namespace

SpatialGrid uniform_grid(double x_min, double x_max, int n_intervals) {
    check_bounds(x_min, x_max, n_intervals);
    SpatialGrid g;
    g.kind = GridKind::Uniform;
    g.nodes.resize(n_intervals + 1);
    const double h = (x_max - x_min) / n_intervals;
    for (int i = 0; i <= n_intervals; ++i) g.nodes[i] = x_min + i * h;
    g.nodes.front() = x_min;
    g.nodes.back() = x_max;
    return g;
}

SpatialGrid sinh_grid(double x_min, double x_max, int n_intervals, double center,
                      double strength) {
    check_bounds(x_min, x_max, n_intervals);
    if (!(strength > 0.0))
        throw std::invalid_argument("grid: sinh strength must be > 0");
    if (!(center >= x_min && center <= x_max))
        throw std::invalid_argument("grid: sinh center must lie inside [x_min, x_max]");
    const double c = strength / (x_max - x_min);
    const double lo = std::asinh(c * (x_min - center));
    const double hi = std::asinh(c * (x_max - center));
    SpatialGrid g;
    g.kind = GridKind::SinhStretched;
    g.nodes.resize(n_intervals + 1);
    for (int i = 0; i <= n_intervals; ++i) {
        const double xi = lo + (hi - lo) * i / n_intervals;
        g.nodes[i] = center + std::sinh(xi) / c;
    }
    g.nodes.front() = x_min;  // kill asinh/sinh rounding at the ends
    g.nodes.back() = x_max;
    for (int i = 1; i <= n_intervals; ++i)
        if (!(g.nodes[i] > g.nodes[i - 1]))
            throw std::runtime_error("grid: sinh spacing collapsed; reduce strength");
    return g;
}

}  // namespace tse
