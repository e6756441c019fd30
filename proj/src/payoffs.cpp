#include "tse/payoffs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tse {

Payoff bond_payoff() {
    Payoff p;
    p.name = "bond";
    p.g = [](double) { return 1.0; };
    p.g_prime = [](double) { return 0.0; };
    p.bounded = true;
    p.growth_bound = 1.0;
    return p;
}

Payoff call_on_bond(std::function<double(double)> bond_price, double strike) {
    if (!bond_price) throw std::invalid_argument("call_on_bond: bond_price is required");
    if (!(strike > 0.0)) throw std::invalid_argument("call_on_bond: strike must be > 0");
    Payoff p;
    p.name = "call_on_bond";
    auto g = [bond_price, strike](double x) {
        return std::max(bond_price(x) - strike, 0.0);
    };
    p.g = g;
    // Subgradient at the kink: take the left derivative (one-sided difference).
    p.g_prime = [g](double x) {
        const double h = 1e-6 * std::max(1.0, std::abs(x));
        return (3.0 * g(x) - 4.0 * g(x - h) + g(x - 2.0 * h)) / (2.0 * h);
    };
    p.bounded = true;
    p.growth_bound = 1.0;
    p.lipschitz_only = true;
    return p;
}

Payoff counterexample_payoff() {
    Payoff p;
    p.name = "counterexample";
    p.g = [](double x) {
        if (x < 0.0) throw std::domain_error("counterexample payoff: x < 0");
        return std::exp(-2.0 * std::sqrt(x));
    };
    p.g_prime = [](double x) {
        if (x <= 0.0)
            throw std::domain_error("counterexample payoff: g' undefined at x = " +
                                    std::to_string(x));
        const double r = std::sqrt(x);
        return -std::exp(-2.0 * r) / r;
    };
    p.bounded = true;
    p.growth_bound = 1.0;
    p.lipschitz_only = true;
    p.lipschitz_at_zero = false;
    return p;
}

Payoff table_payoff(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2)
        throw std::invalid_argument("table payoff: need at least two points");
    double max_g = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i > 0 && !(points[i].first > points[i - 1].first))
            throw std::invalid_argument("table payoff: x values must be strictly increasing");
        if (points[i].second < 0.0)
            throw std::invalid_argument("table payoff: values must be >= 0");
        max_g = std::max(max_g, points[i].second);
    }
    Payoff p;
    p.name = "custom_table";
    p.g = [points](double x) {
        if (x <= points.front().first) return points.front().second;
        if (x >= points.back().first) return points.back().second;
        auto it = std::upper_bound(points.begin(), points.end(), x,
                                   [](double v, const auto& q) { return v < q.first; });
        const auto& [x1, g1] = *it;
        const auto& [x0, g0] = *(it - 1);
        return g0 + (g1 - g0) * (x - x0) / (x1 - x0);
    };
    p.bounded = true;
    p.growth_bound = max_g;
    p.lipschitz_only = true;
    return p;
}

}  // namespace tse
