#pragma once

// Terminal payoffs g(x) with the metadata the solvers need: derivative for
// the first-variation estimator, growth class for far-field policy, and
// Lipschitz behaviour at x = 0 for the boundary-condition derivation.

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace tse {

struct Payoff {
    std::string name;
    std::function<double(double)> g;
    std::function<double(double)> g_prime;  // empty if unavailable
    bool bounded = true;
    double growth_bound = 1.0;   // sup |g| when bounded
    bool lipschitz_only = false; // kinked: PDE applies Rannacher start-up
    bool lipschitz_at_zero = true;
};

// g(x) = 1 (zero-coupon bond).
Payoff bond_payoff();

// g(x) = (bond_price(x) - strike)^+ where bond_price maps the terminal
// short rate to the underlying bond value.
Payoff call_on_bond(std::function<double(double)> bond_price, double strike);

// g(x) = exp(-2 sqrt(x)), the martingale counterexample payoff; not
// Lipschitz at 0, g' undefined there.
Payoff counterexample_payoff();

// Piecewise-linear table payoff; xs strictly increasing, values >= 0,
// constant extension outside the table.
Payoff table_payoff(const std::vector<std::pair<double, double>>& points);

}  // namespace tse
