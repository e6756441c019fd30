#pragma once

// Named verification experiments: the Girsanov/first-variation identity,
// boundary-condition residual convergence, the degeneracy diagnostic, the
// Dirichlet-at-zero ambiguity, the martingale counterexample, and the affine
// boundary residual.

#include <map>
#include <string>
#include <vector>

#include "tse/mc.hpp"
#include "tse/models.hpp"

namespace tse {

struct CheckResult {
    enum class Status { Pass, Fail, Skipped };

    std::string name;
    Status status = Status::Skipped;
    std::string reason;  // skip cause or failure summary
    std::map<std::string, double> metrics;

    bool passed() const { return status == Status::Pass; }
    bool failed() const { return status == Status::Fail; }
};

// Each check reseeds from (mc.seed, check name), so checks are individually
// reproducible regardless of execution order.

CheckResult check_girsanov_identity(const ModelSpec& model, double T,
                                    const McConfig& mc);
CheckResult check_boundary_residual_convergence(const ModelSpec& model);
CheckResult check_alpha_uxx_limit(const ModelSpec& model);
CheckResult check_wrong_boundary_divergence(const ModelSpec& model);
CheckResult check_martingale_counterexample(const McConfig& mc);
CheckResult check_affine_boundary(const ModelSpec& model);

const std::vector<std::string>& all_check_names();
CheckResult run_check(const std::string& name, const ModelSpec& model, double T,
                      const McConfig& mc);

}  // namespace tse
