#pragma once
/// Reproducible invariant suite: band-velocity and Hessian sum rules against finite differences,
/// residue engine against contour quadrature, explicit against residue coefficients, the
/// vanishing fourth-derivative bucket, F_1(0) = 0 and gauge invariance.

#include <string>
#include <vector>

#include "config.hpp"

namespace blochchi {

struct CheckResult {
    std::string name;
    bool passed = false;
    double max_error = 0.0;
    double tolerance = 0.0;
    int samples = 0;
};

/// Every random draw derives from cfg.seed; parallel work is index-partitioned, so the report
/// does not depend on `threads`.
std::vector<CheckResult> run_verify(const RunConfig& cfg, int threads);

}  // namespace blochchi
