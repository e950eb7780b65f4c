#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace pinchlab {

/// Default tolerances shared by the CLI and the acceptance suite.
struct Tolerances {
    /// algebraic and series identities
    double identity = 1e-8;
    /// checks coupled to adaptive quadrature
    double quadrature = 1e-6;
    /// connection formulas and the ODE cross-check
    double connection = 1e-7;
    /// pants generators and relations
    double geometry = 1e-9;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct Criterion {
    int id = 0;
    std::string name;
    std::function<CriterionResult()> run;
};

std::vector<Criterion> acceptance_criteria(const Tolerances& tol = {});

/// Runs one criterion; an escaping exception marks it failed with its message.
CriterionResult run_criterion(const Criterion& c);

/// "PASS  3  name: detail (0.12 s)"
std::string format_result(const CriterionResult& r);

/// Runs every criterion, printing one line each as it finishes, then a summary.
/// Returns 0 iff all pass.
int run_acceptance(std::ostream& out, const Tolerances& tol = {});

} // namespace pinchlab
