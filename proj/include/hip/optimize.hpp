#pragma once

// Box-constrained Levenberg-Marquardt with forward-difference Jacobians.
// Each accepted step strictly lowers the cost, so the cost sequence of a
// run is monotone non-increasing; iterates never leave the box.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hip::optimize {

struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    [[nodiscard]] std::size_t size() const noexcept { return lower.size(); }
    [[nodiscard]] bool contains(std::span<const double> x) const;
    void clamp(std::span<double> x) const;
};

/// Fills `residuals` for parameters `x`. Returns false when the model
/// cannot be evaluated (overflow, NaN); the point is then treated as
/// infinitely bad.
using ResidualFn = std::function<bool(std::span<const double> x, std::vector<double>& residuals)>;

struct LmOptions {
    std::size_t max_iterations = 300;
    double fd_relative_step = 1e-6;
    double fd_min_step = 1e-9;
    double cost_rel_tol = 1e-15;
    double step_rel_tol = 1e-13;
    double gradient_tol = 1e-14;
    double initial_damping = 1e-3;
    double max_damping = 1e16;
};

struct LmResult {
    std::vector<double> x;
    double cost = 0.0;  // sum of squared residuals
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
    bool failed = false;  // start point could not be evaluated
};

[[nodiscard]] LmResult minimize_lm(const ResidualFn& residuals, std::vector<double> start, const Box& box,
                                   const LmOptions& options = {});

}  // namespace hip::optimize
