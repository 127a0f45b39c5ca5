#include "hip/optimize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hip::optimize {

bool Box::contains(std::span<const double> x) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
    }
    return true;
}

void Box::clamp(std::span<double> x) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = std::clamp(x[i], lower[i], upper[i]);
    }
}

namespace {

double sum_of_squares(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

struct Evaluator {
    const ResidualFn& fn;
    std::size_t calls = 0;

    // Cost, or +inf when the model fails or produces non-finite residuals.
    double operator()(std::span<const double> x, std::vector<double>& r) {
        ++calls;
        if (!fn(x, r)) return std::numeric_limits<double>::infinity();
        const double cost = sum_of_squares(r);
        return std::isfinite(cost) ? cost : std::numeric_limits<double>::infinity();
    }
};

}  // namespace

LmResult minimize_lm(const ResidualFn& residuals, std::vector<double> start, const Box& box,
                     const LmOptions& options) {
    const std::size_t n = start.size();
    Evaluator eval{residuals};
    LmResult result;
    box.clamp(start);
    result.x = std::move(start);

    std::vector<double> r;
    result.cost = eval(result.x, r);
    if (!std::isfinite(result.cost)) {
        result.failed = true;
        result.evaluations = eval.calls;
        return result;
    }
    const std::size_t m = r.size();

    Eigen::MatrixXd jac(m, n);
    std::vector<double> probe(n);
    std::vector<double> r_probe;
    std::vector<double> trial(n);
    std::vector<double> r_trial;
    double damping = options.initial_damping;

    for (; result.iterations < options.max_iterations; ++result.iterations) {
        if (result.cost == 0.0) {
            result.converged = true;
            break;
        }

        // Forward differences, stepping inward when a bound is in the way.
        for (std::size_t j = 0; j < n; ++j) {
            const double xj = result.x[j];
            double h = std::max(options.fd_relative_step * std::abs(xj), options.fd_min_step);
            if (xj + h > box.upper[j]) {
                h = (xj - h >= box.lower[j]) ? -h : (box.upper[j] - xj);
            }
            probe = result.x;
            probe[j] = xj + h;
            const double c = (h != 0.0) ? eval(probe, r_probe) : std::numeric_limits<double>::infinity();
            if (!std::isfinite(c)) {
                jac.col(j).setZero();
                continue;
            }
            for (std::size_t i = 0; i < m; ++i) {
                jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (r_probe[i] - r[i]) / h;
            }
        }

        const Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(m));
        const Eigen::VectorXd grad = jac.transpose() * rv;
        const Eigen::MatrixXd normal = jac.transpose() * jac;

        // Variables pinned at a bound with the descent direction pointing out stay fixed.
        std::vector<Eigen::Index> free;
        for (std::size_t j = 0; j < n; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            const bool pinned_low = result.x[j] <= box.lower[j] && grad(jj) > 0.0;
            const bool pinned_high = result.x[j] >= box.upper[j] && grad(jj) < 0.0;
            if (!pinned_low && !pinned_high) free.push_back(jj);
        }
        double grad_inf = 0.0;
        for (auto j : free) grad_inf = std::max(grad_inf, std::abs(grad(j)));
        if (free.empty() || grad_inf <= options.gradient_tol * std::max(result.cost, 1e-300)) {
            result.converged = true;
            break;
        }

        const auto nf = static_cast<Eigen::Index>(free.size());
        Eigen::MatrixXd a(nf, nf);
        Eigen::VectorXd g(nf);
        double diag_max = 0.0;
        for (Eigen::Index p = 0; p < nf; ++p) {
            g(p) = grad(free[static_cast<std::size_t>(p)]);
            for (Eigen::Index q = 0; q < nf; ++q) {
                a(p, q) = normal(free[static_cast<std::size_t>(p)], free[static_cast<std::size_t>(q)]);
            }
            diag_max = std::max(diag_max, a(p, p));
        }
        const double diag_floor = std::max(diag_max * 1e-12, 1e-300);

        bool accepted = false;
        bool stalled = false;
        while (!accepted) {
            Eigen::MatrixXd damped = a;
            for (Eigen::Index p = 0; p < nf; ++p) {
                damped(p, p) += damping * std::max(a(p, p), diag_floor);
            }
            const Eigen::VectorXd step = damped.ldlt().solve(-g);
            trial = result.x;
            double step_norm = 0.0;
            double x_norm = 0.0;
            for (Eigen::Index p = 0; p < nf; ++p) {
                const auto j = static_cast<std::size_t>(free[static_cast<std::size_t>(p)]);
                if (std::isfinite(step(p))) trial[j] += step(p);
            }
            box.clamp(trial);
            for (std::size_t j = 0; j < n; ++j) {
                step_norm = std::max(step_norm, std::abs(trial[j] - result.x[j]));
                x_norm = std::max(x_norm, std::abs(result.x[j]));
            }
            if (step_norm <= options.step_rel_tol * std::max(x_norm, 1e-300)) {
                stalled = true;
                break;
            }
            const double cost = eval(trial, r_trial);
            if (cost < result.cost) {
                const double decrease = result.cost - cost;
                result.x = trial;
                r.swap(r_trial);
                const double previous = result.cost;
                result.cost = cost;
                damping = std::max(damping / 3.0, 1e-12);
                accepted = true;
                if (decrease <= options.cost_rel_tol * previous) stalled = true;
            } else {
                damping *= 4.0;
                if (damping > options.max_damping) {
                    stalled = true;
                    break;
                }
            }
        }
        if (stalled) {
            result.converged = true;
            ++result.iterations;
            break;
        }
    }
    result.evaluations = eval.calls;
    return result;
}

}  // namespace hip::optimize
