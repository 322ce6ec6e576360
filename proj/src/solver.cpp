#include "mixnorm/solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mixnorm/prox.hpp"

namespace mixnorm {

void SolverConfig::validate() const {
    if (max_iters < 1) throw InvalidParameterError("max_iters must be at least 1");
    if (!(tol >= 0.0)) throw InvalidParameterError("tol must be nonnegative");
    if (!(grad_map_tol >= 0.0)) throw InvalidParameterError("grad_map_tol must be nonnegative");
    if (!(prox_delta > 0.0)) throw InvalidParameterError("prox_delta must be positive");
    if (!std::isfinite(L0)) throw InvalidParameterError("L0 must be finite");
}

double default_lipschitz_estimate(const ProblemInstance& inst) {
    const double y_inf = inst.response().lpNorm<Eigen::Infinity>();
    if (y_inf == 0.0) return 1.0;
    const double bty = (inst.design().transpose() * inst.response()).lpNorm<Eigen::Infinity>();
    return std::max(1e-3, bty / y_inf);
}

LineSearchResult line_search_step(const SmoothLoss& loss, const GroupedVector& s, double L_init,
                                  const Exponent& q, double lambda, const SolverConfig& config) {
    if (!(L_init > 0.0)) throw InvalidParameterError("line search needs L_init > 0");
    Vector grad(s.dim());
    const double loss_s = loss.value_and_gradient(s.values(), grad);
    if (!std::isfinite(loss_s) || !grad.allFinite()) {
        throw DivergenceError("non-finite loss or gradient at the search point");
    }
    // Rounding allowance when X_{next} is within a few ulps of S.
    const double slack = 1e-13 * std::abs(loss_s);

    LineSearchResult result;
    double L = L_init;
    while (true) {
        ++result.trials;
        GroupedVector v(s.partition_ptr(), s.values() - grad / L);
        GroupedVector x = prox_all(v, lambda / L, q, config.prox_delta);
        const Vector d = x.values() - s.values();
        const double loss_x = loss.value(x.values());
        const double model_smooth = loss_s + grad.dot(d) + 0.5 * L * d.squaredNorm();
        if (!std::isfinite(loss_x)) throw DivergenceError("non-finite loss during line search");
        if (loss_x <= model_smooth + slack) {
            const double penalty = lambda > 0.0 ? lambda * mixed_norm(x, q) : 0.0;
            result.f_next = loss_x + penalty;
            result.model_value = model_smooth + penalty;
            result.x_next = std::move(x);
            result.L = L;
            return result;
        }
        L *= 2.0;
        if (L > kMaxLipschitz) {
            throw LineSearchError("line search exceeded L = " + std::to_string(kMaxLipschitz));
        }
    }
}

LineSearchResult line_search_step(const GroupedVector& s, double L_init, const ProblemInstance& inst,
                                  const SolverConfig& config) {
    const LeastSquaresLoss loss(inst);
    return line_search_step(loss, s, L_init, inst.q(), inst.lambda(), config);
}

SolverResult solve_composite(const SmoothLoss& loss, const GroupedVector& x0, const Exponent& q,
                             double lambda, const SolverConfig& config) {
    config.validate();
    if (x0.dim() != loss.dim()) throw DimensionError("start vector does not match loss dimension");
    if (!(lambda >= 0.0)) throw InvalidParameterError("lambda must be nonnegative");

    SolverResult result;
    GroupedVector x_cur = x0;
    GroupedVector x_prev = x0;
    double alpha_prev = 0.0;  // alpha_{i-2}
    double alpha_cur = 1.0;   // alpha_{i-1}
    double L = config.L0 > 0.0 ? config.L0 : 1.0;

    double f_prev = loss.value(x0.values()) + (lambda > 0.0 ? lambda * mixed_norm(x0, q) : 0.0);
    if (!std::isfinite(f_prev)) throw DivergenceError("non-finite objective at the start point");
    result.f_history.push_back(f_prev);

    for (int it = 1; it <= config.max_iters; ++it) {
        const double beta = (alpha_prev - 1.0) / alpha_cur;
        GroupedVector s(x_cur.partition_ptr(), x_cur.values() + beta * (x_cur.values() - x_prev.values()));

        LineSearchResult step = line_search_step(loss, s, L, q, lambda, config);
        L = step.L;
        if (!std::isfinite(step.f_next)) {
            throw DivergenceError("objective became non-finite at iteration " + std::to_string(it));
        }
        const double grad_map = L * (step.x_next.values() - s.values()).norm();
        x_prev = std::move(x_cur);
        x_cur = std::move(step.x_next);
        result.gradient_mapping = grad_map;
        result.f_history.push_back(step.f_next);
        result.iterations = it;

        const double next_alpha = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * alpha_cur * alpha_cur));
        alpha_prev = alpha_cur;
        alpha_cur = next_alpha;

        const double f = step.f_next;
        if (std::abs(f - f_prev) <= config.tol * std::max(1.0, std::abs(f)) &&
            (config.grad_map_tol <= 0.0 || grad_map <= config.grad_map_tol)) {
            result.converged = true;
            break;
        }
        f_prev = f;
    }
    result.x = std::move(x_cur);
    result.L = L;
    return result;
}

SolverResult solve(const ProblemInstance& inst, const SolverConfig& config, const GroupedVector& x0) {
    if (x0.dim() != inst.dim()) throw DimensionError("start vector does not match problem dimension");
    SolverConfig cfg = config;
    if (cfg.L0 <= 0.0) cfg.L0 = default_lipschitz_estimate(inst);
    const LeastSquaresLoss loss(inst);
    GroupedVector start(inst.partition_ptr(), x0.values());
    return solve_composite(loss, start, inst.q(), inst.lambda(), cfg);
}

SolverResult solve(const ProblemInstance& inst, const SolverConfig& config) {
    return solve(inst, config, inst.zeros());
}

}  // namespace mixnorm
