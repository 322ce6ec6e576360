#pragma once

#include <vector>

#include "mixnorm/model.hpp"

namespace mixnorm {

struct SolverConfig {
    /// Initial Lipschitz estimate; <= 0 selects default_lipschitz_estimate.
    double L0 = 0.0;
    int max_iters = 10000;
    /// Stop when |f_k - f_{k-1}| <= tol * max(1, |f_k|).
    double tol = 1e-8;
    /// When positive, stopping also requires L ||X_{k+1} - S_k|| <= grad_map_tol.
    double grad_map_tol = 0.0;
    double prox_delta = 1e-8;

    void validate() const;
};

struct SolverResult {
    GroupedVector x;
    /// f(X_0), f(X_1), ..., one entry per completed iteration plus the start.
    std::vector<double> f_history;
    int iterations = 0;
    double L = 0.0;
    /// L ||X_k - S_{k-1}|| at the last step.
    double gradient_mapping = 0.0;
    bool converged = false;
};

struct LineSearchResult {
    GroupedVector x_next;
    double L = 0.0;
    /// Composite objective f(x_next).
    double f_next = 0.0;
    /// Quadratic model M_{L,S}(x_next) at acceptance.
    double model_value = 0.0;
    int trials = 0;
};

/// Largest L the doubling search may reach before giving up.
inline constexpr double kMaxLipschitz = 1e30;

/// max(1e-3, ||B^T Y||_inf / ||Y||_inf), or 1 when Y = 0.
double default_lipschitz_estimate(const ProblemInstance& inst);

/// One accelerated step from search point S: the first L in L_init, 2 L_init,
/// ... with f(X) <= M_{L,S}(X), where X = prox(S - grad l(S) / L, lambda / L).
LineSearchResult line_search_step(const SmoothLoss& loss, const GroupedVector& s, double L_init,
                                  const Exponent& q, double lambda, const SolverConfig& config);
LineSearchResult line_search_step(const GroupedVector& s, double L_init, const ProblemInstance& inst,
                                  const SolverConfig& config);

/// Accelerated proximal gradient for l(W) + lambda sum_i ||w_i||_q.
///
/// Two-sequence scheme: S_i = X_i + beta_i (X_i - X_{i-1}) with
/// beta_i = (alpha_{i-2} - 1) / alpha_{i-1}, alpha_{-1} = 0, alpha_0 = 1 and
/// alpha_{i+1} = (1 + sqrt(1 + 4 alpha_i^2)) / 2. L is carried between
/// iterations and never decreased.
SolverResult solve_composite(const SmoothLoss& loss, const GroupedVector& x0, const Exponent& q,
                             double lambda, const SolverConfig& config);

/// Least-squares instance; the start defaults to zero.
SolverResult solve(const ProblemInstance& inst, const SolverConfig& config);
SolverResult solve(const ProblemInstance& inst, const SolverConfig& config, const GroupedVector& x0);

}  // namespace mixnorm
