#pragma once

// Reference implementations for validation only. Nothing here calls into the
// prox module's zero finding: the group prox used by reference_solve goes
// through the Moreau identity x = v - Proj_{||y||_qbar <= lambda}(v) with its
// own one-dimensional solvers, and the grid oracle is exhaustive search.

#include "mixnorm/model.hpp"

namespace mixnorm::oracle {

/// Largest group size accepted by prox_oracle_grid.
inline constexpr Index kMaxGridDim = 4;

/// Minimizes 1/2 ||x - v||^2 + lambda ||x||_q over a grid on the sign-reduced
/// box [0, |v_i|], then refines three times around the incumbent with a 10x
/// finer spacing each pass, re-centering while the incumbent touches the
/// window edge. All axes share one spacing, `resolution` times max |v_i|, so
/// final accuracy is about resolution / 1000 of max |v_i|.
Vector prox_oracle_grid(const Eigen::Ref<const Vector>& v, double lambda, const Exponent& q,
                        double resolution = 0.05);

/// Group prox through the Moreau identity (dual-norm ball projection).
Vector moreau_prox(const Eigen::Ref<const Vector>& v, double lambda, const Exponent& q);

/// Largest eigenvalue of B^T B by power iteration.
double power_method_lipschitz(const Matrix& design, int max_iters = 5000, double rel_tol = 1e-13);

struct ReferenceResult {
    GroupedVector x;
    double objective = 0.0;
    long iterations = 0;
    bool converged = false;
    /// ||X - P(X - tau grad l(X))|| at the last step.
    double residual = 0.0;
    double step = 0.0;
};

/// Plain (non-accelerated) proximal gradient with fixed step 0.9 / ||B^T B||_2.
ReferenceResult reference_solve(const ProblemInstance& inst, double tol = 1e-12, long max_iters = 1000000);
ReferenceResult reference_solve(const ProblemInstance& inst, const GroupedVector& x0, double tol,
                                long max_iters);

}  // namespace mixnorm::oracle
