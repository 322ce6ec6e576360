#pragma once

#include <vector>

#include "mixnorm/model.hpp"

namespace mixnorm {

/// Parameters of the l_q-regularized Euclidean projection
///   argmin_x 1/2 ||x - v||^2 + lambda ||x||_q.
struct ProxParams {
    double lambda = 1.0;
    Exponent q = Exponent::two();
    /// Bisection tolerance shared by the outer (c) and inner (x_i) searches.
    double delta = 1e-8;

    void validate() const;
};

/// Bracketing state of the nested zero finding for 1 < q < inf.
///
/// [c_lo, c_hi] brackets the root of phi(c) = lambda psi(c) - c. For every
/// coordinate, x_lo[i] <= omega_i^{-1}(c) <= x_hi[i] holds for all c in the
/// bracket; x_lo is cached from the c_hi side and x_hi from the c_lo side.
struct ZeroFindState {
    double c_lo = 0.0;
    double c_hi = 0.0;
    Vector x_lo;
    Vector x_hi;
};

/// Optional diagnostics of a general-q solve.
struct GeneralQTrace {
    double root = 0.0;
    int outer_iterations = 0;
    std::vector<ZeroFindState> history;  // state after each outer iteration
};

/// Relative slack applied to the zero test lambda >= ||v||_qbar.
inline constexpr double kZeroThresholdSlack = 1e-12;

/// True when the minimizer is exactly zero, i.e. lambda >= ||v||_qbar up to
/// kZeroThresholdSlack.
bool prox_is_zero(const Eigen::Ref<const Vector>& v, double lambda, const Exponent& q);

/// Unique minimizer of 1/2 ||x - v||^2 + lambda ||x||_q for one group.
Vector prox_group(const Eigen::Ref<const Vector>& v, const ProxParams& params);

/// sgn(v) * max(|v| - lambda, 0).
Vector soft_threshold(const Eigen::Ref<const Vector>& v, double lambda);

/// ((||v||_2 - lambda) / ||v||_2) v, or zero.
Vector prox_l2(const Eigen::Ref<const Vector>& v, double lambda);

/// q = inf: sgn(v) * min(|v|, t*) with sum_i max(|v_i| - t*, 0) = lambda.
/// Requires lambda < ||v||_1; t* is found by sorting |v| and scanning the
/// breakpoints of the piecewise-linear equation.
Vector prox_inf(const Eigen::Ref<const Vector>& v, double lambda);

/// Root t* of sum_i max(|v_i| - t, 0) = lambda for 0 < lambda < ||v||_1.
double l1_ball_threshold(const Eigen::Ref<const Vector>& v, double lambda);

/// General finite q > 1 on a strictly positive vector with lambda < ||v||_qbar.
///
/// Finds c* by bisection on [c_lo, c_hi] (the bracket from
/// `outer_bracket`), evaluating psi(c) through per-coordinate bisections on
/// brackets cached from earlier outer iterations, then returns
/// x_i = omega_i^{-1}(c*). The input is normalized by max(v) first. Inner
/// searches stop at a width of delta times the coordinate's upper bound, so
/// tiny coordinates keep their relative accuracy; the outer search stops at
/// delta * max(1, c_lo).
///
/// q = 2 is accepted here so the iterative path can be checked against the
/// closed form.
Vector prox_general_q(const Eigen::Ref<const Vector>& v_pos, double lambda, double q,
                      double delta = 1e-8, GeneralQTrace* trace = nullptr);

/// [c_lo, c_hi] = [min_i c_i, max_i c_i] with c_i = omega_i(v_i eps) and
/// eps = (||v||_qbar - lambda) / ||v||_qbar.
struct OuterBracket {
    double c_lo;
    double c_hi;
    double eps;
};
OuterBracket outer_bracket(const Eigen::Ref<const Vector>& v_pos, double lambda, double q);

/// omega^{-1}(c): the root of x + c x^{q-1} - v on (0, v), to machine precision.
double omega_inverse(double v, double c, double q);

/// phi(c) = lambda (sum_i omega_i^{-1}(c)^q)^{(1-q)/q} - c, evaluated cold.
double outer_function(const Eigen::Ref<const Vector>& v_pos, double lambda, double q, double c);

/// Block-separable projection: prox_group applied to each group with the same
/// lambda, q and delta. lambda == 0 returns the input.
GroupedVector prox_all(const GroupedVector& v, double lambda, const Exponent& q,
                       double delta = 1e-8);

}  // namespace mixnorm
