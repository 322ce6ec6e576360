#pragma once

#include <functional>
#include <vector>

#include "mixnorm/model.hpp"

namespace mixnorm {

/// true = group discarded (its coefficients are certified zero).
using GroupMask = std::vector<bool>;

struct LambdaMax {
    double value = 0.0;
    /// Group attaining the maximum; lowest index on ties.
    Index group = 0;
};

/// lambda_max = max_i ||B_i^T Y||_qbar. Zero when Y = 0.
LambdaMax lambda_max(const ProblemInstance& inst);

/// max_i ||B_i^T theta||_qbar; theta is dual feasible when this is <= 1.
double max_group_dual_norm(const ProblemInstance& inst, const Vector& theta);

struct DualPoint {
    Vector theta;
    double lambda = 0.0;
};

/// theta = (Y - B X) / lambda, using the instance's lambda.
DualPoint dual_from_primal(const ProblemInstance& inst, const GroupedVector& x);

/// T such that ||A u||_qbar <= T ||u||_2 for A = B_i^T: the l_qbar norm of the
/// row 2-norms of A (max row norm when qbar = inf). `block` is B_i itself.
double group_bound_constant(const Eigen::Ref<const Matrix>& block, const Exponent& qbar);

struct GroupBoundCache {
    Vector bounds;
    static GroupBoundCache build(const ProblemInstance& inst);
};

/// Hoelder-equality element for u = B_*^T theta_max with ||u||_qbar = 1:
/// ||d||_q = 1 and <d, u> = ||u||_qbar. For finite q not in {1, inf} this is
/// sgn(u) |u|^{qbar/q}; q = inf gives sgn(u), q = 1 gives a signed unit vector
/// on the largest |u_j| (lowest index on ties).
Vector dual_max_direction(const Vector& u, const Exponent& q);

/// Ball {theta : ||theta - center|| <= radius} containing theta*(lambda_new).
struct ScreeningBall {
    Vector center;
    double radius = 0.0;
    /// b vanished, so v = a was used without projection.
    bool degenerate = false;
    Vector a;
    Vector b;
    /// <a, b> before clamping; nonnegative for exact dual points.
    double inner_ab = 0.0;
};

/// Builds the ball from a dual point at lambda_old > lambda_new.
///
/// At lambda_old = lambda_max the dual point is Y / lambda_max and the
/// normal direction is B_* d_max. Otherwise theta_old is first scaled by
/// 1 / max(1, max_i ||B_i^T theta_old||_qbar) to restore feasibility.
ScreeningBall screening_ball(const ProblemInstance& inst, double lambda_new, double lambda_old,
                             const DualPoint& theta_old, const LambdaMax& lmax);
ScreeningBall screening_ball(const ProblemInstance& inst, double lambda_new, double lambda_old,
                             const DualPoint& theta_old);

/// Discard group i iff ||B_i^T o||_qbar < 1 - T_i r.
GroupMask screen_with_ball(const ProblemInstance& inst, const ScreeningBall& ball,
                           const GroupBoundCache& cache);

/// Screening test for lambda_new given the dual point at lambda_old. Every
/// group is discarded when lambda_new >= lambda_max.
GroupMask screen_groups(const ProblemInstance& inst, double lambda_new, double lambda_old,
                        const DualPoint& theta_old, const GroupBoundCache& cache);

std::size_t count_discarded(const GroupMask& mask);

/// Problem restricted to the groups a mask keeps.
struct ReducedProblem {
    ProblemInstance instance;
    std::vector<Index> kept;  // original group indices, ascending
};

ReducedProblem restrict_problem(const ProblemInstance& inst, const GroupMask& discard);
GroupedVector restrict_vector(const GroupedVector& full, const std::vector<Index>& kept,
                              const PartitionPtr& reduced_partition);
/// Inverse of restrict_vector with zeros in the dropped groups.
GroupedVector embed_vector(const GroupedVector& reduced, const std::vector<Index>& kept,
                           const PartitionPtr& full_partition);

/// Discarded groups over groups whose solution norm is <= zero_threshold.
/// Returns 1 when no group is zero.
double rejection_ratio(const GroupMask& discard, const GroupedVector& solution,
                       double zero_threshold = 1e-6);

/// Stateful sequential rule along a decreasing lambda sequence. Starts from
/// (lambda_max, Y / lambda_max), so the first step is the basic rule.
class SequentialScreener {
public:
    explicit SequentialScreener(const ProblemInstance& inst);

    const LambdaMax& lmax() const { return lmax_; }
    const GroupBoundCache& cache() const { return cache_; }
    double previous_lambda() const { return lambda_prev_; }

    /// Mask for lambda_new from the stored dual point; a repeated lambda
    /// returns the previous mask.
    GroupMask screen(double lambda_new);
    /// Records the solution at lambda, deriving the next dual point from it.
    void advance(double lambda, const GroupedVector& solution);

private:
    ProblemInstance inst_;
    LambdaMax lmax_;
    GroupBoundCache cache_;
    double lambda_prev_ = 0.0;
    DualPoint theta_prev_;
    GroupMask mask_prev_;
};

/// Solves a reduced instance from a warm start of matching shape.
using ReducedSolveFn =
    std::function<GroupedVector(const ProblemInstance& reduced, const GroupedVector& warm_start)>;

struct SequentialScreeningResult {
    std::vector<GroupMask> masks;
    std::vector<GroupedVector> solutions;
    std::vector<double> rejection_ratios;
};

/// Screens each lambda from the previous solution, solves the survivors and
/// re-embeds zeros. lambda_seq must be nonincreasing and positive.
SequentialScreeningResult screen_sequential(const ProblemInstance& inst,
                                            const std::vector<double>& lambda_seq,
                                            const ReducedSolveFn& solve_fn);

}  // namespace mixnorm
