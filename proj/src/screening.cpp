#include "mixnorm/screening.hpp"

#include <cmath>
#include <string>

namespace mixnorm {

namespace {

constexpr double kLambdaMaxSlack = 1e-12;

}  // namespace

LambdaMax lambda_max(const ProblemInstance& inst) {
    const Exponent qbar = inst.q().dual();
    const Vector bty = inst.design().transpose() * inst.response();
    const GroupPartition& part = inst.partition();
    LambdaMax best;
    for (Index g = 0; g < part.num_groups(); ++g) {
        const double norm = lp_norm(bty.segment(part.offset(g), part.size(g)), qbar);
        if (norm > best.value) {
            best.value = norm;
            best.group = g;
        }
    }
    return best;
}

double max_group_dual_norm(const ProblemInstance& inst, const Vector& theta) {
    if (theta.size() != inst.rows()) throw DimensionError("dual vector length must equal m");
    const Exponent qbar = inst.q().dual();
    const Vector bt = inst.design().transpose() * theta;
    const GroupPartition& part = inst.partition();
    double worst = 0.0;
    for (Index g = 0; g < part.num_groups(); ++g) {
        worst = std::max(worst, lp_norm(bt.segment(part.offset(g), part.size(g)), qbar));
    }
    return worst;
}

DualPoint dual_from_primal(const ProblemInstance& inst, const GroupedVector& x) {
    if (!(inst.lambda() > 0.0)) throw InvalidParameterError("dual point needs lambda > 0");
    if (x.dim() != inst.dim()) throw DimensionError("primal vector does not match problem dimension");
    return {(inst.response() - inst.design() * x.values()) / inst.lambda(), inst.lambda()};
}

double group_bound_constant(const Eigen::Ref<const Matrix>& block, const Exponent& qbar) {
    // Rows of B_i^T are the columns of B_i.
    const Vector row_norms = block.colwise().norm().transpose();
    return lp_norm(row_norms, qbar);
}

GroupBoundCache GroupBoundCache::build(const ProblemInstance& inst) {
    const Exponent qbar = inst.q().dual();
    GroupBoundCache cache;
    cache.bounds.resize(inst.num_groups());
    for (Index g = 0; g < inst.num_groups(); ++g) {
        cache.bounds[g] = group_bound_constant(inst.block(g), qbar);
    }
    return cache;
}

Vector dual_max_direction(const Vector& u, const Exponent& q) {
    const Exponent qbar = q.dual();
    const double norm = lp_norm(u, qbar);
    if (norm == 0.0) throw InvalidParameterError("direction of a zero vector is undefined");
    const Vector unit = u / norm;
    Vector d = Vector::Zero(u.size());
    switch (q.kind()) {
        case Exponent::Kind::infinity:
            for (Index j = 0; j < u.size(); ++j) d[j] = unit[j] > 0.0 ? 1.0 : (unit[j] < 0.0 ? -1.0 : 0.0);
            return d;
        case Exponent::Kind::one: {
            Index best = 0;
            for (Index j = 1; j < u.size(); ++j) {
                if (std::abs(unit[j]) > std::abs(unit[best])) best = j;
            }
            d[best] = unit[best] > 0.0 ? 1.0 : -1.0;
            return d;
        }
        case Exponent::Kind::two: return unit;
        case Exponent::Kind::general: break;
    }
    const double power = qbar.value() / q.value();
    for (Index j = 0; j < u.size(); ++j) {
        if (unit[j] != 0.0) d[j] = std::copysign(std::pow(std::abs(unit[j]), power), unit[j]);
    }
    return d;
}

ScreeningBall screening_ball(const ProblemInstance& inst, double lambda_new, double lambda_old,
                             const DualPoint& theta_old, const LambdaMax& lmax) {
    if (!(lambda_new > 0.0) || !(lambda_new < lambda_old)) {
        throw InvalidParameterError("screening ball needs 0 < lambda_new < lambda_old");
    }
    if (lmax.value <= 0.0) throw InvalidParameterError("screening requires lambda_max > 0");
    const Vector& y = inst.response();

    Vector theta;
    Vector b;
    if (lambda_old >= (1.0 - kLambdaMaxSlack) * lmax.value) {
        theta = y / lmax.value;
        const Vector u = inst.block(lmax.group).transpose() * theta;
        b = inst.block(lmax.group) * dual_max_direction(u, inst.q());
    } else {
        if (theta_old.theta.size() != inst.rows()) throw DimensionError("dual point length must equal m");
        theta = theta_old.theta / std::max(1.0, max_group_dual_norm(inst, theta_old.theta));
        b = y / lambda_old - theta;
    }

    ScreeningBall ball;
    ball.a = 0.5 * (y / lambda_new - theta);
    ball.inner_ab = ball.a.dot(b);
    const double bb = b.squaredNorm();
    Vector v;
    if (bb == 0.0) {
        ball.degenerate = true;
        v = ball.a;
    } else {
        const double coef = std::max(0.0, ball.inner_ab / bb);
        v = ball.a - coef * b;
    }
    ball.b = std::move(b);
    ball.center = theta + v;
    ball.radius = v.norm();
    return ball;
}

ScreeningBall screening_ball(const ProblemInstance& inst, double lambda_new, double lambda_old,
                             const DualPoint& theta_old) {
    return screening_ball(inst, lambda_new, lambda_old, theta_old, lambda_max(inst));
}

GroupMask screen_with_ball(const ProblemInstance& inst, const ScreeningBall& ball,
                           const GroupBoundCache& cache) {
    if (cache.bounds.size() != inst.num_groups()) throw DimensionError("bound cache does not match groups");
    const Exponent qbar = inst.q().dual();
    const Vector bto = inst.design().transpose() * ball.center;
    const GroupPartition& part = inst.partition();
    GroupMask mask(static_cast<std::size_t>(part.num_groups()), false);
    for (Index g = 0; g < part.num_groups(); ++g) {
        const double lhs = lp_norm(bto.segment(part.offset(g), part.size(g)), qbar);
        mask[static_cast<std::size_t>(g)] = lhs < 1.0 - cache.bounds[g] * ball.radius;
    }
    return mask;
}

GroupMask screen_groups(const ProblemInstance& inst, double lambda_new, double lambda_old,
                        const DualPoint& theta_old, const GroupBoundCache& cache) {
    const LambdaMax lmax = lambda_max(inst);
    if (lambda_new >= (1.0 - kLambdaMaxSlack) * lmax.value) {
        return GroupMask(static_cast<std::size_t>(inst.num_groups()), true);
    }
    return screen_with_ball(inst, screening_ball(inst, lambda_new, lambda_old, theta_old, lmax), cache);
}

std::size_t count_discarded(const GroupMask& mask) {
    std::size_t n = 0;
    for (bool b : mask) n += b ? 1 : 0;
    return n;
}

ReducedProblem restrict_problem(const ProblemInstance& inst, const GroupMask& discard) {
    if (discard.size() != static_cast<std::size_t>(inst.num_groups())) {
        throw DimensionError("mask length does not match group count");
    }
    std::vector<Index> kept;
    std::vector<Index> sizes;
    Index cols = 0;
    for (Index g = 0; g < inst.num_groups(); ++g) {
        if (!discard[static_cast<std::size_t>(g)]) {
            kept.push_back(g);
            sizes.push_back(inst.partition().size(g));
            cols += inst.partition().size(g);
        }
    }
    Matrix design(inst.rows(), cols);
    Index at = 0;
    for (Index g : kept) {
        const Index n = inst.partition().size(g);
        design.middleCols(at, n) = inst.block(g);
        at += n;
    }
    return {ProblemInstance(std::move(design), inst.response(), GroupPartition(std::move(sizes)), inst.q(),
                            inst.lambda()),
            std::move(kept)};
}

GroupedVector restrict_vector(const GroupedVector& full, const std::vector<Index>& kept,
                              const PartitionPtr& reduced_partition) {
    GroupedVector out(reduced_partition);
    for (std::size_t k = 0; k < kept.size(); ++k) {
        out.group(static_cast<Index>(k)) = full.group(kept[k]);
    }
    return out;
}

GroupedVector embed_vector(const GroupedVector& reduced, const std::vector<Index>& kept,
                           const PartitionPtr& full_partition) {
    GroupedVector out(full_partition);
    for (std::size_t k = 0; k < kept.size(); ++k) {
        out.group(kept[k]) = reduced.group(static_cast<Index>(k));
    }
    return out;
}

double rejection_ratio(const GroupMask& discard, const GroupedVector& solution, double zero_threshold) {
    std::size_t zeros = 0;
    std::size_t discarded = 0;
    for (Index g = 0; g < solution.num_groups(); ++g) {
        if (solution.group(g).norm() <= zero_threshold) ++zeros;
        if (discard[static_cast<std::size_t>(g)]) ++discarded;
    }
    if (zeros == 0) return 1.0;
    return static_cast<double>(discarded) / static_cast<double>(zeros);
}

SequentialScreener::SequentialScreener(const ProblemInstance& inst)
    : inst_(inst), lmax_(lambda_max(inst)), cache_(GroupBoundCache::build(inst)) {
    lambda_prev_ = lmax_.value;
    if (lmax_.value > 0.0) theta_prev_ = {inst.response() / lmax_.value, lmax_.value};
    mask_prev_.assign(static_cast<std::size_t>(inst.num_groups()), true);
}

GroupMask SequentialScreener::screen(double lambda_new) {
    if (!(lambda_new > 0.0)) throw InvalidParameterError("screening needs lambda > 0");
    if (lmax_.value <= 0.0 || lambda_new >= (1.0 - kLambdaMaxSlack) * lmax_.value) {
        mask_prev_.assign(mask_prev_.size(), true);
        return mask_prev_;
    }
    if (lambda_new == lambda_prev_) return mask_prev_;
    if (lambda_new > lambda_prev_) {
        throw InvalidParameterError("sequential screening needs a nonincreasing lambda sequence");
    }
    const ScreeningBall ball =
        screening_ball(inst_.with_lambda(lambda_new), lambda_new, lambda_prev_, theta_prev_, lmax_);
    mask_prev_ = screen_with_ball(inst_, ball, cache_);
    return mask_prev_;
}

void SequentialScreener::advance(double lambda, const GroupedVector& solution) {
    if (lmax_.value <= 0.0) return;
    if (lambda >= lmax_.value) {
        lambda_prev_ = lmax_.value;
        theta_prev_ = {inst_.response() / lmax_.value, lmax_.value};
        return;
    }
    lambda_prev_ = lambda;
    theta_prev_ = dual_from_primal(inst_.with_lambda(lambda), solution);
}

SequentialScreeningResult screen_sequential(const ProblemInstance& inst,
                                            const std::vector<double>& lambda_seq,
                                            const ReducedSolveFn& solve_fn) {
    SequentialScreener screener(inst);
    SequentialScreeningResult result;
    GroupedVector previous = inst.zeros();
    for (std::size_t k = 0; k < lambda_seq.size(); ++k) {
        const double lambda = lambda_seq[k];
        if (k > 0 && lambda > lambda_seq[k - 1]) {
            throw InvalidParameterError("lambda sequence must be nonincreasing (position " +
                                        std::to_string(k) + ")");
        }
        GroupMask mask = screener.screen(lambda);
        GroupedVector solution = inst.zeros();
        if (count_discarded(mask) < mask.size()) {
            const ReducedProblem reduced = restrict_problem(inst.with_lambda(lambda), mask);
            const GroupedVector warm =
                restrict_vector(previous, reduced.kept, reduced.instance.partition_ptr());
            try {
                const GroupedVector x = solve_fn(reduced.instance, warm);
                solution = embed_vector(x, reduced.kept, inst.partition_ptr());
            } catch (const Error& e) {
                throw Error("lambda index " + std::to_string(k) + ": " + e.what());
            }
        }
        screener.advance(lambda, solution);
        result.rejection_ratios.push_back(rejection_ratio(mask, solution));
        result.masks.push_back(std::move(mask));
        result.solutions.push_back(solution);
        previous = std::move(solution);
    }
    return result;
}

}  // namespace mixnorm
