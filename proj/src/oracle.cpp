#include "mixnorm/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace mixnorm::oracle {

namespace {

double plain_norm(const Vector& x, const Exponent& q) {
    if (q.is_infinite()) return x.cwiseAbs().maxCoeff();
    if (q.kind() == Exponent::Kind::one) return x.cwiseAbs().sum();
    if (q.kind() == Exponent::Kind::two) return x.norm();
    const double p = q.value();
    double s = 0.0;
    for (Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), p);
    return std::pow(s, 1.0 / p);
}

double grid_objective(const Vector& x, const Vector& a, double lambda, const Exponent& q) {
    return 0.5 * (x - a).squaredNorm() + lambda * plain_norm(x, q);
}

struct Axis {
    double lo;
    double step;
    int count;
};

// Exhaustive search over the tensor grid described by axes.
void search_grid(const std::vector<Axis>& axes, const Vector& a, double lambda, const Exponent& q,
                 Vector& best, double& best_value) {
    const std::size_t n = axes.size();
    std::array<int, kMaxGridDim> idx{};
    Vector x(static_cast<Index>(n));
    while (true) {
        for (std::size_t i = 0; i < n; ++i) {
            const double t = axes[i].lo + axes[i].step * idx[i];
            x[static_cast<Index>(i)] = std::clamp(t, 0.0, a[static_cast<Index>(i)]);
        }
        const double value = grid_objective(x, a, lambda, q);
        if (value < best_value) {
            best_value = value;
            best = x;
        }
        std::size_t d = 0;
        while (d < n && ++idx[d] >= axes[d].count) {
            idx[d] = 0;
            ++d;
        }
        if (d == n) break;
    }
}

// Root of y + mu y^r = u on [0, u] by Newton steps kept inside a bracket.
double solve_coordinate(double u, double mu, double r) {
    if (u <= 0.0) return 0.0;
    double lo = 0.0;
    double hi = u;
    double y = std::min(u, std::pow(u / mu, 1.0 / r));
    for (int it = 0; it < 200; ++it) {
        const double yr = std::pow(y, r);
        const double f = y + mu * yr - u;
        if (f > 0.0) {
            hi = y;
        } else {
            lo = y;
        }
        const double df = 1.0 + mu * r * (y > 0.0 ? yr / y : 0.0);
        double next = y - f / df;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (std::abs(next - y) <= 1e-16 * u || hi - lo <= 1e-16 * u) return next;
        y = next;
    }
    return y;
}

// Projection of u >= 0 onto {y : ||y||_s <= radius} for finite s > 1.
Vector project_dual_ball(const Vector& u, double radius, double s) {
    const double r = s - 1.0;
    const double target = std::pow(radius, s);
    auto excess = [&](double log_mu) {
        const double mu = std::exp(log_mu);
        double total = 0.0;
        for (Index i = 0; i < u.size(); ++i) total += std::pow(solve_coordinate(u[i], mu, r), s);
        return total - target;
    };
    // excess is decreasing in mu; bracket in log space, then Illinois false position.
    double a = 0.0, b = 0.0;
    double fa = excess(a), fb = fa;
    if (fa > 0.0) {
        b = 1.0;
        fb = excess(b);
        while (fb > 0.0) {
            a = b;
            fa = fb;
            b *= 2.0;
            fb = excess(b);
        }
    } else {
        a = -1.0;
        fa = excess(a);
        while (fa < 0.0) {
            b = a;
            fb = fa;
            a *= 2.0;
            fa = excess(a);
        }
    }
    int side = 0;
    double c = a;
    for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
        c = (a * fb - b * fa) / (fb - fa);
        if (!(c > a && c < b)) c = 0.5 * (a + b);
        const double fc = excess(c);
        if (fc == 0.0) break;
        if (fc > 0.0) {
            a = c;
            fa = fc;
            if (side == 1) fb *= 0.5;
            side = 1;
        } else {
            b = c;
            fb = fc;
            if (side == -1) fa *= 0.5;
            side = -1;
        }
    }
    const double mu = std::exp(c);
    Vector y(u.size());
    for (Index i = 0; i < u.size(); ++i) y[i] = solve_coordinate(u[i], mu, r);
    return y;
}

// Root of sum_i max(|v_i| - t, 0) = lambda by bisection on [0, max |v_i|].
double l1_threshold_bisect(const Vector& a, double lambda) {
    double lo = 0.0, hi = a.maxCoeff();
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double h = (a.array() - mid).max(0.0).sum() - lambda;
        if (h > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Vector prox_oracle_grid(const Eigen::Ref<const Vector>& v, double lambda, const Exponent& q, double resolution) {
    if (v.size() > kMaxGridDim) {
        throw SizeError("grid oracle supports at most " + std::to_string(kMaxGridDim) + " coordinates");
    }
    if (!(resolution > 0.0 && resolution <= 1.0)) throw InvalidParameterError("resolution must lie in (0, 1]");
    const Index n = v.size();
    const Vector a = v.cwiseAbs();
    if (n == 0 || a.maxCoeff() == 0.0) return Vector::Zero(n);

    // One lattice spacing shared by all axes, so points with equal
    // coordinates (the kinks of the l_inf norm) lie on the grid.
    double step = resolution * a.maxCoeff();
    std::vector<Axis> axes(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        auto& ax = axes[static_cast<std::size_t>(i)];
        ax = a[i] > 0.0 ? Axis{0.0, step, static_cast<int>(std::ceil(a[i] / step)) + 1} : Axis{0.0, 0.0, 1};
    }
    Vector best = Vector::Zero(n);
    double best_value = std::numeric_limits<double>::infinity();
    search_grid(axes, a, lambda, q, best, best_value);

    for (int pass = 0; pass < 3; ++pass) {
        const double old_step = step;
        step /= 10.0;
        // Re-center while the incumbent sits on the edge of the window.
        for (int recenter = 0; recenter < 20; ++recenter) {
            const Vector center = best;
            for (Index i = 0; i < n; ++i) {
                auto& ax = axes[static_cast<std::size_t>(i)];
                if (a[i] == 0.0) continue;
                ax.step = step;
                ax.lo = std::max(0.0, center[i] - 2.0 * old_step);
                ax.count = 41;
            }
            search_grid(axes, a, lambda, q, best, best_value);
            bool on_edge = false;
            for (Index i = 0; i < n; ++i) {
                const auto& ax = axes[static_cast<std::size_t>(i)];
                if (a[i] == 0.0) continue;
                const double hi = std::min(a[i], ax.lo + ax.step * (ax.count - 1));
                const bool low_edge = best[i] <= ax.lo && ax.lo > 0.0;
                const bool high_edge = best[i] >= hi && hi < a[i];
                on_edge = on_edge || low_edge || high_edge;
            }
            if (!on_edge) break;
        }
    }

    Vector x(n);
    for (Index i = 0; i < n; ++i) x[i] = std::copysign(best[i], v[i]);
    return x;
}

Vector moreau_prox(const Eigen::Ref<const Vector>& v, double lambda, const Exponent& q) {
    const Index n = v.size();
    if (n == 0) return Vector(0);
    if (lambda <= 0.0) return v;
    const Vector a = v.cwiseAbs();
    const double scale = a.maxCoeff();
    if (scale == 0.0) return Vector::Zero(n);
    const Vector u = a / scale;
    const double radius = lambda / scale;

    Vector y;  // projection of u onto the dual-norm ball of the given radius
    switch (q.kind()) {
        case Exponent::Kind::one:
            y = u.cwiseMin(radius);
            break;
        case Exponent::Kind::two: {
            const double norm = u.norm();
            y = norm <= radius ? u : Vector(u * (radius / norm));
            break;
        }
        case Exponent::Kind::infinity:
            y = u.sum() <= radius ? u : Vector((u.array() - l1_threshold_bisect(u, radius)).max(0.0));
            break;
        case Exponent::Kind::general: {
            const double s = q.value() / (q.value() - 1.0);
            double norm = 0.0;
            for (Index i = 0; i < n; ++i) norm += std::pow(u[i], s);
            norm = std::pow(norm, 1.0 / s);
            y = norm <= radius ? u : project_dual_ball(u, radius, s);
            break;
        }
    }
    Vector x(n);
    for (Index i = 0; i < n; ++i) x[i] = std::copysign(scale * std::max(0.0, u[i] - y[i]), v[i]);
    return x;
}

double power_method_lipschitz(const Matrix& design, int max_iters, double rel_tol) {
    if (design.size() == 0) return 0.0;
    Vector x = Vector::Ones(design.cols()) / std::sqrt(static_cast<double>(design.cols()));
    double estimate = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        Vector next = design.transpose() * (design * x);
        const double norm = next.norm();
        if (norm == 0.0) return 0.0;
        x = next / norm;
        if (std::abs(norm - estimate) <= rel_tol * norm) return norm;
        estimate = norm;
    }
    return estimate;
}

ReferenceResult reference_solve(const ProblemInstance& inst, double tol, long max_iters) {
    return reference_solve(inst, inst.zeros(), tol, max_iters);
}

ReferenceResult reference_solve(const ProblemInstance& inst, const GroupedVector& x0, double tol,
                                long max_iters) {
    if (x0.dim() != inst.dim()) throw DimensionError("start vector does not match problem dimension");
    const double lipschitz = power_method_lipschitz(inst.design());
    ReferenceResult result;
    result.step = lipschitz > 0.0 ? 0.9 / lipschitz : 1.0;
    const double tau = result.step;
    const GroupPartition& part = inst.partition();

    Vector x = x0.values();
    Vector next(x.size());
    for (long it = 1; it <= max_iters; ++it) {
        const Vector grad = inst.design().transpose() * (inst.design() * x - inst.response());
        const Vector v = x - tau * grad;
        for (Index g = 0; g < part.num_groups(); ++g) {
            next.segment(part.offset(g), part.size(g)) =
                moreau_prox(v.segment(part.offset(g), part.size(g)), tau * inst.lambda(), inst.q());
        }
        result.residual = (next - x).norm();
        x.swap(next);
        result.iterations = it;
        if (result.residual <= tol) {
            result.converged = true;
            break;
        }
    }
    result.x = GroupedVector(inst.partition_ptr(), x);
    result.objective = objective(inst, result.x);
    return result;
}

}  // namespace mixnorm::oracle
