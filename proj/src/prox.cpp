#include "mixnorm/prox.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>

namespace mixnorm {

namespace {

// x^e for x > 0 via exp/log; the reduced problem never evaluates x <= 0.
inline double pos_pow(double x, double e) {
    assert(x >= 0.0);
    if (x <= 0.0) return 0.0;
    return std::exp(e * std::log(x));
}

// h(x) = x + c x^{q-1} - v, strictly increasing on [0, v].
inline double aux_h(double x, double v, double c, double q) {
    return x + c * pos_pow(x, q - 1.0) - v;
}

struct Bracket {
    double lo;
    double hi;
    double mid() const { return 0.5 * (lo + hi); }
};

// Bisection for the root of aux_h on [lo, hi], stopping once the width is
// below tol * hi. tol == 0 runs until the bracket cannot be split further.
Bracket bisect_h(double lo, double hi, double v, double c, double q, double tol) {
    // Cached brackets can be off by rounding; widen to the full (0, v) range.
    if (aux_h(lo, v, c, q) > 0.0) lo = 0.0;
    if (aux_h(hi, v, c, q) < 0.0) hi = v;
    while (hi - lo > tol * hi) {
        const double m = 0.5 * (lo + hi);
        if (m <= lo || m >= hi) break;
        if (aux_h(m, v, c, q) > 0.0) {
            hi = m;
        } else {
            lo = m;
        }
    }
    return {lo, hi};
}

double psi_from(const Vector& x, double q) {
    double sum = 0.0;
    for (Index i = 0; i < x.size(); ++i) sum += pos_pow(x[i], q);
    return pos_pow(sum, (1.0 - q) / q);
}

double dual_norm_general(const Eigen::Ref<const Vector>& v, double q) {
    const double qbar = q / (q - 1.0);
    return lp_norm(v, Exponent::general(qbar));
}

void check_positive_input(const Eigen::Ref<const Vector>& v_pos, double lambda, double q) {
    if (v_pos.size() == 0) throw InputError("empty vector");
    if (!v_pos.allFinite()) throw InputError("non-finite input vector");
    if ((v_pos.array() <= 0.0).any()) throw InputError("reduced vector must be strictly positive");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidParameterError("lambda must be positive");
    if (!(q > 1.0) || !std::isfinite(q)) throw InvalidExponentError("q must lie in (1, inf)");
}

template <class E>
[[noreturn]] void rethrow_with_group(const E& e, Index g) {
    throw E("group " + std::to_string(g) + ": " + e.what());
}

}  // namespace

void ProxParams::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidParameterError("prox lambda must be positive and finite");
    }
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw InvalidParameterError("prox tolerance delta must be positive");
    }
}

bool prox_is_zero(const Eigen::Ref<const Vector>& v, double lambda, const Exponent& q) {
    return lambda >= (1.0 - kZeroThresholdSlack) * lp_norm(v, q.dual());
}

Vector soft_threshold(const Eigen::Ref<const Vector>& v, double lambda) {
    Vector x(v.size());
    for (Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]) - lambda;
        x[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
    }
    return x;
}

Vector prox_l2(const Eigen::Ref<const Vector>& v, double lambda) {
    const double norm = v.norm();
    if (lambda >= (1.0 - kZeroThresholdSlack) * norm) return Vector::Zero(v.size());
    return ((norm - lambda) / norm) * v;
}

double l1_ball_threshold(const Eigen::Ref<const Vector>& v, double lambda) {
    std::vector<double> a(static_cast<std::size_t>(v.size()));
    for (Index i = 0; i < v.size(); ++i) a[static_cast<std::size_t>(i)] = std::abs(v[i]);
    std::sort(a.begin(), a.end(), std::greater<>());
    double cumulative = 0.0;
    const std::size_t n = a.size();
    for (std::size_t k = 0; k < n; ++k) {
        cumulative += a[k];
        const double t = (cumulative - lambda) / static_cast<double>(k + 1);
        const double next = k + 1 < n ? a[k + 1] : 0.0;
        if (t >= next) return std::max(t, 0.0);
    }
    return 0.0;
}

Vector prox_inf(const Eigen::Ref<const Vector>& v, double lambda) {
    if (lambda >= (1.0 - kZeroThresholdSlack) * v.lpNorm<1>()) return Vector::Zero(v.size());
    const double t = l1_ball_threshold(v, lambda);
    Vector x(v.size());
    for (Index i = 0; i < v.size(); ++i) {
        x[i] = std::abs(v[i]) <= t ? v[i] : std::copysign(t, v[i]);
    }
    return x;
}

OuterBracket outer_bracket(const Eigen::Ref<const Vector>& v_pos, double lambda, double q) {
    check_positive_input(v_pos, lambda, q);
    const double norm = dual_norm_general(v_pos, q);
    if (!(lambda < norm)) {
        throw InvalidParameterError("general-q solve requires lambda < ||v||_qbar");
    }
    // 1 - eps = lambda / norm is formed directly to keep precision when lambda is small.
    const double eps = (norm - lambda) / norm;
    const double log_one_minus_eps = std::log(lambda) - std::log(norm);
    const double log_eps = std::log(eps);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (Index i = 0; i < v_pos.size(); ++i) {
        const double ci =
            std::exp(log_one_minus_eps - (q - 1.0) * log_eps - (q - 2.0) * std::log(v_pos[i]));
        lo = std::min(lo, ci);
        hi = std::max(hi, ci);
    }
    return {lo, hi, eps};
}

double omega_inverse(double v, double c, double q) {
    return bisect_h(0.0, v, v, c, q, 0.0).mid();
}

double outer_function(const Eigen::Ref<const Vector>& v_pos, double lambda, double q, double c) {
    check_positive_input(v_pos, lambda, q);
    Vector x(v_pos.size());
    for (Index i = 0; i < v_pos.size(); ++i) x[i] = omega_inverse(v_pos[i], c, q);
    return lambda * psi_from(x, q) - c;
}

Vector prox_general_q(const Eigen::Ref<const Vector>& v_pos, double lambda, double q, double delta,
                      GeneralQTrace* trace) {
    check_positive_input(v_pos, lambda, q);
    if (!(delta > 0.0)) throw InvalidParameterError("delta must be positive");

    const double scale = v_pos.maxCoeff();
    const Vector u = v_pos / scale;
    const double lam = lambda / scale;
    const Index n = u.size();

    const OuterBracket bracket = outer_bracket(u, lam, q);
    ZeroFindState state;
    state.c_lo = bracket.c_lo;
    state.c_hi = bracket.c_hi;
    state.x_lo.resize(n);
    state.x_hi.resize(n);

    // omega_i^{-1}(c_i) = u_i eps, so the endpoint roots sit on either side of it.
    Vector x_at_lo(n), x_at_hi(n);
    for (Index i = 0; i < n; ++i) {
        const double pivot = u[i] * bracket.eps;
        const Bracket upper = bisect_h(pivot, u[i], u[i], state.c_lo, q, delta);
        const Bracket lower = bisect_h(0.0, pivot, u[i], state.c_hi, q, delta);
        state.x_hi[i] = upper.hi;
        state.x_lo[i] = lower.lo;
        x_at_lo[i] = upper.mid();
        x_at_hi[i] = lower.mid();
    }

    const double phi_lo = lam * psi_from(x_at_lo, q) - state.c_lo;
    const double phi_hi = lam * psi_from(x_at_hi, q) - state.c_hi;
    constexpr double kBracketSlack = 1e-6;
    if (phi_lo < -kBracketSlack * std::max(1.0, state.c_lo) ||
        phi_hi > kBracketSlack * std::max(1.0, state.c_hi)) {
        throw InternalError("outer bracket does not enclose the root of phi (phi(c_lo)=" +
                            std::to_string(phi_lo) + ", phi(c_hi)=" + std::to_string(phi_hi) + ")");
    }

    double root = 0.0;
    int iterations = 0;
    if (phi_lo <= 0.0) {
        root = state.c_lo;
        state.c_hi = state.c_lo;
    } else if (phi_hi >= 0.0) {
        root = state.c_hi;
        state.c_lo = state.c_hi;
    } else {
        bool found = false;
        Vector x(n);
        Vector x_lower(n), x_upper(n);
        constexpr int kMaxOuter = 400;
        while (iterations < kMaxOuter) {
            if (state.c_hi - state.c_lo <= delta * std::max(1.0, state.c_lo)) break;
            const double c = 0.5 * (state.c_lo + state.c_hi);
            if (c <= state.c_lo || c >= state.c_hi) break;
            ++iterations;
            for (Index i = 0; i < n; ++i) {
                const Bracket b = bisect_h(state.x_lo[i], state.x_hi[i], u[i], c, q, delta);
                x_lower[i] = b.lo;
                x_upper[i] = b.hi;
                x[i] = b.mid();
            }
            const double phi = lam * psi_from(x, q) - c;
            if (std::abs(phi) <= 1e-12) {
                root = c;
                found = true;
                if (trace) trace->history.push_back(state);
                break;
            }
            if (phi > 0.0) {
                state.c_lo = c;
                state.x_hi = x_upper;
            } else {
                state.c_hi = c;
                state.x_lo = x_lower;
            }
            if (trace) trace->history.push_back(state);
        }
        if (!found) root = 0.5 * (state.c_lo + state.c_hi);
    }

    Vector result(n);
    for (Index i = 0; i < n; ++i) {
        result[i] = scale * bisect_h(state.x_lo[i], state.x_hi[i], u[i], root, q, 0.0).mid();
    }
    if (trace) {
        trace->root = root * std::pow(scale, 2.0 - q);
        trace->outer_iterations = iterations;
    }
    return result;
}

Vector prox_group(const Eigen::Ref<const Vector>& v, const ProxParams& params) {
    params.validate();
    if (v.size() == 0) return Vector(0);
    if (!v.allFinite()) throw InputError("non-finite input to prox");
    if (prox_is_zero(v, params.lambda, params.q)) return Vector::Zero(v.size());

    switch (params.q.kind()) {
        case Exponent::Kind::one: return soft_threshold(v, params.lambda);
        case Exponent::Kind::two: return prox_l2(v, params.lambda);
        case Exponent::Kind::infinity: return prox_inf(v, params.lambda);
        case Exponent::Kind::general: break;
    }

    // Strip zeros, solve on |v|, restore signs.
    std::vector<Index> support;
    support.reserve(static_cast<std::size_t>(v.size()));
    for (Index i = 0; i < v.size(); ++i) {
        if (v[i] != 0.0) support.push_back(i);
    }
    Vector reduced(static_cast<Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) reduced[static_cast<Index>(k)] = std::abs(v[support[k]]);

    const Vector solved = prox_general_q(reduced, params.lambda, params.q.value(), params.delta);
    Vector x = Vector::Zero(v.size());
    for (std::size_t k = 0; k < support.size(); ++k) {
        x[support[k]] = std::copysign(solved[static_cast<Index>(k)], v[support[k]]);
    }
    return x;
}

GroupedVector prox_all(const GroupedVector& v, double lambda, const Exponent& q, double delta) {
    if (lambda == 0.0) return v;
    const ProxParams params{lambda, q, delta};
    params.validate();
    GroupedVector out(v.partition_ptr());
    for (Index g = 0; g < v.num_groups(); ++g) {
        try {
            out.group(g) = prox_group(v.group(g), params);
        } catch (const InputError& e) {
            rethrow_with_group(e, g);
        } catch (const InternalError& e) {
            rethrow_with_group(e, g);
        } catch (const InvalidParameterError& e) {
            rethrow_with_group(e, g);
        }
    }
    return out;
}

}  // namespace mixnorm
