#pragma once

// Shared helpers for the unit and acceptance tests.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "mixnorm/model.hpp"
#include "mixnorm/oracle.hpp"
#include "mixnorm/screening.hpp"
#include "mixnorm/synth.hpp"

namespace testing {

using namespace mixnorm;

inline Index uniform_index(Rng& rng, Index lo, Index hi) {
    return lo + static_cast<Index>(rng.uniform() * static_cast<double>(hi - lo + 1));
}

/// Random group sizes in [1, max_size] summing to p.
inline GroupPartition random_partition(Rng& rng, Index p, Index max_size) {
    std::vector<Index> sizes;
    Index left = p;
    while (left > 0) {
        const Index s = std::min(left, uniform_index(rng, 1, max_size));
        sizes.push_back(s);
        left -= s;
    }
    return GroupPartition(sizes);
}

/// Gaussian design and response; lambda = ratio * lambda_max.
inline ProblemInstance random_instance(Rng& rng, Index m, Index p, Index max_group, const Exponent& q,
                                       double ratio) {
    Matrix B = rng.normal_matrix(m, p);
    Vector Y = rng.normal_vector(m);
    ProblemInstance inst(std::move(B), std::move(Y), random_partition(rng, p, max_group), q, 0.0);
    return inst.with_lambda(ratio * lambda_max(inst).value);
}

/// Largest per-group ||x_i - prox(x_i - grad_i l(x), lambda)||, using the
/// independent Moreau-identity prox.
inline double kkt_residual(const ProblemInstance& inst, const GroupedVector& x) {
    const Vector grad = gradient_ls(inst, x).values();
    double worst = 0.0;
    for (Index g = 0; g < x.num_groups(); ++g) {
        const Vector xi = x.group(g);
        const Vector step = xi - grad.segment(inst.partition().offset(g), inst.partition().size(g));
        worst = std::max(worst, (xi - oracle::moreau_prox(step, inst.lambda(), inst.q())).norm());
    }
    return worst;
}

/// || |x| + lambda ||x||_q^{1-q} |x|^{q-1} - |v| ||_inf for finite q > 1.
inline double prox_equation_residual(const Vector& v, const Vector& x, double lambda, double q) {
    const Vector a = x.cwiseAbs();
    double s = 0.0;
    for (Index i = 0; i < a.size(); ++i) s += std::pow(a[i], q);
    const double norm = std::pow(s, 1.0 / q);
    double worst = 0.0;
    for (Index i = 0; i < a.size(); ++i) {
        const double lhs = a[i] + lambda * std::pow(norm, 1.0 - q) * std::pow(a[i], q - 1.0);
        worst = std::max(worst, std::abs(lhs - std::abs(v[i])));
    }
    return worst;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline const std::vector<Exponent>& solver_exponents() {
    static const std::vector<Exponent> qs = {Exponent::one(), Exponent::general(1.5), Exponent::two(),
                                             Exponent::general(3.0), Exponent::infinity()};
    return qs;
}

}  // namespace testing
