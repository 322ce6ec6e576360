#include <doctest.h>

#include <cmath>

#include "mixnorm/solver.hpp"
#include "support.hpp"

using namespace mixnorm;

namespace {

SolverConfig tight() {
    SolverConfig cfg;
    cfg.tol = 1e-13;
    cfg.grad_map_tol = 1e-9;
    cfg.prox_delta = 1e-12;
    cfg.max_iters = 100000;
    return cfg;
}

}  // namespace

TEST_CASE("config validation") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.max_iters = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidParameterError);
    cfg = SolverConfig{};
    cfg.tol = -1.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidParameterError);
    cfg = SolverConfig{};
    cfg.prox_delta = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidParameterError);
}

TEST_CASE("zero solution at and above lambda_max") {
    Rng rng(51);
    for (const auto& q : testing::solver_exponents()) {
        const ProblemInstance inst = testing::random_instance(rng, 20, 30, 3, q, 1.0);
        for (double factor : {1.0, 1.5}) {
            const SolverResult r = solve(inst.with_lambda(factor * inst.lambda()), SolverConfig{});
            CHECK(r.x.values().isZero(0.0));
            CHECK(r.converged);
        }
    }
}

TEST_CASE("unregularized identity design recovers the response") {
    Rng rng(52);
    const Vector y = rng.normal_vector(6);
    const ProblemInstance inst(Matrix::Identity(6, 6), y, GroupPartition({2, 4}), Exponent::two(), 0.0);
    const SolverResult r = solve(inst, tight());
    CHECK((r.x.values() - y).norm() < 1e-8);
    CHECK(r.f_history.back() < 1e-15);
}

TEST_CASE("matches the reference solver") {
    Rng rng(53);
    const ProblemInstance inst = testing::random_instance(rng, 20, 40, 4, Exponent::two(), 0.1);
    const SolverResult fast = solve(inst, tight());
    const auto ref = oracle::reference_solve(inst);
    REQUIRE(ref.converged);
    CHECK(std::abs(fast.f_history.back() - ref.objective) <= 1e-6 * std::abs(ref.objective));
}

TEST_CASE("line search accepted L stays below twice the Lipschitz constant") {
    Rng rng(54);
    for (int trial = 0; trial < 20; ++trial) {
        const Exponent q = testing::solver_exponents()[static_cast<std::size_t>(trial) % 5];
        const ProblemInstance inst = testing::random_instance(rng, 15, 25, 3, q, 0.3);
        const double sigma = oracle::power_method_lipschitz(inst.design());
        const GroupedVector s(inst.partition_ptr(), rng.normal_vector(inst.dim()));
        SolverConfig cfg;
        const LineSearchResult step = line_search_step(s, 1e-3, inst, cfg);
        CHECK(step.L <= 2.0 * sigma * (1.0 + 1e-9));
        CHECK(step.L >= 1e-3);
        // Model inequality at acceptance.
        CHECK(step.f_next <= step.model_value + 1e-12 * std::abs(step.model_value));
        CHECK(step.f_next == doctest::Approx(objective(inst, step.x_next)).epsilon(1e-12));
    }
}

TEST_CASE("pure gradient step decreases the objective") {
    Rng rng(55);
    const ProblemInstance inst = testing::random_instance(rng, 15, 10, 2, Exponent::two(), 0.0).with_lambda(0.0);
    const double sigma = oracle::power_method_lipschitz(inst.design());
    GroupedVector x(inst.partition_ptr(), rng.normal_vector(10));
    for (int k = 0; k < 10; ++k) {
        const LineSearchResult step = line_search_step(x, sigma, inst, SolverConfig{});
        CHECK(step.L == sigma);
        CHECK(step.trials == 1);
        CHECK(step.f_next < objective(inst, x));
        x = step.x_next;
    }
}

TEST_CASE("line search failure is reported") {
    // A loss whose curvature grows without bound defeats the doubling search.
    struct Wild : SmoothLoss {
        Index dim() const override { return 1; }
        double value(const Vector& w) const override { return std::abs(w[0]) > 0 ? 1e300 : 0.0; }
        double value_and_gradient(const Vector& w, Vector& grad) const override {
            grad = Vector::Constant(1, -1.0);
            return value(w);
        }
    };
    Wild loss;
    auto part = std::make_shared<const GroupPartition>(GroupPartition::singletons(1));
    CHECK_THROWS_AS(line_search_step(loss, GroupedVector(part), 1.0, Exponent::two(), 0.0, SolverConfig{}),
                    LineSearchError);
}

TEST_CASE("running minimum never increases and rate sanity") {
    Rng rng(56);
    for (int trial = 0; trial < 5; ++trial) {
        const Exponent q = testing::solver_exponents()[static_cast<std::size_t>(trial)];
        const ProblemInstance inst = testing::random_instance(rng, 60, 50, 4, q, 0.3);
        SolverConfig cfg = tight();
        cfg.tol = 0.0;
        cfg.max_iters = 200;
        const SolverResult r = solve(inst, cfg);
        double best = r.f_history.front();
        for (double f : r.f_history) {
            const double next_best = std::min(best, f);
            CHECK(next_best <= best);
            best = next_best;
        }
        CHECK(r.f_history.size() == static_cast<std::size_t>(r.iterations) + 1);
        const double f_star = std::min(best, solve(inst, tight()).f_history.back());
        if (r.f_history.size() > 200) {
            const double gap100 = *std::min_element(r.f_history.begin(), r.f_history.begin() + 101) - f_star;
            const double gap200 = best - f_star;
            CHECK(gap200 <= 0.5 * gap100 + 1e-13 * std::abs(f_star));
        }
    }
}

TEST_CASE("KKT conditions at convergence") {
    Rng rng(57);
    for (int trial = 0; trial < 15; ++trial) {
        const Exponent q = testing::solver_exponents()[static_cast<std::size_t>(trial) % 5];
        const ProblemInstance inst = testing::random_instance(rng, 25, 40, 4, q, rng.uniform(0.1, 0.8));
        const SolverResult r = solve(inst, tight());
        CHECK(testing::kkt_residual(inst, r.x) <= 1e-4);
        const Vector resid = inst.response() - inst.design() * r.x.values();
        for (Index g = 0; g < inst.num_groups(); ++g) {
            const double dual = lp_norm(inst.block(g).transpose() * resid, q.dual());
            CHECK(dual <= inst.lambda() * (1.0 + 1e-4));
            if (r.x.group(g).norm() > 1e-8) {
                // Active groups attain the bound, pairing with w_i.
                CHECK(dual == doctest::Approx(inst.lambda()).epsilon(1e-4));
                const double pairing = (inst.block(g).transpose() * resid).dot(r.x.group(g));
                CHECK(pairing == doctest::Approx(inst.lambda() * lp_norm(r.x.group(g), q)).epsilon(1e-4));
            }
        }
    }
}

TEST_CASE("warm start agrees with cold start") {
    Rng rng(58);
    for (const auto& q : testing::solver_exponents()) {
        const ProblemInstance inst = testing::random_instance(rng, 30, 50, 5, q, 0.5);
        const SolverResult first = solve(inst, tight());
        const ProblemInstance next = inst.with_lambda(0.8 * inst.lambda());
        const SolverResult cold = solve(next, tight());
        const SolverResult warm = solve(next, tight(), first.x);
        CHECK(std::abs(cold.f_history.back() - warm.f_history.back()) <= 1e-8 * std::abs(cold.f_history.back()));
    }
}

TEST_CASE("solver input errors") {
    Rng rng(59);
    const ProblemInstance inst = testing::random_instance(rng, 5, 6, 2, Exponent::two(), 0.5);
    auto other = std::make_shared<const GroupPartition>(GroupPartition::singletons(3));
    CHECK_THROWS_AS(solve(inst, SolverConfig{}, GroupedVector(other)), DimensionError);
    GroupedVector bad(inst.partition_ptr(), Vector::Constant(6, std::numeric_limits<double>::infinity()));
    CHECK_THROWS_AS(solve(inst, SolverConfig{}, bad), DivergenceError);
}

TEST_CASE("default Lipschitz estimate") {
    const ProblemInstance zero(Matrix::Identity(2, 2), Vector::Zero(2), GroupPartition::singletons(2),
                               Exponent::two(), 0.0);
    CHECK(default_lipschitz_estimate(zero) == 1.0);
    Vector y(2);
    y << 1e-9, 0.0;
    const ProblemInstance tiny(Matrix::Identity(2, 2) * 1e-6, y, GroupPartition::singletons(2), Exponent::two(),
                               0.0);
    CHECK(default_lipschitz_estimate(tiny) == 1e-3);
}
