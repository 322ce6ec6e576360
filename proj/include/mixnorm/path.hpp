#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixnorm/model.hpp"
#include "mixnorm/solver.hpp"
#include "mixnorm/synth.hpp"

namespace mixnorm {

/// n points equally spaced from hi down to lo (91 points on [0.1, 1] by default).
std::vector<double> linear_grid(int n = 91, double hi = 1.0, double lo = 0.1);
/// factor^{i-1} for i = 1..n.
std::vector<double> geometric_grid(int n, double factor = 0.9);

struct PathSpec {
    /// lambda / lambda_max, strictly decreasing in (0, 1].
    std::vector<double> ratios = linear_grid();
    bool screening = true;
    SolverConfig solver;
    /// Seed of the data the path runs on, carried into the result.
    std::optional<std::uint64_t> seed;
    bool keep_solutions = true;

    void validate() const;
};

struct PathPoint {
    double ratio = 0.0;
    double lambda = 0.0;
    double objective = 0.0;
    int iterations = 0;
    double solve_time = 0.0;
    double screen_time = 0.0;
    Index groups_kept = 0;
    Index groups_discarded = 0;
    /// Discarded groups over groups that are zero in the solution.
    double rejection_ratio = 0.0;
};

struct PathResult {
    double lambda_max = 0.0;
    std::vector<PathPoint> points;
    std::vector<GroupedVector> solutions;  // empty unless keep_solutions
    double total_solve_time = 0.0;
    double total_screen_time = 0.0;
    double total_time = 0.0;
    std::optional<std::uint64_t> seed;
    std::string rng = Rng::kName;
};

/// Warm-started path over spec.ratios. With screening on, each lambda is
/// screened from the previous solution's dual point and only the surviving
/// groups are passed to the solver.
PathResult run_path(const ProblemInstance& inst, const PathSpec& spec);

/// Multi-task least squares 1/2 ||A W - Y||_F^2 + lambda sum_j ||W^j||_q over
/// the rows W^j, expressed as one grouped problem: coefficients are W flattened
/// row by row (group j = row j) and the design is block diagonal with k copies
/// of A acting on the stacked columns of Y.
struct MultiTaskProblem {
    Index d = 0;
    Index k = 0;
    ProblemInstance instance;

    static MultiTaskProblem build(const Matrix& A, const Matrix& Y, const Exponent& q, double lambda = 0.0);
    Matrix unflatten(const GroupedVector& w) const;
    GroupedVector flatten(const Matrix& W) const;
};

struct RecoverySpec {
    SynthSpec synth;
    Exponent q = Exponent::two();
    int grid_points = 100;
    double grid_factor = 0.9;
    bool screening = false;
    SolverConfig solver;
};

struct RecoveryReport {
    double lambda_max = 0.0;
    std::vector<double> ratios;
    std::vector<double> lambdas;
    /// ||X - X_true||_F at each lambda.
    std::vector<double> errors;
    std::size_t best_index = 0;
    Matrix final_solution;
    /// l2 norm of each row of the final solution.
    Vector final_row_norms;
    PathResult path;
};

RecoveryReport recovery_experiment(const RecoverySpec& spec);

}  // namespace mixnorm
