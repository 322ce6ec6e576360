#include "mixnorm/path.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "mixnorm/screening.hpp"

namespace mixnorm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::vector<double> linear_grid(int n, double hi, double lo) {
    if (n < 1) throw InvalidParameterError("grid needs at least one point");
    if (n == 1) return {hi};
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        grid[static_cast<std::size_t>(i)] = hi - (hi - lo) * static_cast<double>(i) / (n - 1);
    }
    return grid;
}

std::vector<double> geometric_grid(int n, double factor) {
    if (n < 1) throw InvalidParameterError("grid needs at least one point");
    if (!(factor > 0.0 && factor < 1.0)) throw InvalidParameterError("grid factor must lie in (0, 1)");
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = std::pow(factor, i);
    return grid;
}

void PathSpec::validate() const {
    if (ratios.empty()) throw InvalidParameterError("path needs at least one ratio");
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        const double r = ratios[i];
        if (!(r > 0.0 && r <= 1.0)) {
            throw InvalidParameterError("ratio at position " + std::to_string(i) + " is outside (0, 1]");
        }
        if (i > 0 && !(r < ratios[i - 1])) {
            throw InvalidParameterError("ratios must be strictly decreasing (position " + std::to_string(i) + ")");
        }
    }
    solver.validate();
}

PathResult run_path(const ProblemInstance& inst, const PathSpec& spec) {
    spec.validate();
    const auto path_start = Clock::now();

    PathResult result;
    result.seed = spec.seed;

    auto screen_start = Clock::now();
    std::optional<SequentialScreener> screener;
    if (spec.screening) {
        screener.emplace(inst);
        result.lambda_max = screener->lmax().value;
    } else {
        result.lambda_max = lambda_max(inst).value;
    }
    const double setup_time = spec.screening ? seconds_since(screen_start) : 0.0;
    result.total_screen_time += setup_time;

    SolverConfig solver_cfg = spec.solver;
    if (solver_cfg.L0 <= 0.0) solver_cfg.L0 = default_lipschitz_estimate(inst);

    GroupedVector previous = inst.zeros();
    for (std::size_t k = 0; k < spec.ratios.size(); ++k) {
        PathPoint point;
        point.ratio = spec.ratios[k];
        point.lambda = point.ratio * result.lambda_max;
        const ProblemInstance at_lambda = inst.with_lambda(point.lambda);

        GroupedVector solution = inst.zeros();
        try {
            if (result.lambda_max <= 0.0) {
                point.groups_kept = 0;
                point.groups_discarded = inst.num_groups();
            } else if (spec.screening) {
                screen_start = Clock::now();
                const GroupMask mask = screener->screen(point.lambda);
                point.screen_time = seconds_since(screen_start);
                point.groups_discarded = static_cast<Index>(count_discarded(mask));
                point.groups_kept = inst.num_groups() - point.groups_discarded;

                const auto solve_start = Clock::now();
                if (point.groups_kept > 0) {
                    const ReducedProblem reduced = restrict_problem(at_lambda, mask);
                    const GroupedVector warm =
                        restrict_vector(previous, reduced.kept, reduced.instance.partition_ptr());
                    const SolverResult solved = solve(reduced.instance, solver_cfg, warm);
                    solution = embed_vector(solved.x, reduced.kept, inst.partition_ptr());
                    point.iterations = solved.iterations;
                }
                point.solve_time = seconds_since(solve_start);

                screen_start = Clock::now();
                screener->advance(point.lambda, solution);
                point.screen_time += seconds_since(screen_start);
                point.rejection_ratio = rejection_ratio(mask, solution);
            } else {
                const auto solve_start = Clock::now();
                const SolverResult solved = solve(at_lambda, solver_cfg, previous);
                point.solve_time = seconds_since(solve_start);
                solution = solved.x;
                point.iterations = solved.iterations;
                point.groups_kept = inst.num_groups();
                point.rejection_ratio =
                    rejection_ratio(GroupMask(static_cast<std::size_t>(inst.num_groups()), false), solution);
            }
        } catch (const Error& e) {
            throw Error("path position " + std::to_string(k) + " (ratio " + std::to_string(point.ratio) +
                        "): " + e.what());
        }
        point.objective = objective(at_lambda, solution);
        result.total_solve_time += point.solve_time;
        result.total_screen_time += point.screen_time;
        result.points.push_back(point);
        if (spec.keep_solutions) result.solutions.push_back(solution);
        previous = std::move(solution);
    }
    result.total_time = seconds_since(path_start);
    return result;
}

MultiTaskProblem MultiTaskProblem::build(const Matrix& A, const Matrix& Y, const Exponent& q, double lambda) {
    if (A.rows() != Y.rows()) throw DimensionError("A and Y must have the same number of rows");
    const Index m = A.rows();
    const Index d = A.cols();
    const Index k = Y.cols();
    // Coefficient index j * k + t holds W(j, t); response index t * m + r holds Y(r, t).
    Matrix design = Matrix::Zero(m * k, d * k);
    for (Index j = 0; j < d; ++j) {
        for (Index t = 0; t < k; ++t) design.block(t * m, j * k + t, m, 1) = A.col(j);
    }
    Vector response(m * k);
    for (Index t = 0; t < k; ++t) response.segment(t * m, m) = Y.col(t);
    return {d, k, ProblemInstance(std::move(design), std::move(response), GroupPartition::uniform(d, k), q, lambda)};
}

Matrix MultiTaskProblem::unflatten(const GroupedVector& w) const {
    if (w.dim() != d * k) throw DimensionError("flattened coefficients have the wrong length");
    Matrix W(d, k);
    for (Index j = 0; j < d; ++j) W.row(j) = w.group(j).transpose();
    return W;
}

GroupedVector MultiTaskProblem::flatten(const Matrix& W) const {
    if (W.rows() != d || W.cols() != k) throw DimensionError("coefficient matrix must be d x k");
    GroupedVector w(instance.partition_ptr());
    for (Index j = 0; j < d; ++j) w.group(j) = W.row(j).transpose();
    return w;
}

RecoveryReport recovery_experiment(const RecoverySpec& spec) {
    const JointSparseData data = gen_joint_sparse(spec.synth);
    const MultiTaskProblem problem = MultiTaskProblem::build(data.A, data.Y, spec.q);

    PathSpec path_spec;
    path_spec.ratios = geometric_grid(spec.grid_points, spec.grid_factor);
    path_spec.screening = spec.screening;
    path_spec.solver = spec.solver;
    path_spec.seed = spec.synth.seed;
    path_spec.keep_solutions = true;

    RecoveryReport report;
    report.path = run_path(problem.instance, path_spec);
    report.lambda_max = report.path.lambda_max;
    for (std::size_t i = 0; i < report.path.points.size(); ++i) {
        const Matrix W = problem.unflatten(report.path.solutions[i]);
        report.ratios.push_back(report.path.points[i].ratio);
        report.lambdas.push_back(report.path.points[i].lambda);
        report.errors.push_back((W - data.X_true).norm());
        if (report.errors.back() < report.errors[report.best_index]) report.best_index = i;
    }
    report.final_solution = problem.unflatten(report.path.solutions.back());
    report.final_row_norms = report.final_solution.rowwise().norm();
    return report;
}

}  // namespace mixnorm
