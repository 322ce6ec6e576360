#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "mixnorm/io.hpp"
#include "mixnorm/oracle.hpp"
#include "mixnorm/path.hpp"
#include "mixnorm/prox.hpp"
#include "mixnorm/screening.hpp"
#include "mixnorm/solver.hpp"
#include "mixnorm/synth.hpp"

namespace mixnorm::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Raised for bad flag values detected after CLI11 parsing.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProblemFiles {
    std::string matrix;
    std::string response;
    std::string groups;
    std::string q = "2";
};

void add_problem_options(CLI::App& cmd, ProblemFiles& files, bool required) {
    auto* m = cmd.add_option("--matrix", files.matrix, "Design matrix B as headerless CSV (m rows, p columns)");
    auto* r = cmd.add_option("--response", files.response, "Response Y as a single-column CSV");
    cmd.add_option("--groups", files.groups, "Group sizes, one per line (default: singleton groups)");
    cmd.add_option("--q", files.q, "Mixed-norm exponent q >= 1 or 'inf'")->capture_default_str();
    if (required) {
        m->required();
        r->required();
    }
}

Exponent parse_exponent(const std::string& text) {
    // Malformed text is a usage error; a number outside [1, inf] is a validation error.
    try {
        return Exponent::parse(text);
    } catch (const InvalidExponentError& e) {
        char* end = nullptr;
        std::strtod(text.c_str(), &end);
        if (text.empty() || *end != '\0') throw UsageError(e.what());
        throw;
    }
}

ProblemInstance load_problem(const ProblemFiles& files) {
    const Exponent q = parse_exponent(files.q);
    Matrix design = io::read_matrix_csv(fs::path(files.matrix));
    Vector response = io::read_vector_csv(fs::path(files.response));
    GroupPartition partition = files.groups.empty() ? GroupPartition::singletons(design.cols())
                                                    : io::read_groups(fs::path(files.groups));
    return ProblemInstance(std::move(design), std::move(response), std::move(partition), q, 0.0);
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("cannot parse number '" + item + "'");
        }
    }
    return values;
}

// "a,b,c" or "start:stop:count".
std::vector<double> parse_ratios(const std::string& text) {
    if (std::count(text.begin(), text.end(), ':') == 2) {
        std::string spec = text;
        std::replace(spec.begin(), spec.end(), ':', ',');
        const auto parts = parse_number_list(spec);
        const int count = static_cast<int>(parts[2]);
        if (count < 1 || parts[2] != count) throw UsageError("range count must be a positive integer");
        return linear_grid(count, parts[0], parts[1]);
    }
    return parse_number_list(text);
}

std::vector<double> parse_grid(const std::string& text) {
    if (text == "linear91") return linear_grid(91, 1.0, 0.1);
    if (text == "geo09") return geometric_grid(100, 0.9);
    if (text.rfind("geo09:", 0) == 0) {
        const auto n = parse_number_list(text.substr(6));
        if (n.size() != 1 || n[0] < 1 || n[0] != static_cast<int>(n[0])) throw UsageError("bad geo09 point count");
        return geometric_grid(static_cast<int>(n[0]), 0.9);
    }
    if (text.rfind("custom:", 0) == 0) return parse_ratios(text.substr(7));
    throw UsageError("unknown grid '" + text + "' (expected linear91, geo09[:N] or custom:...)");
}

bool parse_on_off(const std::string& text) {
    if (text == "on") return true;
    if (text == "off") return false;
    throw UsageError("expected 'on' or 'off', got '" + text + "'");
}

std::string number(double x) { return io::format_number(x, 15); }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
}

// key=value lines with '#' comments.
std::map<std::string, std::string> read_key_values(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

struct SynthOptions {
    std::string preset = "screening";
    SynthSpec spec;
    std::string entry_dist = "standard_normal";
};

void apply_synth_keys(const std::map<std::string, std::string>& kv, SynthOptions& opt) {
    for (const auto& [key, value] : kv) {
        try {
            if (key == "preset") opt.preset = value;
            else if (key == "m") opt.spec.m = std::stol(value);
            else if (key == "d") opt.spec.d = std::stol(value);
            else if (key == "k") opt.spec.k = std::stol(value);
            else if (key == "d_tilde") opt.spec.d_tilde = std::stol(value);
            else if (key == "sigma") opt.spec.sigma = std::stod(value);
            else if (key == "entry_dist") opt.entry_dist = value;
            else if (key == "p") opt.spec.p = std::stol(value);
            else if (key == "groups") opt.spec.groups = std::stol(value);
            else if (key == "corr_lo") opt.spec.corr_lo = std::stod(value);
            else if (key == "corr_hi") opt.spec.corr_hi = std::stod(value);
            else if (key == "seed") opt.spec.seed = std::stoull(value);
            else throw UsageError("unknown synthetic spec key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw UsageError("bad value for '" + key + "': " + value);
        } catch (const std::out_of_range&) {
            throw UsageError("value out of range for '" + key + "': " + value);
        }
    }
}

// Builds the grouped instance a synthetic spec describes; joint-sparse data is
// flattened into the multi-task form.
ProblemInstance synthetic_instance(SynthOptions opt, const Exponent& q) {
    opt.spec.entry_dist = parse_entry_dist(opt.entry_dist);
    if (opt.preset == "screening") return gen_screening_instance(opt.spec, q);
    if (opt.preset == "joint-sparse") {
        const JointSparseData data = gen_joint_sparse(opt.spec);
        return MultiTaskProblem::build(data.A, data.Y, q).instance;
    }
    throw UsageError("unknown preset '" + opt.preset + "' (expected joint-sparse or screening)");
}

void add_solver_options(CLI::App& cmd, SolverConfig& cfg) {
    cmd.add_option("--tol", cfg.tol, "Relative objective change tolerance")->capture_default_str();
    cmd.add_option("--max-iters", cfg.max_iters, "Iteration cap per solve")->capture_default_str();
    cmd.add_option("--grad-tol", cfg.grad_map_tol, "Also require L ||X_{k+1} - S_k|| <= this (0 disables)")
        ->capture_default_str();
    cmd.add_option("--L0", cfg.L0, "Initial Lipschitz estimate (<= 0 picks a heuristic)");
    cmd.add_option("--delta", cfg.prox_delta, "Bisection tolerance of the prox")->capture_default_str();
}

void write_stats_csv(std::ostream& out, const PathResult& result) {
    out << "ratio,lambda,objective,iterations,groups_kept,groups_discarded,rejection_ratio,screen_time,solve_time\n";
    for (const auto& p : result.points) {
        out << number(p.ratio) << ',' << number(p.lambda) << ',' << number(p.objective) << ',' << p.iterations
            << ',' << p.groups_kept << ',' << p.groups_discarded << ',' << number(p.rejection_ratio) << ','
            << number(p.screen_time) << ',' << number(p.solve_time) << '\n';
    }
}

json path_summary_json(const PathResult& result, bool screening, const Exponent& q) {
    json j;
    j["lambda_max"] = result.lambda_max;
    j["points"] = result.points.size();
    j["screening"] = screening;
    j["q"] = q.to_string();
    j["total_time"] = result.total_time;
    j["total_solve_time"] = result.total_solve_time;
    j["total_screen_time"] = result.total_screen_time;
    j["rng"] = result.rng;
    if (result.seed) j["seed"] = *result.seed;
    double mean_rejection = 0.0;
    for (const auto& p : result.points) mean_rejection += p.rejection_ratio;
    if (!result.points.empty()) mean_rejection /= static_cast<double>(result.points.size());
    j["mean_rejection_ratio"] = mean_rejection;
    return j;
}

void print_summary(std::ostream& out, const json& j, bool as_json) {
    if (as_json) {
        out << j.dump() << '\n';
        return;
    }
    for (const auto& [key, value] : j.items()) {
        out << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
    }
}

double resolve_lambda(const ProblemInstance& inst, std::optional<double> lambda, std::optional<double> ratio) {
    if (lambda) {
        if (!(*lambda >= 0.0)) throw InvalidParameterError("--lambda must be nonnegative");
        return *lambda;
    }
    if (ratio) {
        if (!(*ratio >= 0.0)) throw InvalidParameterError("--ratio must be nonnegative");
        return *ratio * lambda_max(inst).value;
    }
    throw UsageError("one of --lambda or --ratio is required");
}

void apply_thread_cap(std::ostream& err) {
    if (const char* env = std::getenv("MIXNORM_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || n < 1) {
            err << "warning: ignoring invalid MIXNORM_THREADS='" << env << "'\n";
        } else {
            Eigen::setNbThreads(static_cast<int>(n));
        }
    }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Solvers, screening and path tools for l1/lq mixed-norm regularized least squares", "mixnorm"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value configuration file");
    bool as_json = false;
    app.add_flag("--json", as_json, "Mirror summary statistics as a JSON object on stdout");

    std::function<void()> action;

    // prox
    auto* prox_cmd = app.add_subcommand("prox", "Evaluate the l_q-regularized Euclidean projection of a vector");
    std::string prox_q = "2";
    double prox_lambda = 0.0;
    double prox_delta = 1e-8;
    std::string prox_input, prox_output, prox_groups;
    int digits = 15;
    prox_cmd->add_option("--q", prox_q, "Exponent q >= 1 or 'inf'")->capture_default_str();
    prox_cmd->add_option("--lambda", prox_lambda, "Regularization weight (> 0)")->required();
    prox_cmd->add_option("--delta", prox_delta, "Bisection tolerance")->capture_default_str();
    prox_cmd->add_option("--input", prox_input, "Vector CSV (default: stdin)");
    prox_cmd->add_option("--output", prox_output, "Output CSV (default: stdout)");
    prox_cmd->add_option("--groups", prox_groups, "Group sizes; applies the projection blockwise");
    prox_cmd->add_option("--digits", digits, "Significant digits in output (0 = shortest exact)")->capture_default_str();
    prox_cmd->callback([&] {
        action = [&] {
            const Exponent q = parse_exponent(prox_q);
            if (!(prox_lambda > 0.0)) throw InvalidParameterError("--lambda must be positive");
            Matrix raw = prox_input.empty() ? io::read_matrix_csv(in) : io::read_matrix_csv(fs::path(prox_input));
            const bool as_row = raw.rows() == 1;
            if (raw.rows() != 1 && raw.cols() != 1) throw IoError("prox input must be a single row or column");
            const Vector v = as_row ? Vector(raw.row(0).transpose()) : Vector(raw.col(0));
            Vector x;
            if (prox_groups.empty()) {
                x = prox_group(v, ProxParams{prox_lambda, q, prox_delta});
            } else {
                auto part = std::make_shared<const GroupPartition>(io::read_groups(fs::path(prox_groups)));
                x = prox_all(GroupedVector(part, v), prox_lambda, q, prox_delta).values();
            }
            std::ofstream file;
            if (!prox_output.empty()) {
                file.open(prox_output);
                if (!file) throw IoError("cannot write " + prox_output);
            }
            std::ostream& sink = prox_output.empty() ? out : file;
            if (as_row) {
                io::write_row_csv(sink, x, digits);
            } else {
                io::write_vector_csv(sink, x, digits);
            }
        };
    });

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "Solve one l1/lq regularized least-squares problem");
    ProblemFiles solve_files;
    SolverConfig solve_cfg;
    std::optional<double> solve_lambda, solve_ratio;
    std::string solve_out, solve_history;
    add_problem_options(*solve_cmd, solve_files, true);
    auto* lam_opt = solve_cmd->add_option("--lambda", solve_lambda, "Absolute regularization weight");
    auto* ratio_opt = solve_cmd->add_option("--ratio", solve_ratio, "Weight relative to lambda_max");
    lam_opt->excludes(ratio_opt);
    add_solver_options(*solve_cmd, solve_cfg);
    solve_cmd->add_option("--out", solve_out, "Solution CSV");
    solve_cmd->add_option("--history", solve_history, "Objective history CSV");
    solve_cmd->callback([&] {
        action = [&] {
            ProblemInstance inst = load_problem(solve_files);
            inst = inst.with_lambda(resolve_lambda(inst, solve_lambda, solve_ratio));
            const SolverResult result = solve(inst, solve_cfg);
            if (!solve_out.empty()) io::write_vector_csv(fs::path(solve_out), result.x.values(), digits);
            if (!solve_history.empty()) {
                io::write_vector_csv(fs::path(solve_history),
                                     Eigen::Map<const Vector>(result.f_history.data(),
                                                              static_cast<Index>(result.f_history.size())),
                                     digits);
            }
            Index nonzero = 0;
            for (Index g = 0; g < result.x.num_groups(); ++g) nonzero += result.x.group(g).norm() > 0.0 ? 1 : 0;
            json j;
            j["lambda"] = inst.lambda();
            j["lambda_max"] = lambda_max(inst).value;
            j["objective"] = result.f_history.back();
            j["iterations"] = result.iterations;
            j["converged"] = result.converged;
            j["L"] = result.L;
            j["nonzero_groups"] = nonzero;
            print_summary(out, j, as_json);
        };
    });

    // screen
    auto* screen_cmd = app.add_subcommand("screen", "Sequential safe screening along a lambda grid");
    ProblemFiles screen_files;
    SolverConfig screen_cfg;
    std::string screen_ratios = "1:0.1:91";
    std::string screen_report;
    add_problem_options(*screen_cmd, screen_files, true);
    screen_cmd->add_option("--ratios", screen_ratios, "Comma list or start:stop:count of lambda/lambda_max")
        ->capture_default_str();
    screen_cmd->add_option("--report", screen_report, "CSV report path");
    add_solver_options(*screen_cmd, screen_cfg);
    screen_cmd->callback([&] {
        action = [&] {
            const ProblemInstance inst = load_problem(screen_files);
            PathSpec spec;
            spec.ratios = parse_ratios(screen_ratios);
            spec.screening = true;
            spec.solver = screen_cfg;
            spec.keep_solutions = false;
            const PathResult result = run_path(inst, spec);
            if (!screen_report.empty()) {
                std::ofstream report(screen_report);
                if (!report) throw IoError("cannot write " + screen_report);
                report << "lambda,rejection_ratio,groups_kept,screen_time,solve_time\n";
                for (const auto& p : result.points) {
                    report << number(p.lambda) << ',' << number(p.rejection_ratio) << ',' << p.groups_kept << ','
                           << number(p.screen_time) << ',' << number(p.solve_time) << '\n';
                }
            }
            print_summary(out, path_summary_json(result, true, inst.q()), as_json);
        };
    });

    // path
    auto* path_cmd = app.add_subcommand("path", "Warm-started regularization path with optional screening");
    ProblemFiles path_files;
    SolverConfig path_cfg;
    std::string path_synthetic, path_grid = "linear91", path_screening = "on", path_out_dir;
    bool save_solutions = false;
    add_problem_options(*path_cmd, path_files, false);
    path_cmd->add_option("--synthetic", path_synthetic, "Synthetic spec file (key=value) instead of data files");
    path_cmd->add_option("--grid", path_grid, "linear91 | geo09[:N] | custom:<list or start:stop:count>")
        ->capture_default_str();
    path_cmd->add_option("--screening", path_screening, "on | off")->capture_default_str();
    path_cmd->add_option("--out-dir", path_out_dir, "Directory for stats.csv and summary.txt")->required();
    path_cmd->add_flag("--save-solutions", save_solutions, "Also write one solution CSV per lambda");
    add_solver_options(*path_cmd, path_cfg);
    path_cmd->callback([&] {
        action = [&] {
            const bool screening = parse_on_off(path_screening);
            PathSpec spec;
            spec.ratios = parse_grid(path_grid);
            spec.screening = screening;
            spec.solver = path_cfg;
            spec.keep_solutions = save_solutions;
            std::optional<ProblemInstance> inst;
            if (!path_synthetic.empty()) {
                if (!path_files.matrix.empty() || !path_files.response.empty()) {
                    throw UsageError("--synthetic cannot be combined with --matrix/--response");
                }
                SynthOptions opt;
                apply_synth_keys(read_key_values(path_synthetic), opt);
                spec.seed = opt.spec.seed;
                inst.emplace(synthetic_instance(opt, parse_exponent(path_files.q)));
            } else {
                if (path_files.matrix.empty() || path_files.response.empty()) {
                    throw UsageError("path needs --matrix and --response, or --synthetic");
                }
                inst.emplace(load_problem(path_files));
            }
            const PathResult result = run_path(*inst, spec);
            fs::create_directories(path_out_dir);
            std::ofstream stats(fs::path(path_out_dir) / "stats.csv");
            if (!stats) throw IoError("cannot write stats.csv");
            write_stats_csv(stats, result);
            const json summary = path_summary_json(result, screening, inst->q());
            std::ostringstream text;
            print_summary(text, summary, false);
            write_text(fs::path(path_out_dir) / "summary.txt", text.str());
            if (save_solutions) {
                for (std::size_t i = 0; i < result.solutions.size(); ++i) {
                    char name[32];
                    std::snprintf(name, sizeof name, "solution_%03zu.csv", i);
                    io::write_vector_csv(fs::path(path_out_dir) / name, result.solutions[i].values(), 0);
                }
            }
            print_summary(out, summary, as_json);
        };
    });

    // gen
    auto* gen_cmd = app.add_subcommand("gen", "Generate synthetic instances");
    SynthOptions gen_opt;
    std::string gen_out_dir;
    gen_cmd->add_option("--preset", gen_opt.preset, "joint-sparse | screening")->capture_default_str();
    gen_cmd->add_option("--m", gen_opt.spec.m, "Rows")->capture_default_str();
    gen_cmd->add_option("--d", gen_opt.spec.d, "Features (joint-sparse)")->capture_default_str();
    gen_cmd->add_option("--k", gen_opt.spec.k, "Tasks (joint-sparse)")->capture_default_str();
    gen_cmd->add_option("--d-tilde", gen_opt.spec.d_tilde, "Nonzero rows (joint-sparse)")->capture_default_str();
    gen_cmd->add_option("--sigma", gen_opt.spec.sigma, "Noise standard deviation")->capture_default_str();
    gen_cmd->add_option("--entry-dist", gen_opt.entry_dist, "uniform01 | standard_normal")->capture_default_str();
    gen_cmd->add_option("--p", gen_opt.spec.p, "Columns (screening)")->capture_default_str();
    gen_cmd->add_option("--groups", gen_opt.spec.groups, "Group count (screening)")->capture_default_str();
    gen_cmd->add_option("--corr-lo", gen_opt.spec.corr_lo, "Lowest column/response correlation")->capture_default_str();
    gen_cmd->add_option("--corr-hi", gen_opt.spec.corr_hi, "Highest column/response correlation")->capture_default_str();
    gen_cmd->add_option("--seed", gen_opt.spec.seed, "RNG seed")->capture_default_str();
    gen_cmd->add_option("--out-dir", gen_out_dir, "Output directory")->required();
    gen_cmd->callback([&] {
        action = [&] {
            SynthOptions opt = gen_opt;
            opt.spec.entry_dist = parse_entry_dist(opt.entry_dist);
            const fs::path dir(gen_out_dir);
            fs::create_directories(dir);
            json j;
            j["preset"] = opt.preset;
            j["seed"] = opt.spec.seed;
            j["rng"] = Rng::kName;
            if (opt.preset == "screening") {
                const ProblemInstance inst = gen_screening_instance(opt.spec);
                io::write_matrix_csv(dir / "B.csv", inst.design());
                io::write_vector_csv(dir / "Y.csv", inst.response());
                io::write_groups(dir / "groups.txt", inst.partition());
                j["rows"] = inst.rows();
                j["columns"] = inst.dim();
                j["groups"] = inst.num_groups();
            } else if (opt.preset == "joint-sparse") {
                const JointSparseData data = gen_joint_sparse(opt.spec);
                const MultiTaskProblem problem = MultiTaskProblem::build(data.A, data.Y, Exponent::two());
                io::write_matrix_csv(dir / "B.csv", problem.instance.design());
                io::write_vector_csv(dir / "Y.csv", problem.instance.response());
                io::write_groups(dir / "groups.txt", problem.instance.partition());
                io::write_matrix_csv(dir / "X_true.csv", data.X_true);
                io::write_matrix_csv(dir / "A.csv", data.A);
                io::write_matrix_csv(dir / "Y_matrix.csv", data.Y);
                j["rows"] = problem.instance.rows();
                j["columns"] = problem.instance.dim();
                j["groups"] = problem.instance.num_groups();
            } else {
                throw UsageError("unknown preset '" + opt.preset + "'");
            }
            print_summary(out, j, as_json);
        };
    });

    // oracle (hidden, for debugging)
    auto* oracle_cmd = app.add_subcommand("oracle", "Reference implementations");
    oracle_cmd->group("");
    oracle_cmd->require_subcommand(1);
    auto* grid_cmd = oracle_cmd->add_subcommand("prox-grid", "Grid-search prox for vectors of length <= 4");
    std::string grid_q = "2";
    double grid_lambda = 0.0, grid_resolution = 0.05;
    std::string grid_input;
    grid_cmd->add_option("--q", grid_q, "Exponent")->capture_default_str();
    grid_cmd->add_option("--lambda", grid_lambda, "Regularization weight")->required();
    grid_cmd->add_option("--resolution", grid_resolution, "Initial grid spacing fraction")->capture_default_str();
    grid_cmd->add_option("--input", grid_input, "Vector CSV (default: stdin)");
    grid_cmd->callback([&] {
        action = [&] {
            const Vector v = grid_input.empty() ? io::read_vector_csv(in) : io::read_vector_csv(fs::path(grid_input));
            io::write_row_csv(out, oracle::prox_oracle_grid(v, grid_lambda, parse_exponent(grid_q), grid_resolution),
                              digits);
        };
    });
    auto* ref_cmd = oracle_cmd->add_subcommand("reference", "Plain proximal gradient run to a tight tolerance");
    ProblemFiles ref_files;
    std::optional<double> ref_lambda, ref_ratio;
    double ref_tol = 1e-12;
    long ref_iters = 1000000;
    std::string ref_out;
    add_problem_options(*ref_cmd, ref_files, true);
    ref_cmd->add_option("--lambda", ref_lambda, "Absolute weight")->excludes(
        ref_cmd->add_option("--ratio", ref_ratio, "Weight relative to lambda_max"));
    ref_cmd->add_option("--tol", ref_tol, "Fixed-point residual tolerance")->capture_default_str();
    ref_cmd->add_option("--max-iters", ref_iters, "Iteration cap")->capture_default_str();
    ref_cmd->add_option("--out", ref_out, "Solution CSV");
    ref_cmd->callback([&] {
        action = [&] {
            ProblemInstance inst = load_problem(ref_files);
            inst = inst.with_lambda(resolve_lambda(inst, ref_lambda, ref_ratio));
            const auto result = oracle::reference_solve(inst, ref_tol, ref_iters);
            if (!ref_out.empty()) io::write_vector_csv(fs::path(ref_out), result.x.values(), digits);
            json j;
            j["objective"] = result.objective;
            j["iterations"] = result.iterations;
            j["converged"] = result.converged;
            j["residual"] = result.residual;
            print_summary(out, j, as_json);
            if (!result.converged) err << "warning: reference solver did not reach the tolerance\n";
        };
    });

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.emplace_back("mixnorm");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << app.help();
        return kUsageError;
    }

    apply_thread_cap(err);
    try {
        if (action) action();
        return kSuccess;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalError;
    }
}

int dispatch(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, std::cin, std::cout, std::cerr);
}

}  // namespace mixnorm::cli
