#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"

#include "experiments.hpp"

namespace ex = igrm::experiments;

namespace {

struct common_flags {
    std::string problem = "manufactured";
    std::string method = "igrm";
    std::string trial = "2,1";
    std::string test = "2,0";
    double pe = 100.0;
    double wind = 1.0;
    std::string eta = "h2";
    double outer_tol = 1e-8;
    double inner_tol = 1e-10;
    int outer_max = 100;
    int inner_max = 1000;
    int penalty_sign = 1;
    double penalty_coefficient = 3.0;
    std::string boundary_form = "auto";
    std::string solver = "iterative";
    std::string inner_preconditioner = "jacobi";
    std::string advective_boundary = "inflow";
    int advective_sign = 1;
    CLI::App* app = nullptr;
    int supg_laplacian_sign = -1;
    bool mirror_inflow = false;
    std::string out;
    bool no_timings = false;
};

void add_common(CLI::App* app, common_flags& f) {
    f.app = app;
    app->add_option("--boundary-form", f.boundary_form,
                    "auto | standard | whole-boundary | unscaled-penalty; explicit boundary flags override it")
        ->capture_default_str();
    app->add_option("--problem", f.problem, "manufactured | eriksson | vortical")->capture_default_str();
    app->add_option("--method", f.method, "igrm | supg")->capture_default_str();
    app->add_option("--trial", f.trial, "trial space degree,continuity")->capture_default_str();
    app->add_option("--test", f.test, "test space degree,continuity (igrm)")->capture_default_str();
    app->add_option("--pe", f.pe, "Peclet number")->capture_default_str();
    app->add_option("--wind", f.wind, "vortical boundary profile sharpness")->capture_default_str();
    app->add_option("--eta", f.eta, "Gramm weight: a positive real or h2")->capture_default_str();
    app->add_option("--solver", f.solver, "iterative | direct (sparse LU of the saddle matrix)")
        ->check(CLI::IsMember({"iterative", "direct"}))
        ->capture_default_str();
    app->add_option("--inner-preconditioner", f.inner_preconditioner, "none | jacobi")
        ->check(CLI::IsMember({"none", "jacobi"}))
        ->capture_default_str();
    app->add_option("--outer-tol", f.outer_tol, "relative outer update tolerance")->capture_default_str();
    app->add_option("--inner-tol", f.inner_tol, "relative inner CG tolerance")->capture_default_str();
    app->add_option("--outer-max", f.outer_max, "outer iteration budget")->capture_default_str();
    app->add_option("--inner-max", f.inner_max, "inner CG iteration budget")->capture_default_str();
    app->add_option("--penalty-sign", f.penalty_sign, "sign of the boundary penalty term")
        ->check(CLI::IsMember({-1, 1}))
        ->capture_default_str();
    app->add_option("--penalty-coefficient", f.penalty_coefficient, "boundary penalty constant")->capture_default_str();
    app->add_option("--advective-boundary", f.advective_boundary, "inflow | full")
        ->check(CLI::IsMember({"inflow", "full"}))
        ->capture_default_str();
    app->add_option("--advective-sign", f.advective_sign, "sign of the (u, beta.n v) boundary term")
        ->check(CLI::IsMember({-1, 1}))
        ->capture_default_str();
    app->add_option("--supg-laplacian-sign", f.supg_laplacian_sign, "sign of eps lap u in the SUPG residual")
        ->check(CLI::IsMember({-1, 1}))
        ->capture_default_str();
    app->add_flag("--mirror-inflow", f.mirror_inflow, "vortical: apply the x=0 profile at negative y via |y|");
    app->add_option("--out", f.out, "output path (CSV for tables, JSON for solve); stdout if empty");
    app->add_flag("--no-timings", f.no_timings, "write wall_ms as 0 for byte-identical output");
}

ex::experiment_spec to_spec(const common_flags& f) {
    ex::experiment_spec s;
    s.problem = ex::parse_problem(f.problem);
    s.method = ex::parse_method(f.method);
    s.trial = ex::parse_order(f.trial);
    s.test = ex::parse_order(f.test);
    s.peclet = f.pe;
    s.wind = f.wind;
    s.mirror_inflow = f.mirror_inflow;
    s.eta = ex::parse_eta(f.eta);
    s.solver_method = f.solver == "direct" ? ex::solver_kind::direct : ex::solver_kind::iterative;
    s.solver.outer_tol = f.outer_tol;
    s.solver.inner_tol = f.inner_tol;
    s.solver.outer_max = f.outer_max;
    s.solver.inner_max = f.inner_max;
    s.solver.preconditioner =
        f.inner_preconditioner == "none" ? igrm::inner_preconditioner::none : igrm::inner_preconditioner::jacobi;
    s.weak = ex::make_weak_form(f.boundary_form == "auto" ? ex::default_boundary_form(s.problem)
                                                          : ex::parse_boundary_form(f.boundary_form));
    auto given = [&f](const char* flag) { return f.app->count(flag) > 0; };
    if (given("--penalty-sign")) s.weak.penalty_sign = f.penalty_sign;
    if (given("--penalty-coefficient")) s.weak.penalty_coefficient = f.penalty_coefficient;
    if (given("--advective-boundary")) s.weak.inflow_only_advective_boundary = f.advective_boundary == "inflow";
    if (given("--advective-sign")) s.weak.advective_sign = f.advective_sign;
    s.supg_laplacian_sign = f.supg_laplacian_sign;
    return s;
}

std::pair<int, int> parse_pair(const std::string& s) {
    const auto o = ex::parse_order(s);
    return {o.degree, o.continuity};
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path);
    if (!os || !(os << text)) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
}

struct adaptive_flags {
    std::string initial_mesh = "2,4";
    int steps = 25;
    double switch_threshold = 0.0;
};

void add_adaptive(CLI::App* app, adaptive_flags& f) {
    app->add_option("--initial-mesh", f.initial_mesh, "initial NX,NY elements")->capture_default_str();
    app->add_option("--adaptive-steps", f.steps, "number of adaptive meshes")->capture_default_str();
    app->add_option("--switch-threshold", f.switch_threshold,
                    "refine y once the smallest x element is at most this size (0: x only)")
        ->capture_default_str();
}

ex::adaptive_spec to_adaptive(const adaptive_flags& f, const ex::experiment_spec& base) {
    ex::adaptive_spec a;
    a.base = base;
    std::tie(a.initial_nx, a.initial_ny) = parse_pair(f.initial_mesh);
    if (f.steps < 1) {
        throw std::invalid_argument("--adaptive-steps must be at least 1");
    }
    a.steps = f.steps;
    a.switch_size = f.switch_threshold;
    return a;
}

// Eriksson-flavoured defaults for the adaptive commands when flags are left alone.
void adaptive_defaults(CLI::App* app, common_flags& f) {
    if (app->count("--problem") == 0) f.problem = "eriksson";
    if (app->count("--pe") == 0) f.pe = 1e6;
    if (app->count("--trial") == 0) f.trial = "2,1";
    if (app->count("--test") == 0) f.test = "3,1";
    if (app->count("--eta") == 0) f.eta = "1e-4";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Residual-minimization solver for advection-dominated diffusion"};
    app.require_subcommand(1);

    common_flags solve_f;
    int nx = 8;
    int ny = 8;
    int adaptive_step = 0;
    adaptive_flags solve_adapt;
    std::string grid_out;
    int grid_resolution = 101;
    std::vector<std::string> cross_sections;
    std::string cross_prefix = "cross";
    auto* solve = app.add_subcommand("solve", "solve one configuration and emit a JSON run report");
    add_common(solve, solve_f);
    solve->add_option("--nx", nx, "elements in x")->capture_default_str();
    solve->add_option("--ny", ny, "elements in y")->capture_default_str();
    solve->add_option("--initial-mesh", solve_adapt.initial_mesh, "initial NX,NY for --adaptive-steps")
        ->capture_default_str();
    solve->add_option("--adaptive-steps", adaptive_step, "use the mesh of this adaptive step instead of --nx/--ny");
    solve->add_option("--switch-threshold", solve_adapt.switch_threshold, "see the adaptive command")
        ->capture_default_str();
    solve->add_option("--grid-out", grid_out, "write sampled u_h as tab-separated x, y, u rows");
    solve->add_option("--grid-resolution", grid_resolution, "samples per direction")->capture_default_str();
    solve->add_option("--cross-section", cross_sections, "x=<v> or y=<v>; repeatable");
    solve->add_option("--cross-section-prefix", cross_prefix, "cross-section files are <prefix>_<axis><v>.txt")
        ->capture_default_str();

    common_flags table_f;
    std::vector<int> meshes{8, 16, 32, 64};
    std::vector<std::string> trials;
    auto* table = app.add_subcommand("table", "uniform-mesh convergence table as CSV");
    add_common(table, table_f);
    table->add_option("--meshes", meshes, "n for n x n meshes")->delimiter(',')->capture_default_str();
    table->add_option("--trials", trials, "trial spaces p,c; default 2,1 3,2 4,3 5,4");

    common_flags adapt_f;
    adaptive_flags adapt_a;
    std::vector<std::string> methods{"supg", "igrm"};
    auto* adaptive = app.add_subcommand("adaptive", "boundary-layer refinement study as CSV");
    add_common(adaptive, adapt_f);
    add_adaptive(adaptive, adapt_a);
    adaptive->add_option("--methods", methods, "methods to run per step")->delimiter(',')->capture_default_str();

    common_flags sweep_f;
    adaptive_flags sweep_a;
    std::vector<int> grid_steps{1};
    std::vector<double> etas{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
    auto* sweep = app.add_subcommand("eta-sweep", "solver iterations against the Gramm weight as CSV");
    add_common(sweep, sweep_f);
    add_adaptive(sweep, sweep_a);
    sweep->add_option("--grid-steps", grid_steps, "1-based adaptive steps")->delimiter(',')->capture_default_str();
    sweep->add_option("--etas", etas, "Gramm weights")->delimiter(',')->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            auto spec = to_spec(solve_f);
            igrm::mesh_breakpoints mesh;
            if (adaptive_step > 0) {
                solve_adapt.steps = adaptive_step;
                mesh = ex::adaptive_meshes(to_adaptive(solve_adapt, spec)).back();
            } else {
                mesh = ex::uniform_mesh(spec, nx, ny);
            }
            const auto run = ex::run_single(spec, mesh);
            auto report = run.report;
            if (solve_f.no_timings) {
                report.wall_ms = 0.0;
            }
            auto j = ex::report_json(report);
            j["problem"] = ex::to_string(spec.problem);
            j["method"] = ex::to_string(spec.method);
            j["eta"] = run.eta;
            j["knot_hash"] = ex::knot_hash(mesh);
            write_text(solve_f.out, j.dump(2) + "\n");

            if (!grid_out.empty()) {
                ex::export_solution_grid(run.u, run.space, grid_resolution, grid_out);
            }
            for (const auto& cs : cross_sections) {
                const auto eq = cs.find('=');
                if (eq != 1 || (cs[0] != 'x' && cs[0] != 'y')) {
                    throw std::invalid_argument("--cross-section expects x=<v> or y=<v>, got '" + cs + "'");
                }
                const double v = std::stod(cs.substr(2));
                ex::export_cross_section(run.u, run.space, cs[0], v, grid_resolution,
                                         cross_prefix + "_" + cs[0] + cs.substr(2) + ".txt");
            }
            return report.converged && report.inner_converged ? 0 : 2;
        }

        ex::csv_table result;
        std::string out;
        if (*table) {
            ex::convergence_spec c;
            c.base = to_spec(table_f);
            c.meshes = meshes;
            if (trials.empty()) {
                trials = {"2,1", "3,2", "4,3", "5,4"};
            }
            for (const auto& t : trials) {
                c.trials.push_back(ex::parse_order(t));
            }
            result = ex::run_convergence_table(c, {!table_f.no_timings});
            out = table_f.out;
        } else if (*adaptive) {
            adaptive_defaults(adaptive, adapt_f);
            auto a = to_adaptive(adapt_a, to_spec(adapt_f));
            a.methods.clear();
            for (const auto& m : methods) {
                a.methods.push_back(ex::parse_method(m));
            }
            result = ex::run_adaptive_study(a, {!adapt_f.no_timings});
            out = adapt_f.out;
        } else {
            adaptive_defaults(sweep, sweep_f);
            ex::eta_sweep_spec s;
            s.grids = to_adaptive(sweep_a, to_spec(sweep_f));
            s.grids.steps = 1;
            s.grid_steps = grid_steps;
            s.etas = etas;
            result = ex::run_eta_sweep(s, {!sweep_f.no_timings});
            out = sweep_f.out;
        }
        write_text(out, result.str());
        return result.all_converged ? 0 : 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "igrm: %s\n", e.what());
        return 1;
    }
}
