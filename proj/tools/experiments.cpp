#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace igrm::experiments {

namespace {

std::string fmt_double(double v, const char* pattern = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

// Runs f(0..n-1) on up to thread_count() workers; results land by index.
template <typename Result>
std::vector<Result> parallel_map(std::size_t n, const std::function<Result(std::size_t)>& f) {
    std::vector<std::optional<Result>> slots(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        }
    };
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(thread_count()));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    std::vector<Result> out;
    out.reserve(n);
    for (auto& slot : slots) {
        out.push_back(std::move(*slot));
    }
    return out;
}

std::string status_of(const run_report& r) {
    if (!r.converged) {
        return "not_converged";
    }
    if (!r.inner_converged) {
        return "inner_not_converged";
    }
    return "ok";
}

std::string wall(const run_report& r, const output_options& opts) {
    return opts.timings ? fmt_double(r.wall_ms, "%.3f") : "0";
}

std::string opt_num(const std::optional<double>& v) {
    return v ? fmt_double(*v) : "";
}

}  // namespace

problem_id parse_problem(const std::string& s) {
    if (s == "manufactured") return problem_id::manufactured;
    if (s == "eriksson") return problem_id::eriksson;
    if (s == "vortical") return problem_id::vortical;
    throw std::invalid_argument("unknown problem '" + s + "'");
}

method_id parse_method(const std::string& s) {
    if (s == "igrm") return method_id::igrm;
    if (s == "supg") return method_id::supg;
    throw std::invalid_argument("unknown method '" + s + "'");
}

std::string to_string(problem_id p) {
    switch (p) {
    case problem_id::manufactured: return "manufactured";
    case problem_id::eriksson: return "eriksson";
    case problem_id::vortical: return "vortical";
    }
    return "?";
}

std::string to_string(method_id m) {
    return m == method_id::igrm ? "igrm" : "supg";
}

boundary_form parse_boundary_form(const std::string& s) {
    if (s == "standard") return boundary_form::standard;
    if (s == "whole-boundary") return boundary_form::whole_boundary;
    if (s == "unscaled-penalty") return boundary_form::unscaled_penalty;
    throw std::invalid_argument("unknown boundary form '" + s + "'");
}

std::string to_string(boundary_form f) {
    switch (f) {
    case boundary_form::standard: return "standard";
    case boundary_form::whole_boundary: return "whole-boundary";
    case boundary_form::unscaled_penalty: return "unscaled-penalty";
    }
    return "?";
}

weak_form_config make_weak_form(boundary_form f) {
    weak_form_config cfg;
    if (f == boundary_form::whole_boundary) {
        cfg.penalty_sign = -1;
        cfg.inflow_only_advective_boundary = false;
        cfg.advective_sign = -1;
    } else if (f == boundary_form::unscaled_penalty) {
        cfg.penalty_scales_with_diffusion = false;
    }
    return cfg;
}

boundary_form default_boundary_form(problem_id p) {
    return p == problem_id::eriksson ? boundary_form::unscaled_penalty : boundary_form::whole_boundary;
}

order parse_order(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) {
        throw std::invalid_argument("expected 'p,c', got '" + s + "'");
    }
    try {
        return order{std::stoi(trim(s.substr(0, comma))), std::stoi(trim(s.substr(comma + 1)))};
    } catch (const std::logic_error&) {
        throw std::invalid_argument("expected 'p,c', got '" + s + "'");
    }
}

eta_spec parse_eta(const std::string& s) {
    const auto t = trim(s);
    if (t == "h2" || t == "h^2") {
        return eta_spec::h2();
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::logic_error&) {
        throw std::invalid_argument("eta must be a number or 'h2', got '" + s + "'");
    }
    if (used != t.size() || !(v > 0.0)) {
        throw std::invalid_argument("eta must be a positive number or 'h2', got '" + s + "'");
    }
    return eta_spec::fixed(v);
}

problem_definition make_problem(const experiment_spec& spec) {
    switch (spec.problem) {
    case problem_id::manufactured: return manufactured_problem(spec.peclet);
    case problem_id::eriksson: return eriksson_problem(spec.peclet);
    case problem_id::vortical: return vortical_problem(spec.peclet, spec.wind, spec.mirror_inflow);
    }
    throw std::invalid_argument("unknown problem");
}

mesh_breakpoints uniform_mesh(const experiment_spec& spec, int nx, int ny) {
    const auto dom = make_problem(spec).domain;
    return {uniform_breakpoints(dom.x0, dom.x1, nx), uniform_breakpoints(dom.y0, dom.y1, ny)};
}

run_outcome run_single(const experiment_spec& spec, const mesh_breakpoints& mesh) {
    const auto start = std::chrono::steady_clock::now();
    const auto problem = make_problem(spec);
    tensor_space trial{make_space(mesh.x, spec.trial.degree, spec.trial.continuity),
                       make_space(mesh.y, spec.trial.degree, spec.trial.continuity)};

    run_outcome out{trial, {}, {}, 0.0};
    if (spec.method == method_id::igrm) {
        tensor_space test{make_space(mesh.x, spec.test.degree, spec.test.continuity),
                          make_space(mesh.y, spec.test.degree, spec.test.continuity)};
        if (test.x.dim() <= trial.x.dim() || test.y.dim() <= trial.y.dim()) {
            throw std::invalid_argument("iGRM test space must be richer than the trial space in both directions");
        }
        out.eta = resolve_eta(spec.eta, test);
        const auto sys = build_saddle_system(problem, trial, test, out.eta, spec.weak);
        auto sol = spec.solver_method == solver_kind::direct ? direct_solve(sys) : igrm_solve(sys, spec.solver);
        out.u = std::move(sol.u);
        out.report = std::move(sol.report);
    } else {
        supg_config cfg;
        cfg.weak = spec.weak;
        cfg.laplacian_sign = spec.supg_laplacian_sign;
        auto sol = supg_solve(problem, trial, cfg);
        out.u = std::move(sol.u);
        out.report = std::move(sol.report);
    }
    if (problem.exact) {
        const auto err = error_norms(out.u, trial, *problem.exact);
        out.report.l2_rel_pct = err.l2_rel_pct;
        out.report.h1_rel_pct = err.h1_rel_pct;
    }
    out.report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::string csv_table::str() const {
    std::ostringstream os;
    auto line = [&os](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            os << (i ? "," : "") << cells[i];
        }
        os << '\n';
    };
    line(header);
    for (const auto& r : rows) {
        line(r);
    }
    return os.str();
}

csv_table run_convergence_table(const convergence_spec& spec, const output_options& opts) {
    csv_table table;
    table.header = {"nx",      "ny",       "trial_p",    "trial_c",    "test_p",       "test_c",
                    "dof_trial", "dof_test", "dof_total",  "l2_rel_pct", "h1_rel_pct",   "outer_iters",
                    "inner_iters_total", "wall_ms", "status"};

    struct cell {
        int n;
        order trial;
    };
    std::vector<cell> cells;
    for (int n : spec.meshes) {
        for (const auto& t : spec.trials) {
            cells.push_back({n, t});
        }
    }

    const auto results = parallel_map<run_outcome>(cells.size(), [&](std::size_t i) {
        auto s = spec.base;
        s.trial = cells[i].trial;
        return run_single(s, uniform_mesh(s, cells[i].n, cells[i].n));
    });

    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        const auto& r = results[i].report;
        const order test = spec.base.method == method_id::igrm ? spec.base.test : c.trial;
        table.rows.push_back({std::to_string(c.n), std::to_string(c.n), std::to_string(c.trial.degree),
                              std::to_string(c.trial.continuity), std::to_string(test.degree),
                              std::to_string(test.continuity), std::to_string(r.dof_trial), std::to_string(r.dof_test),
                              std::to_string(r.dof_total), opt_num(r.l2_rel_pct), opt_num(r.h1_rel_pct),
                              std::to_string(r.outer_iters), std::to_string(r.inner_iters_total), wall(r, opts),
                              status_of(r)});
        table.all_converged = table.all_converged && r.converged && r.inner_converged;
    }
    return table;
}

std::vector<mesh_breakpoints> adaptive_meshes(const adaptive_spec& spec) {
    return adaptive_sequence(uniform_mesh(spec.base, spec.initial_nx, spec.initial_ny), spec.steps, spec.switch_size);
}

csv_table run_adaptive_study(const adaptive_spec& spec, const output_options& opts) {
    csv_table table;
    table.header = {"step", "method", "x_elements", "y_elements", "dof", "l2_rel_pct", "h1_rel_pct",
                    "outer_iters", "inner_iters_total", "wall_ms", "knot_hash", "status"};
    const auto meshes = adaptive_meshes(spec);

    const std::size_t n = meshes.size() * spec.methods.size();
    const auto results = parallel_map<run_outcome>(n, [&](std::size_t i) {
        auto s = spec.base;
        s.method = spec.methods[i % spec.methods.size()];
        return run_single(s, meshes[i / spec.methods.size()]);
    });

    for (std::size_t i = 0; i < n; ++i) {
        const auto& mesh = meshes[i / spec.methods.size()];
        const auto& r = results[i].report;
        table.rows.push_back({std::to_string(i / spec.methods.size() + 1), to_string(spec.methods[i % spec.methods.size()]),
                              std::to_string(mesh.x.size() - 1), std::to_string(mesh.y.size() - 1),
                              std::to_string(r.dof_total), opt_num(r.l2_rel_pct), opt_num(r.h1_rel_pct),
                              std::to_string(r.outer_iters), std::to_string(r.inner_iters_total), wall(r, opts),
                              knot_hash(mesh), status_of(r)});
        table.all_converged = table.all_converged && r.converged && r.inner_converged;
    }
    return table;
}

csv_table run_eta_sweep(const eta_sweep_spec& spec, const output_options& opts) {
    if (spec.grid_steps.empty() || spec.etas.empty()) {
        throw std::invalid_argument("eta sweep needs at least one grid and one eta");
    }
    csv_table table;
    table.header = {"grid_step", "eta", "outer", "inner", "l2", "h1", "wall_ms", "status"};

    auto grids = spec.grids;
    grids.steps = *std::max_element(spec.grid_steps.begin(), spec.grid_steps.end());
    if (*std::min_element(spec.grid_steps.begin(), spec.grid_steps.end()) < 1) {
        throw std::invalid_argument("grid steps are 1-based");
    }
    const auto meshes = adaptive_meshes(grids);

    const std::size_t n = spec.grid_steps.size() * spec.etas.size();
    const auto results = parallel_map<run_outcome>(n, [&](std::size_t i) {
        auto s = spec.grids.base;
        s.method = method_id::igrm;
        s.eta = eta_spec::fixed(spec.etas[i % spec.etas.size()]);
        return run_single(s, meshes[spec.grid_steps[i / spec.etas.size()] - 1]);
    });

    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = results[i].report;
        const int last_inner = r.inner_iters.empty() ? 0 : r.inner_iters.back();
        const std::string outer = r.converged ? std::to_string(r.outer_iters)
                                              : ">" + std::to_string(spec.grids.base.solver.outer_max);
        const std::string inner =
            r.inner_converged ? std::to_string(last_inner) : ">" + std::to_string(spec.grids.base.solver.inner_max);
        table.rows.push_back({std::to_string(spec.grid_steps[i / spec.etas.size()]),
                              fmt_double(spec.etas[i % spec.etas.size()]), outer, inner, opt_num(r.l2_rel_pct),
                              opt_num(r.h1_rel_pct), wall(r, opts), status_of(r)});
        table.all_converged = table.all_converged && r.converged && r.inner_converged;
    }
    return table;
}

void export_solution_grid(const Eigen::VectorXd& u, const tensor_space& space, int resolution, const std::string& path) {
    if (resolution < 2) {
        throw std::invalid_argument("grid resolution must be at least 2");
    }
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    os << "x\ty\tu\n";
    for (int i = 0; i < resolution; ++i) {
        const double x = space.x.begin() + (space.x.end() - space.x.begin()) * i / (resolution - 1);
        for (int j = 0; j < resolution; ++j) {
            const double y = space.y.begin() + (space.y.end() - space.y.begin()) * j / (resolution - 1);
            os << fmt_double(x, "%.10g") << '\t' << fmt_double(y, "%.10g") << '\t'
               << fmt_double(evaluate(u, space, x, y), "%.12g") << '\n';
        }
    }
    if (!os) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

void export_cross_section(const Eigen::VectorXd& u, const tensor_space& space, char axis, double value, int resolution,
                          const std::string& path) {
    if (resolution < 2) {
        throw std::invalid_argument("cross-section resolution must be at least 2");
    }
    if (axis != 'x' && axis != 'y') {
        throw std::invalid_argument("cross-section axis must be 'x' or 'y'");
    }
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    const auto& along = axis == 'x' ? space.y : space.x;
    os << (axis == 'x' ? "y\tu\n" : "x\tu\n");
    for (int i = 0; i < resolution; ++i) {
        const double s = along.begin() + (along.end() - along.begin()) * i / (resolution - 1);
        const double val = axis == 'x' ? evaluate(u, space, value, s) : evaluate(u, space, s, value);
        os << fmt_double(s, "%.10g") << '\t' << fmt_double(val, "%.12g") << '\n';
    }
    if (!os) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

std::string knot_hash(const mesh_breakpoints& mesh) {
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&h](const std::vector<double>& pts) {
        for (double v : pts) {
            unsigned char bytes[sizeof v];
            std::memcpy(bytes, &v, sizeof v);
            for (unsigned char b : bytes) {
                h ^= b;
                h *= 1099511628211ULL;
            }
        }
        h ^= 0xff;
        h *= 1099511628211ULL;
    };
    feed(mesh.x);
    feed(mesh.y);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json report_json(const run_report& r) {
    nlohmann::json j;
    j["outer_iters"] = r.outer_iters;
    j["inner_iters"] = r.inner_iters;
    j["inner_iters_total"] = r.inner_iters_total;
    j["final_update"] = r.final_update;
    j["residual"] = r.residual;
    j["residual_history"] = r.residual_history;
    j["converged"] = r.converged;
    j["inner_converged"] = r.inner_converged;
    j["residual_check"] = r.residual_check;
    j["wall_ms"] = r.wall_ms;
    j["dof_trial"] = r.dof_trial;
    j["dof_test"] = r.dof_test;
    j["dof_total"] = r.dof_total;
    j["l2_rel_pct"] = r.l2_rel_pct ? nlohmann::json(*r.l2_rel_pct) : nlohmann::json(nullptr);
    j["h1_rel_pct"] = r.h1_rel_pct ? nlohmann::json(*r.h1_rel_pct) : nlohmann::json(nullptr);
    return j;
}

int thread_count() {
    if (const char* env = std::getenv("IGRM_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) {
            return n;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace igrm::experiments
