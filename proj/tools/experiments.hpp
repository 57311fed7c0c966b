#ifndef IGRM_TOOLS_EXPERIMENTS_HPP_
#define IGRM_TOOLS_EXPERIMENTS_HPP_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "igrm/assembly.hpp"
#include "igrm/problems.hpp"
#include "igrm/solver.hpp"
#include "igrm/splines.hpp"
#include "igrm/supg.hpp"

namespace igrm::experiments {

enum class problem_id { manufactured, eriksson, vortical };
enum class method_id { igrm, supg };
enum class solver_kind { iterative, direct };

problem_id parse_problem(const std::string& s);
method_id parse_method(const std::string& s);
std::string to_string(problem_id p);
std::string to_string(method_id m);

/// Boundary-term presets for the weak form.
///   standard:         weak_form_config defaults.
///   whole_boundary:   penalty sign -1 and -(u, beta.n v) over the whole boundary.
///   unscaled_penalty: penalty C p^2 / h without the diffusion factor.
enum class boundary_form { standard, whole_boundary, unscaled_penalty };

boundary_form parse_boundary_form(const std::string& s);
std::string to_string(boundary_form f);
weak_form_config make_weak_form(boundary_form f);
/// Preset that reproduces the reference results for each problem.
boundary_form default_boundary_form(problem_id p);

/// "p,c" -> order.
order parse_order(const std::string& s);
/// "1e-4" or "h2".
eta_spec parse_eta(const std::string& s);

/// Everything needed to run one discretization on one mesh.
struct experiment_spec {
    problem_id problem = problem_id::manufactured;
    method_id method = method_id::igrm;
    order trial{2, 1};
    order test{2, 0};
    double peclet = 100.0;
    double wind = 1.0;
    bool mirror_inflow = false;
    eta_spec eta = eta_spec::h2();
    solver_kind solver_method = solver_kind::iterative;  // direct: sparse LU of the saddle matrix
    solver_config solver;
    weak_form_config weak;
    int supg_laplacian_sign = -1;
};

problem_definition make_problem(const experiment_spec& spec);

/// Uniform nx x ny mesh over the problem domain.
mesh_breakpoints uniform_mesh(const experiment_spec& spec, int nx, int ny);

struct run_outcome {
    tensor_space space;  // trial space
    Eigen::VectorXd u;
    run_report report;
    double eta = 0.0;
};

/// Assemble and solve; attaches error norms when the problem has an exact
/// solution. Throws when an iGRM test space is not richer than the trial
/// space in both directions.
run_outcome run_single(const experiment_spec& spec, const mesh_breakpoints& mesh);

/// CSV text with a header row; rows are kept in insertion order.
struct csv_table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    bool all_converged = true;

    std::string str() const;
};

struct output_options {
    bool timings = true;  // false writes wall_ms as 0 for byte-identical reruns
};

struct convergence_spec {
    experiment_spec base;
    std::vector<int> meshes;     // n for n x n meshes
    std::vector<order> trials;   // iGRM uses base.test; SUPG tests with the trial space
};

csv_table run_convergence_table(const convergence_spec& spec, const output_options& opts = {});

struct adaptive_spec {
    experiment_spec base;  // problem, spaces, eta, solver knobs
    std::vector<method_id> methods{method_id::supg, method_id::igrm};
    int steps = 25;
    int initial_nx = 2;
    int initial_ny = 4;
    double switch_size = 0.0;  // <= 0: refine x only
};

std::vector<mesh_breakpoints> adaptive_meshes(const adaptive_spec& spec);

csv_table run_adaptive_study(const adaptive_spec& spec, const output_options& opts = {});

struct eta_sweep_spec {
    adaptive_spec grids;             // mesh sequence and discretization
    std::vector<int> grid_steps;     // 1-based entries of the adaptive sequence
    std::vector<double> etas;
};

csv_table run_eta_sweep(const eta_sweep_spec& spec, const output_options& opts = {});

/// Uniform resolution x resolution lattice of u_h: header "x y u", tab separated.
void export_solution_grid(const Eigen::VectorXd& u, const tensor_space& space, int resolution, const std::string& path);

/// Samples along x = value (axis 'x') or y = value (axis 'y').
void export_cross_section(const Eigen::VectorXd& u, const tensor_space& space, char axis, double value, int resolution,
                          const std::string& path);

/// Hex FNV-1a hash of the breakpoints of both directions.
std::string knot_hash(const mesh_breakpoints& mesh);

nlohmann::json report_json(const run_report& report);

/// Worker count from IGRM_THREADS, defaulting to hardware concurrency.
int thread_count();

}  // namespace igrm::experiments

#endif  // IGRM_TOOLS_EXPERIMENTS_HPP_
