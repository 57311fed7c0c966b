#include <benchmark/benchmark.h>

#include "igrm/assembly.hpp"
#include "igrm/kron.hpp"
#include "igrm/problems.hpp"
#include "igrm/solver.hpp"

namespace {

igrm::tensor_space square(int n, int p, int c) {
    return {igrm::make_space(igrm::uniform_breakpoints(0, 1, n), p, c),
            igrm::make_space(igrm::uniform_breakpoints(0, 1, n), p, c)};
}

// N = (n + 2)^2 for (2,1) splines.
void BM_GtildeInverse(benchmark::State& state) {
    const auto t = square(static_cast<int>(state.range(0)), 2, 1);
    const auto f = igrm::factorize(igrm::assemble_gramm(t, 1e-4));
    Eigen::VectorXd v = Eigen::VectorXd::Ones(t.dim());
    for (auto _ : state) {
        f.apply_inverse_in_place(v);
        benchmark::DoNotOptimize(v.data());
    }
    state.SetComplexityN(t.dim());
    state.counters["N"] = t.dim();
}
BENCHMARK(BM_GtildeInverse)->Arg(98)->Arg(139)->Arg(198)->Arg(281)->Arg(398)->Complexity(benchmark::oN);

void BM_SchurMatvec(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto sys = igrm::build_saddle_system(igrm::eriksson_problem(1e6), square(n, 2, 1), square(n, 3, 1), 1e-4);
    const Eigen::VectorXd c = Eigen::VectorXd::Ones(sys.n_trial());
    for (auto _ : state) {
        benchmark::DoNotOptimize(igrm::schur_matvec(sys, c));
    }
    state.counters["N"] = sys.n_test();
}
BENCHMARK(BM_SchurMatvec)->Arg(16)->Arg(32)->Arg(64)->Arg(128);

void BM_AssembleB(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto pr = igrm::manufactured_problem(100);
    const auto trial = square(n, 2, 1);
    const auto test = square(n, 2, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(igrm::assemble_B(pr, trial, test, {}));
    }
}
BENCHMARK(BM_AssembleB)->Arg(16)->Arg(32)->Arg(64);

void BM_OuterStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto sys = igrm::build_saddle_system(igrm::eriksson_problem(1e6), square(n, 2, 1), square(n, 3, 1), 1e-4);
    const igrm::igrm_state zero{Eigen::VectorXd::Zero(sys.n_test()), Eigen::VectorXd::Zero(sys.n_trial())};
    for (auto _ : state) {
        benchmark::DoNotOptimize(igrm::igrm_step(sys, zero, {}));
    }
}
BENCHMARK(BM_OuterStep)->Arg(16)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
