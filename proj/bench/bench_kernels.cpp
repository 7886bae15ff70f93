// Serial reference vs OpenMP kernels: corpus evaluation, oracle agreement,
// soundness grid and TDP sweep. Best-of-N wall time per kernel.
//
//   bench_kernels [repeats]

#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "sysscale/corpus.hpp"
#include "sysscale/presets.hpp"

using namespace sysscale;

static double best_of(int repeats, const std::function<void()> &fn)
{
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        double t0 = omp_get_wtime();
        fn();
        best = std::min(best, omp_get_wtime() - t0);
    }
    return best;
}

static void row(const char *name, double serial, double parallel)
{
    std::printf("%-20s %10.4f %10.4f %8.2fx\n", name, serial, parallel, serial / parallel);
}

int main(int argc, char **argv)
{
    int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
    SocConfig cfg = skylake_like_config();

    CorpusSpec spec;
    spec.seed = 1001;
    auto corpus = generate_corpus(spec);
    auto evals = evaluate_corpus(cfg, corpus);
    ThresholdSet thr = calibrate_from_corpus(cfg, corpus, 0.01);
    auto grid = soundness_grid(30.0, 25, 20);

    CorpusSpec cb;
    cb.kind = "profile";
    cb.profile = SYSSCALE_DATA_DIR "/profiles/compute-bound.json";
    cb.count = 20;
    cb.seed = 3003;
    auto compute = generate_corpus(cb);
    const double tdps[] = {3.5, 4.5, 7.0};

    std::printf("threads %d, best of %d\n", omp_get_max_threads(), repeats);
    std::printf("%-20s %10s %10s %9s\n", "kernel", "serial s", "omp s", "speedup");

    std::size_t sink = 0;
    row("evaluate_corpus",
        best_of(repeats, [&] { sink += evaluate_corpus_serial(cfg, corpus).size(); }),
        best_of(repeats, [&] { sink += evaluate_corpus(cfg, corpus).size(); }));
    row("oracle_agreement",
        best_of(repeats, [&] { sink += oracle_agreement_serial(cfg, thr, evals).agree; }),
        best_of(repeats, [&] { sink += oracle_agreement(cfg, thr, evals).agree; }));
    row("grid_agreement",
        best_of(repeats, [&] { sink += grid_agreement_serial(cfg, thr, grid).agree; }),
        best_of(repeats, [&] { sink += grid_agreement(cfg, thr, grid).agree; }));
    row("tdp_sweep",
        best_of(repeats, [&] { sink += tdp_sweep_serial(compute, cfg, thr, tdps).size(); }),
        best_of(repeats, [&] { sink += tdp_sweep(compute, cfg, thr, tdps).size(); }));
    std::fprintf(stderr, "checksum %zu\n", sink);
    return 0;
}
