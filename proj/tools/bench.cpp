// Benchmark of the OpenMP kernels against their serial references:
// per-frame matching and the sweep grid. Verifies result equality while
// timing, so a speedup never hides a divergence.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mlct/matching.hpp"
#include "mlct/sweep.hpp"
#include "mlct/synthgen.hpp"

using namespace mlct;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

int hardware_jobs() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace

int main(int argc, char** argv) {
    int frames = 80;
    int reps = 5;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--frames")
            frames = std::atoi(argv[i + 1]);
        else if (flag == "--reps")
            reps = std::atoi(argv[i + 1]);
    }

    ColonyParams p;
    p.seed = 7;
    p.frames = frames;
    p.width = 420;
    p.height = 300;
    p.division_time_mean = 10;
    p.division_time_jitter = 1.5;
    std::printf("generating colony (%d frames, %dx%d)...\n", p.frames, p.width, p.height);
    Colony c = generate(p);
    std::printf("  %zu frames, %zu instances\n", c.seq.frames.size(), c.graph.node_count());

    // --- frame matching ---
    NodeMatching ref = match_frames_serial(c.seq, c.seq);
    auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r)
        ref = match_frames_serial(c.seq, c.seq);
    const double serial_ms = ms_since(t0) / reps;

    NodeMatching par = match_frames(c.seq, c.seq);
    t0 = Clock::now();
    for (int r = 0; r < reps; ++r)
        par = match_frames(c.seq, c.seq);
    const double parallel_ms = ms_since(t0) / reps;

    bool equal = ref.frames.size() == par.frames.size();
    for (std::size_t f = 0; equal && f < ref.frames.size(); ++f)
        equal = ref.frames[f].gt_to_pred == par.frames[f].gt_to_pred &&
                ref.frames[f].unmatched_gt == par.frames[f].unmatched_gt &&
                ref.frames[f].unmatched_pred == par.frames[f].unmatched_pred;

    std::printf("\nmatch_frames over %zu frames (%d reps)\n", c.seq.frames.size(), reps);
    std::printf("  serial   %8.2f ms\n", serial_ms);
    std::printf("  openmp   %8.2f ms  (%d threads, x%.2f)\n", parallel_ms, hardware_jobs(),
                serial_ms / parallel_ms);
    std::printf("  results  %s\n", equal ? "identical" : "DIVERGED");

    // --- sweep grid ---
    SweepSpec spec;
    spec.sf = {1, 2, 4, 8};
    spec.mc = {50, 100, kUnlimitedCells};
    Provenance prov;
    prov.tracker = "lap";

    t0 = Clock::now();
    SweepGrid serial_grid = run_sweep(c.seq, c.graph, spec, prov, 1);
    const double sweep_serial_ms = ms_since(t0);

    t0 = Clock::now();
    SweepGrid parallel_grid = run_sweep(c.seq, c.graph, spec, prov, hardware_jobs());
    const double sweep_parallel_ms = ms_since(t0);

    const bool csv_equal = grid_to_csv(serial_grid) == grid_to_csv(parallel_grid);
    std::printf("\nrun_sweep %zux%zu cells, lap tracker\n", spec.sf.size(), spec.mc.size());
    std::printf("  jobs=1   %8.2f ms\n", sweep_serial_ms);
    std::printf("  jobs=%-3d %8.2f ms  (x%.2f)\n", hardware_jobs(), sweep_parallel_ms,
                sweep_serial_ms / sweep_parallel_ms);
    std::printf("  csv      %s\n", csv_equal ? "identical" : "DIVERGED");

    return equal && csv_equal ? 0 : 1;
}
