// Timing comparison of the serial reference vs the OpenMP phase-diagram
// kernel. Usage: bench_phase_diagram [grid_size] [repeats]

#include "ionphase/chain_model.hpp"
#include "ionphase/phase_engine.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

using namespace ionphase;

namespace {

template <typename F>
double best_of(F&& fn, int repeats) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (s < best) best = s;
  }
  return best;
}

} // namespace

int main(int argc, char** argv) {
  const int size = argc > 1 ? std::atoi(argv[1]) : 801;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;

  const auto modes = normal_modes({23.985, 9.0122, 1.7, Direction::Transverse});
  std::vector<double> n_grid(size), r_grid(size);
  for (int i = 0; i < size; ++i) {
    n_grid[i] = 3.0 * i / (size - 1);
    r_grid[i] = 1.5 * i / (size - 1);
  }

  volatile int sink = 0;
  const double serial = best_of([&] {
    sink += static_cast<int>(phase_diagram_serial(modes, n_grid, r_grid).size());
  }, repeats);
  const double parallel = best_of([&] {
    sink += static_cast<int>(phase_diagram(modes, n_grid, r_grid).size());
  }, repeats);

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("grid %dx%d, best of %d runs\n", size, size, repeats);
  std::printf("serial:   %8.2f ms\n", serial * 1e3);
  std::printf("parallel: %8.2f ms  (%d threads, speedup %.2fx)\n", parallel * 1e3, threads,
              serial / parallel);
  return sink == -1 ? 1 : 0;
}
