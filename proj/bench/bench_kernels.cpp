// Compares the serial reference kernels against the OpenMP paths across a
// range of dimensions, plus the eigensolver cost that dominates each RK4
// stage when the thermal term is active.

#include <chrono>
#include <cstdio>
#include <random>

#include "disent/linalg.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace disent;

namespace {

ComplexMatrix random_hermitian(int n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
    ComplexMatrix h = add(m, adjoint(m));
    hermitize_inplace(h);
    return h;
}

template <typename F>
double time_ms(F&& fn, int reps) {
    const auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled; both columns run the serial kernel\n");
#endif
    std::printf("%-6s %-14s %-14s %-9s %-14s\n", "dim", "matmul-serial", "matmul-omp", "speedup",
                "eigh");

    for (int n : {16, 64, 128, 256, 384}) {
        const ComplexMatrix a = random_hermitian(n, 2 * n);
        const ComplexMatrix b = random_hermitian(n, 2 * n + 1);
        const int reps = n <= 64 ? 50 : (n <= 128 ? 10 : 3);

        volatile double sink = 0.0;
        const double serial = time_ms([&] { sink = sink + matmul_serial(a, b)(0, 0).real(); }, reps);
        const double parallel = time_ms([&] { sink = sink + matmul(a, b)(0, 0).real(); }, reps);
        const double eig = time_ms([&] { sink = sink + eigh(a).values[0]; }, n <= 64 ? 10 : 2);

        std::printf("%-6d %-14.3f %-14.3f %-9.2f %-14.3f\n", n, serial, parallel,
                    serial / parallel, eig);
    }
    std::printf("(times in ms per call)\n");
    return 0;
}
