#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "xgraphbench/graph.hpp"
#include "xgraphbench/kernels.hpp"
#include "xgraphbench/matrix.hpp"
#include "xgraphbench/rng.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    const auto t0 = clock_type::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = clock_type::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

xgb::Matrix random_matrix(int rows, int cols, xgb::Rng& rng) {
    xgb::Matrix m(rows, cols);
    for (double& x : m.flat()) x = rng.normal();
    return m;
}

xgb::Graph random_graph(int n, int extra_edges, xgb::Rng& rng) {
    xgb::GraphBuilder b(n);
    for (int v = 1; v < n; ++v) {
        b.add_edge(v, static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(v))));
    }
    for (int e = 0; e < extra_edges; ++e) {
        const int u = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
        const int w = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
        if (u != w) b.add_edge(u, w);
    }
    return b.build(xgb::Matrix(n, 1, 1.0));
}

void report(const std::string& name, double serial_ms, double parallel_ms, bool equal) {
    std::printf("%-24s %10.3f ms %10.3f ms %8.2fx   %s\n", name.c_str(), serial_ms, parallel_ms,
                serial_ms / parallel_ms, equal ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif
    std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    xgb::Rng rng(7);
    const int n = 4000, d = 64, k = 32;
    const xgb::Matrix a = random_matrix(n, d, rng);
    const xgb::Matrix b = random_matrix(d, k, rng);
    const xgb::Graph g = random_graph(n, 4 * n, rng);

    {
        xgb::Matrix out_s(n, k), out_p(n, k);
        const double ts = time_ms([&] { xgb::kernels::serial::matmul(a, b, out_s); }, 5);
        const double tp = time_ms([&] { xgb::kernels::matmul(a, b, out_p); }, 5);
        report("matmul", ts, tp, out_s == out_p);
    }
    {
        xgb::Matrix out_s(d, d), out_p(d, d);
        const double ts = time_ms([&] { xgb::kernels::serial::matmul_at_b(a, a, out_s); }, 5);
        const double tp = time_ms([&] { xgb::kernels::matmul_at_b(a, a, out_p); }, 5);
        report("matmul_at_b", ts, tp, out_s == out_p);
    }
    {
        xgb::Matrix out_s(n, n / 100), out_p(n, n / 100);
        const xgb::Matrix c = random_matrix(n / 100, d, rng);
        const double ts = time_ms([&] { xgb::kernels::serial::matmul_a_bt(a, c, out_s); }, 5);
        const double tp = time_ms([&] { xgb::kernels::matmul_a_bt(a, c, out_p); }, 5);
        report("matmul_a_bt", ts, tp, out_s == out_p);
    }
    {
        xgb::Matrix out_s(n, d), out_p(n, d);
        const double ts =
            time_ms([&] { xgb::kernels::serial::gin_aggregate(g, 0.3, a, out_s); }, 5);
        const double tp = time_ms([&] { xgb::kernels::gin_aggregate(g, 0.3, a, out_p); }, 5);
        report("gin_aggregate", ts, tp, out_s == out_p);
    }
    {
        xgb::Matrix out_s(n, d), out_p(n, d);
        const double ts = time_ms([&] { xgb::kernels::serial::relu(a, out_s); }, 20);
        const double tp = time_ms([&] { xgb::kernels::relu(a, out_p); }, 20);
        report("relu", ts, tp, out_s == out_p);
    }
    {
        xgb::Matrix out_s(n, k), out_p(n, k);
        xgb::Matrix logits = random_matrix(n, k, rng);
        const double ts =
            time_ms([&] { xgb::kernels::serial::softmax_rows(logits, out_s); }, 20);
        const double tp = time_ms([&] { xgb::kernels::softmax_rows(logits, out_p); }, 20);
        report("softmax_rows", ts, tp, out_s == out_p);
    }
    return 0;
}
