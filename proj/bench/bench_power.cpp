// Serial reference kernels against the OpenMP kernels on the SWCC(10,7)
// reduced distance matrix (dimension 7260).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include <omp.h>

#include "gvb/eigen.hpp"
#include "gvb/gvcore.hpp"
#include "gvb/graphs.hpp"
#include "gvb/product.hpp"

using namespace gvb;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-28s %10.4f %10.4f %8.2fx\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
  const LabelledGraph g = build_swcc(10, 7);
  const SparsePolyMatrix b = build_B(g);
  const SparsePolyMatrix b1 = b.derivative(Var::y, 1), b2 = b.derivative(Var::y, 2);
  const CsrMatrix m = b.eval(0.5), m1 = b1.eval(0.5), m2 = b2.eval(0.5);
  std::printf("B: n = %zu, nnz = %zu, threads = %d\n", m.n, m.nnz(), omp_get_max_threads());
  std::printf("%-28s %10s %10s %9s\n", "kernel", "serial s", "omp s", "speedup");

  std::vector<double> x(m.n, 1.0), y(m.n);
  constexpr int spmv_reps = 200;
  row("spmv x200",
      best_of(reps, [&] { for (int i = 0; i < spmv_reps; ++i) kernels::spmv(m, x, y, ExecPolicy::serial); }),
      best_of(reps, [&] { for (int i = 0; i < spmv_reps; ++i) kernels::spmv(m, x, y, ExecPolicy::parallel); }));

  SolverConfig ser, par;
  ser.exec = ExecPolicy::serial;
  par.exec = ExecPolicy::parallel;
  double ls = 0, lp = 0;
  row("power iteration", best_of(reps, [&] { ls = power_iteration(m, ser).lambda; }),
      best_of(reps, [&] { lp = power_iteration(m, par).lambda; }));
  std::printf("  lambda serial %.12f omp %.12f\n", ls, lp);
  double ds = 0, dp = 0;
  row("power iteration II", best_of(reps, [&] { ds = *power_II(m, m1, m2, ser).d2; }),
      best_of(reps, [&] { dp = *power_II(m, m1, m2, par).d2; }));
  std::printf("  lambda'' serial %.10f omp %.10f\n", ds, dp);
  row("GV curve, 20 points", best_of(1, [&] { gv_curve(g, 20, ser); }), best_of(1, [&] { gv_curve(g, 20, par); }));
  return std::abs(ls - lp) <= 1e-8 * ls ? 0 : 1;
}
