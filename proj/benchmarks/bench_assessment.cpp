#include "flexcolloc/assessment.hpp"
#include "flexcolloc/nlp.hpp"
#include "flexcolloc/problems.hpp"
#include "flexcolloc/transcription.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

using namespace flexcolloc;

namespace {

double seconds_per_call(const std::function<assessment::AssessmentReport()>& f,
                        int repeats) {
  f();  // warm up caches and quadrature tables
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
             .count() /
         repeats;
}

void bench(const char* name, const transcription::DopDefinition& dop, int n,
           int n_h, int repeats) {
  const transcription::FlexibleMesh mesh =
      transcription::FlexibleMesh::uniform(dop.t0, dop.tf, n_h, 0.0);
  const transcription::TranscribedProblem tp = transcription::assemble(
      dop, n, mesh, transcription::ConstraintMode::BernsteinFixed);
  nlp::SolverOptions opts;
  opts.max_iter = 500;
  const nlp::NlpSolution sol = nlp::solve(tp.nlp, opts);
  const transcription::Trajectory traj =
      transcription::extract_trajectory(tp.layout, sol.z);

  const double t_par =
      seconds_per_call([&] { return assessment::assess(traj, dop); }, repeats);
  const double t_ser = seconds_per_call(
      [&] { return assessment::assess_serial(traj, dop); }, repeats);
  const auto a = assessment::assess(traj, dop);
  const auto b = assessment::assess_serial(traj, dop);
  std::printf("%-14s n=%2d n_h=%2d  parallel %8.3f ms  serial %8.3f ms  "
              "speedup %5.2fx  cost agreement %.1e\n",
              name, n, n_h, 1e3 * t_par, 1e3 * t_ser, t_ser / t_par,
              std::abs(a.cost - b.cost));
}

}  // namespace

int main() {
  std::printf("assessment quadrature: OpenMP task battery vs serial reference\n");
  bench("bryson-denham", problems::bryson_denham(), 5, 3, 20);
  bench("bryson-denham", problems::bryson_denham(), 8, 6, 10);
  bench("cart-pole", problems::cart_pole(), 6, 4, 5);
  bench("cart-pole", problems::cart_pole(), 8, 4, 5);
  return 0;
}
