#pragma once

#include <omp.h>

#include <atomic>
#include <string>
#include <vector>

#include <json.hpp>

#include "loghe/config.hpp"
#include "loghe/sde.hpp"

namespace loghe {

struct RunOptions {
  std::string out_dir;  // empty -> spec.out_dir
  int workers = 0;      // 0 -> all hardware threads
  bool no_assert = false;
};

struct McSummary {
  std::string stat;
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  int count = 0;
};

McSummary summarize(const std::string& stat, const Vec& samples);

struct ExperimentReport {
  bool passed = true;
  std::vector<std::string> failures;
  nlohmann::ordered_json summary;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      failures.push_back(what);
    }
  }
};

ExperimentReport run_experiment(const ExperimentSpec& spec, const RunOptions& opt);

ExperimentReport run_simulate(const ExperimentSpec& spec, const RunOptions& opt);
ExperimentReport run_inequality_suite(const ExperimentSpec& spec, const RunOptions& opt);
ExperimentReport run_uniqueness(const ExperimentSpec& spec, const RunOptions& opt);
ExperimentReport run_moments(const ExperimentSpec& spec, const RunOptions& opt);
ExperimentReport run_lyapunov(const ExperimentSpec& spec, const RunOptions& opt);
ExperimentReport run_convergence(const ExperimentSpec& spec, const RunOptions& opt);
ExperimentReport run_schedule_check(const ExperimentSpec& spec, const RunOptions& opt);

/// Deterministic parallel map over replicates: results land in an index-addressed
/// vector and any reduction happens afterwards in index order, so the output is
/// identical for any worker count. Exceptions are captured and rethrown once.
template <class T, class F>
std::vector<T> mc_map(std::size_t count, int workers, F&& fn) {
  std::vector<T> out(count);
  const int nthreads = workers > 0 ? workers : omp_get_max_threads();
  std::string error;
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (long i = 0; i < static_cast<long>(count); ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (const std::exception& e) {
#pragma omp critical
      {
        if (!failed.exchange(true)) error = e.what();
      }
    }
  }
  if (failed) throw std::runtime_error("mc_map worker failed: " + error);
  return out;
}

namespace detail {

/// Serial counterpart of mc_map, kept for the parity tests and the benchmark.
template <class T, class F>
std::vector<T> mc_map_serial(std::size_t count, F&& fn) {
  std::vector<T> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
  return out;
}

}  // namespace detail

/// Classical RK4 at fixed step; the independent oracle the Gronwall suites
/// integrate their comparison ODEs with.
double rk4_integrate(const std::function<double(double, double)>& f, double y0,
                     double t0, double t1, double dt);

/// Trajectory with snapshots thinned to roughly `target` entries (first and
/// last kept); norms and scalars are carried over unchanged.
Trajectory thin_snapshots(const Trajectory& traj, std::size_t target);

}  // namespace loghe
