// duplex/bench.cpp
#include "duplex/bench.hpp"

#include <chrono>

#include "duplex/build.hpp"
#include "duplex/gen.hpp"
#include "duplex/sim.hpp"

namespace duplex
{

Result<BenchReport> run_bench(const BenchOptions & options)
{
  if (options.equations < 1 || options.equations > 65536) {
    return Result<BenchReport>::fail("equations must be in 1..65536");
  }
  Model model = gen_interlocking(options.equations, options.seed);
  BuildOptions bo;
  // Large boolean networks do not fit the 64 KiB default space; benchmark
  // builds stay in memory with a wider map and skip the image text files.
  if (options.equations > 512) {
    bo.map = quartered_map(1u << 23);
  }
  BuildOutcome built = build_model(model, bo);
  if (!built) {
    return Result<BenchReport>::fail("build failed: " + built.error +
                                     format_diagnostics(built.diagnostics));
  }
  BuildArtifacts & a = *built.artifacts;

  SimConfig sc;
  sc.mcu.instruction_budget = a.budget;
  sc.mcu.selftest_opcodes_per_cycle = options.selftest_opcodes_per_cycle;
  sc.seed = options.seed;
  auto sim = DuplexSim::create(clone_typed_model(a.typed), a.image_a, a.image_b, a.map, sc);
  if (!sim) {
    return Result<BenchReport>::fail("sim: " + sim.error);
  }

  Rng rng(options.seed ^ 0xBEBEBEBEull);
  std::vector<int64_t> inputs(20, 0);
  auto roll_inputs = [&]() {
    for (auto & v : inputs) v = rng.range(0, 1);
  };

  roll_inputs();
  sim->step(inputs);  // warmup (cold caches, first-touch)
  sim->clear_trace();

  BenchReport rep;
  rep.equations = options.equations;
  rep.fingerprint = a.fingerprint;
  rep.max_ops = a.bound.max_ops;

  auto start = std::chrono::steady_clock::now();
  double elapsed = 0.0;
  while (rep.cycles < options.min_cycles || elapsed < options.min_seconds) {
    roll_inputs();
    sim->step(inputs);
    ++rep.cycles;
    if (sim->trace().size() > 4096) {
      if (sim->count_events(EventKind::LocalDivergence) ||
          sim->count_events(EventKind::CrossDivergence)) {
        return Result<BenchReport>::fail("divergence during benchmark run");
      }
      sim->clear_trace();
    }
    elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  if (sim->count_events(EventKind::LocalDivergence) ||
      sim->count_events(EventKind::CrossDivergence) ||
      sim->count_events(EventKind::SelftestFail)) {
    return Result<BenchReport>::fail("divergence during benchmark run");
  }
  rep.seconds = elapsed;
  rep.cycles_per_second = elapsed > 0 ? static_cast<double>(rep.cycles) / elapsed : 0.0;
  rep.equation_evals_per_second = rep.cycles_per_second * 4.0 * options.equations;
  return Result<BenchReport>::ok(std::move(rep));
}

}  // namespace duplex
