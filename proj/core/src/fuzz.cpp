// duplex/fuzz.cpp
#include "duplex/fuzz.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <mutex>
#include <thread>

#include "duplex/build.hpp"
#include "duplex/gen.hpp"
#include "duplex/hexfmt.hpp"
#include "duplex/interp.hpp"
#include "duplex/parser.hpp"
#include "duplex/sim.hpp"
#include "duplex/util.hpp"

namespace duplex
{

namespace
{

std::vector<int64_t> random_inputs(const TypedModel & tm, Rng & rng)
{
  std::vector<int64_t> in;
  for (const auto & v : tm.vars) {
    if (v.section != VarSection::Input) continue;
    for (uint32_t i = 0; i < v.type.cell_count(); ++i) {
      if (v.type.scalar.kind == ScalarKind::Bool) {
        in.push_back(rng.range(0, 1));
      } else {
        in.push_back(rng.range(v.type.scalar.lo, v.type.scalar.hi));
      }
    }
  }
  return in;
}

bool has_alarm_events(const DuplexSim & sim)
{
  return sim.count_events(EventKind::LocalDivergence) || sim.count_events(EventKind::CrossDivergence) ||
         sim.count_events(EventKind::HeartbeatTimeout) || sim.count_events(EventKind::SelftestFail) ||
         sim.count_events(EventKind::ReadbackFail);
}

uint32_t run_jobs(uint32_t jobs, uint32_t items, const std::function<void(uint32_t)> & work)
{
  if (jobs == 0) {
    jobs = std::max(1u, std::thread::hardware_concurrency());
  }
  jobs = std::min(jobs, std::max(1u, items));
  if (jobs <= 1) {
    for (uint32_t i = 0; i < items; ++i) work(i);
    return jobs;
  }
  std::vector<std::thread> pool;
  std::atomic<uint32_t> next{0};
  for (uint32_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&]() {
      for (uint32_t i = next.fetch_add(1); i < items; i = next.fetch_add(1)) {
        work(i);
      }
    });
  }
  for (auto & th : pool) th.join();
  return jobs;
}

}  // namespace

FuzzReport run_fuzz(const FuzzOptions & options)
{
  FuzzReport report;
  report.programs = options.programs;
  std::mutex mu;

  auto one_program = [&](uint32_t i) {
    uint64_t seed = options.seed + i;
    std::string repro = "duplex fuzz --programs 1 --cycles " + std::to_string(options.cycles) +
                        " --seed " + std::to_string(seed);
    auto fail = [&](std::string reason) {
      std::lock_guard<std::mutex> lock(mu);
      report.failures.push_back({seed, std::move(reason), repro});
    };

    GenConfig gc;
    gc.seed = seed;
    Model model = gen_program(gc);
    std::string text = print_model(model);
    ParseResult reparsed = parse_model(text);
    if (!reparsed) {
      fail("canonical text does not reparse: " + format_diagnostics(reparsed.diagnostics));
      return;
    }
    if (!model_equal(model, *reparsed.model)) {
      fail("print/parse round trip changed the model");
      return;
    }
    BuildOutcome built = build_model(model, {});
    if (!built) {
      fail("build failed: " + built.error + format_diagnostics(built.diagnostics));
      return;
    }
    BuildArtifacts & a = *built.artifacts;

    // One image record per assembly instruction line.
    auto decoded = hex_decode(a.hex_b);
    if (!decoded || decoded.data_records != a.asm_b.instruction_count()) {
      fail("image records != instruction lines");
      return;
    }
    {
      std::lock_guard<std::mutex> lock(mu);
      report.asm_lines += a.asm_b.instruction_count();
      report.hex_records_b += decoded.data_records;
    }

    SimConfig sc;
    sc.mcu.instruction_budget = a.budget;
    sc.mcu.selftest_opcodes_per_cycle = options.selftest_opcodes_per_cycle;
    sc.seed = seed;
    auto sim = DuplexSim::create(clone_typed_model(a.typed), a.image_a, a.image_b, a.map, sc);
    if (!sim) {
      fail("sim: " + sim.error);
      return;
    }

    std::vector<int64_t> cells = initial_cells(a.typed);
    auto out_ids = output_var_ids(a.typed);
    auto state_ids = state_var_ids(a.typed);
    Rng rng(seed ^ 0xABCDEF12345ull);

    for (uint32_t c = 0; c < options.cycles; ++c) {
      std::vector<int64_t> in = random_inputs(a.typed, rng);
      StepResult ref = interp_step(a.typed, cells, in);
      if (ref.trap) {
        fail(std::string("generator produced a trapping model: ") + trap_name(ref.trap->kind));
        return;
      }
      if (ref.ops > a.bound.max_ops) {
        fail("dynamic op count " + std::to_string(ref.ops) + " exceeds bound " +
             std::to_string(a.bound.max_ops));
        return;
      }
      const std::vector<bool> & board = sim->step(in);

      std::vector<uint8_t> ref_out = canonical_bytes(a.typed, cells, out_ids);
      std::vector<uint8_t> ref_state = canonical_bytes(a.typed, cells, state_ids);
      for (int mcu_id : {1, 2}) {
        if (sim->mcu(mcu_id).read_canonical_outputs() != ref_out) {
          fail("instance outputs differ from the reference interpreter at cycle " +
               std::to_string(c));
          return;
        }
        if (sim->mcu(mcu_id).read_canonical_state() != ref_state) {
          fail("instance state differs from the reference interpreter at cycle " +
               std::to_string(c));
          return;
        }
      }
      std::vector<int64_t> ref_vals = read_section(a.typed, cells, out_ids);
      for (size_t k = 0; k < board.size(); ++k) {
        if (board[k] != (ref_vals[k] != 0)) {
          fail("board line differs from the reference at cycle " + std::to_string(c));
          return;
        }
      }
    }
    if (has_alarm_events(*sim)) {
      fail("alarm event on a healthy run");
      return;
    }
    uint64_t runs = sim->mcu(1).instance_runs() + sim->mcu(2).instance_runs();
    if (runs != 4ull * options.cycles) {
      fail("expected 4 instance executions per cycle");
      return;
    }
    std::lock_guard<std::mutex> lock(mu);
    report.total_cycles += options.cycles;
  };

  run_jobs(options.jobs, options.programs, one_program);
  std::sort(report.failures.begin(), report.failures.end(),
            [](const FuzzFailure & a, const FuzzFailure & b) { return a.seed < b.seed; });
  return report;
}

BitflipReport run_bitflip_campaign(const BitflipOptions & options)
{
  BitflipReport report;
  std::mutex mu;

  auto one_fault = [&](uint32_t i) {
    uint64_t seed = options.seed + i;
    std::string repro = "bitflip campaign item seed " + std::to_string(seed);
    auto fail = [&](std::string reason) {
      std::lock_guard<std::mutex> lock(mu);
      report.failures.push_back({seed, std::move(reason), repro});
    };

    GenConfig gc;
    gc.seed = seed * 3 + 1;
    gc.statement_budget = 8;
    Model model = gen_program(gc);
    BuildOutcome built = build_model(model, {});
    if (!built) {
      fail("build failed: " + built.error);
      return;
    }
    BuildArtifacts & a = *built.artifacts;
    Rng rng(seed ^ 0x5151515151ull);

    SimConfig sc;
    sc.mcu.instruction_budget = a.budget;
    sc.mcu.selftest_opcodes_per_cycle = 4;
    sc.seed = seed;

    // Fault-free reference run.
    auto healthy = DuplexSim::create(clone_typed_model(a.typed), a.image_a, a.image_b, a.map, sc);
    if (!healthy) {
      fail("sim: " + healthy.error);
      return;
    }
    // The faulted run.
    auto faulted = DuplexSim::create(clone_typed_model(a.typed), a.image_a, a.image_b, a.map, sc);

    FaultSpec f;
    f.mcu = rng.range(1, 2) == 1 ? 1 : 2;
    f.instance = rng.range(0, 1) == 0 ? InstanceId::I1 : InstanceId::I2;
    bool code = rng.range(0, 1) == 0;
    f.kind = code ? FaultKind::CodeBitflip : FaultKind::DataBitflip;
    if (code) {
      uint32_t size = healthy->mcu(f.mcu).image_code_size(f.instance);
      f.offset = static_cast<uint32_t>(rng.range(0, static_cast<int64_t>(size) - 1));
      f.duration = rng.range(0, 1) == 0 ? 0 : 1;  // flash-level or RAM-level
    } else {
      // Prefer cells the program actually uses.
      uint32_t cells = f.instance == InstanceId::I1 ? a.image_a.data_cells : a.image_b.data_cells;
      f.offset = static_cast<uint32_t>(rng.range(0, static_cast<int64_t>(4 * cells) - 1));
      f.duration = 1;
    }
    f.bit = static_cast<uint32_t>(rng.range(0, 7));
    f.at_cycle = static_cast<uint32_t>(rng.range(1, options.cycles / 2));
    if (auto r = faulted->inject(f); !r) {
      fail("inject: " + r.error);
      return;
    }

    Rng input_rng(seed ^ 0x777777ull);
    struct Snapshot
    {
      std::vector<bool> board;
      bool drove1, drove2;
      std::vector<uint8_t> out1, st1, out2, st2;
    };
    std::vector<Snapshot> healthy_snaps;
    std::vector<std::vector<int64_t>> inputs_per_cycle;
    for (uint32_t c = 0; c < options.cycles; ++c) {
      inputs_per_cycle.push_back(random_inputs(a.typed, input_rng));
      const auto & board = healthy->step(inputs_per_cycle.back());
      Snapshot s;
      s.board = board;
      s.drove1 = true;
      s.drove2 = true;
      s.out1 = healthy->mcu(1).read_canonical_outputs();
      s.st1 = healthy->mcu(1).read_canonical_state();
      s.out2 = healthy->mcu(2).read_canonical_outputs();
      s.st2 = healthy->mcu(2).read_canonical_state();
      healthy_snaps.push_back(std::move(s));
    }
    if (has_alarm_events(*healthy)) {
      fail("alarm event on the fault-free run");
      return;
    }

    std::optional<uint32_t> first_divergence;
    for (uint32_t c = 0; c < options.cycles; ++c) {
      const auto & board = faulted->step(inputs_per_cycle[c]);
      if (!first_divergence) {
        for (const auto & e : faulted->trace()) {
          if (e.kind == EventKind::LocalDivergence || e.kind == EventKind::CrossDivergence) {
            first_divergence = e.cycle;
            break;
          }
        }
      }
      // Fail-safe: never energize a line the fault-free run leaves off.
      for (size_t k = 0; k < board.size(); ++k) {
        if (board[k] && !healthy_snaps[c].board[k]) {
          fail("hazardous board output at cycle " + std::to_string(c));
          return;
        }
      }
      // Before the first divergence both controllers must match the healthy
      // run exactly; a silent behavioural change is a missed detection.
      if (!first_divergence || c < *first_divergence) {
        if (faulted->mcu(1).read_canonical_outputs() != healthy_snaps[c].out1 ||
            faulted->mcu(1).read_canonical_state() != healthy_snaps[c].st1 ||
            faulted->mcu(2).read_canonical_outputs() != healthy_snaps[c].out2 ||
            faulted->mcu(2).read_canonical_state() != healthy_snaps[c].st2) {
          fail("undetected behavioural change at cycle " + std::to_string(c));
          return;
        }
        if (board != healthy_snaps[c].board) {
          fail("board deviates without a divergence event at cycle " + std::to_string(c));
          return;
        }
      }
    }

    std::lock_guard<std::mutex> lock(mu);
    ++report.faults_run;
    if (first_divergence) {
      ++report.behavior_changing;
    } else {
      ++report.silent;
    }
  };

  run_jobs(options.jobs, options.faults, one_fault);
  std::sort(report.failures.begin(), report.failures.end(),
            [](const FuzzFailure & a, const FuzzFailure & b) { return a.seed < b.seed; });
  return report;
}

}  // namespace duplex
