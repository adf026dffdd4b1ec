// duplex command line: build, relay, run, check, fuzz, inject, bench.
//
// Exit codes: 0 success, 1 verification or campaign failure, 2 usage or
// input error.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "duplex/bench.hpp"
#include "duplex/build.hpp"
#include "duplex/exhaustive.hpp"
#include "duplex/fuzz.hpp"
#include "duplex/gen.hpp"
#include "duplex/parser.hpp"
#include "duplex/printer.hpp"
#include "duplex/relay.hpp"
#include "duplex/sim.hpp"

namespace
{

constexpr int kOk = 0;
constexpr int kVerificationFailure = 1;
constexpr int kInputError = 2;

std::optional<std::string> read_file(const std::string & path)
{
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool write_file(const std::string & path, const std::string & content)
{
  std::ofstream f(path, std::ios::binary);
  if (!f) return false;
  f << content;
  return f.good();
}

void print_diagnostics(const std::string & path, const std::vector<duplex::Diagnostic> & ds)
{
  for (const auto & d : ds) {
    std::cerr << path << ":" << duplex::format_diagnostic(d) << "\n";
  }
}

int build_from_path(const std::string & path, const duplex::BuildOptions & options,
                    duplex::BuildOutcome & out)
{
  auto source = read_file(path);
  if (!source) {
    std::cerr << "error: cannot read " << path << "\n";
    return kInputError;
  }
  out = duplex::build_source(*source, options);
  if (!out) {
    if (!out.diagnostics.empty()) {
      print_diagnostics(path, out.diagnostics);
    }
    if (!out.error.empty()) {
      std::cerr << path << ": error: " << out.error << "\n";
    }
    return kInputError;
  }
  return kOk;
}

int cmd_build(const std::string & model_path, const std::string & out_dir, unsigned record_bytes)
{
  duplex::BuildOptions options;
  if (record_bytes != 0) {
    options.record_bytes_a = record_bytes;
    options.record_bytes_b = record_bytes;
  }
  duplex::BuildOutcome out;
  if (int rc = build_from_path(model_path, options, out); rc != kOk) return rc;
  auto written = duplex::write_artifacts(*out.artifacts, out_dir);
  if (!written) {
    std::cerr << "error: " << written.error << "\n";
    return kInputError;
  }
  std::cout << "fingerprint " << out.artifacts->fingerprint << "\n";
  for (const auto & f : *written.value) {
    std::cout << "wrote " << f << "\n";
  }
  return kOk;
}

int cmd_relay(const std::string & netlist_path, const std::string & out_path)
{
  auto source = read_file(netlist_path);
  if (!source) {
    std::cerr << "error: cannot read " << netlist_path << "\n";
    return kInputError;
  }
  duplex::SchematicResult sr = duplex::parse_schematic(*source);
  if (!sr) {
    print_diagnostics(netlist_path, sr.diagnostics);
    return kInputError;
  }
  duplex::Model model = duplex::translate_schematic(*sr.schematic);
  std::string text = duplex::print_model(model);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else if (!write_file(out_path, text)) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return kInputError;
  }
  return kOk;
}

int run_scenario(const std::string & model_path, const std::string & scenario_path,
                 uint32_t cycles_flag, uint64_t seed_flag,
                 const std::vector<std::string> & inline_faults, const std::string & trace_path)
{
  duplex::BuildOutcome out;
  if (int rc = build_from_path(model_path, {}, out); rc != kOk) return rc;
  duplex::BuildArtifacts & a = *out.artifacts;

  duplex::Scenario scenario;
  if (!scenario_path.empty()) {
    auto text = read_file(scenario_path);
    if (!text) {
      std::cerr << "error: cannot read " << scenario_path << "\n";
      return kInputError;
    }
    auto parsed = duplex::parse_scenario_json(*text);
    if (!parsed) {
      std::cerr << "error: " << parsed.error << "\n";
      return kInputError;
    }
    scenario = std::move(*parsed.value);
  }
  if (cycles_flag > 0) scenario.cycles = cycles_flag;
  if (seed_flag != 0) scenario.seed = seed_flag;
  for (const std::string & ftext : inline_faults) {
    auto parsed = duplex::parse_scenario_json("{\"faults\":[" + ftext + "]}");
    if (!parsed) {
      std::cerr << "error: bad --fault: " << parsed.error << "\n";
      return kInputError;
    }
    for (auto & f : parsed.value->faults) scenario.faults.push_back(std::move(f));
  }

  duplex::SimConfig sc;
  sc.mcu.instruction_budget = a.budget;
  sc.seed = scenario.seed;
  auto sim = duplex::DuplexSim::create(duplex::clone_typed_model(a.typed), a.image_a, a.image_b,
                                       a.map, sc);
  if (!sim) {
    std::cerr << "error: " << sim.error << "\n";
    return kInputError;
  }
  auto result = sim->run(scenario);
  if (!result) {
    std::cerr << "error: " << result.error << "\n";
    return kInputError;
  }
  if (!trace_path.empty()) {
    if (!write_file(trace_path, sim->trace_jsonl())) {
      std::cerr << "error: cannot write " << trace_path << "\n";
      return kInputError;
    }
  }
  uint32_t last = scenario.cycles ? scenario.cycles - 1 : 0;
  std::cout << "cycles " << scenario.cycles << "\n";
  std::cout << "mcu1 " << duplex::mcu_mode_name(sim->mcu(1).mode()) << " reboots "
            << sim->mcu(1).reboot_count() << "\n";
  std::cout << "mcu2 " << duplex::mcu_mode_name(sim->mcu(2).mode()) << " reboots "
            << sim->mcu(2).reboot_count() << "\n";
  if (!result.value->board_history.empty()) {
    std::cout << "board@" << last << " ";
    for (bool b : result.value->board_history.back()) std::cout << (b ? '1' : '0');
    std::cout << "\n";
  }
  for (duplex::EventKind k :
       {duplex::EventKind::LocalDivergence, duplex::EventKind::CrossDivergence,
        duplex::EventKind::HeartbeatTimeout, duplex::EventKind::SelftestFail,
        duplex::EventKind::ReadbackFail}) {
    size_t n = sim->count_events(k);
    if (n > 0) {
      std::cout << duplex::event_kind_name(k) << " " << n << "\n";
    }
  }
  return kOk;
}

int cmd_check(const std::string & model_path, uint64_t max_states)
{
  auto source = read_file(model_path);
  if (!source) {
    std::cerr << "error: cannot read " << model_path << "\n";
    return kInputError;
  }
  auto parsed = duplex::parse_model(*source);
  if (!parsed) {
    print_diagnostics(model_path, parsed.diagnostics);
    return kInputError;
  }
  auto typed = duplex::typecheck(*parsed.model);
  if (!typed) {
    print_diagnostics(model_path, typed.diagnostics);
    return kInputError;
  }
  duplex::ExhaustiveReport rep = duplex::check_exhaustive(*typed.typed, max_states);
  switch (rep.verdict) {
    case duplex::ExhaustiveReport::Verdict::Holds:
      std::cout << "holds, " << rep.states_visited << " states\n";
      return kOk;
    case duplex::ExhaustiveReport::Verdict::TooLarge:
      std::cout << "state space too large: estimate " << rep.estimate << " > limit " << max_states
                << "\n";
      return kInputError;
    case duplex::ExhaustiveReport::Verdict::Violated: {
      std::cout << "violated: " << rep.violation << "\n";
      std::cout << "witness length " << rep.witness.size() << "\n";
      for (size_t c = 0; c < rep.witness.size(); ++c) {
        std::cout << "  cycle " << c << " inputs";
        for (int64_t v : rep.witness[c]) std::cout << " " << v;
        std::cout << "\n";
      }
      return kVerificationFailure;
    }
  }
  return kInputError;
}

int cmd_fuzz(uint32_t programs, uint32_t cycles, uint64_t seed, uint32_t jobs)
{
  duplex::FuzzOptions opt;
  opt.programs = programs;
  opt.cycles = cycles;
  opt.seed = seed;
  opt.jobs = jobs;
  duplex::FuzzReport rep = duplex::run_fuzz(opt);
  std::cout << "programs " << rep.programs << "\n";
  std::cout << "cycles " << rep.total_cycles << "\n";
  std::cout << "asm_lines " << rep.asm_lines << " hex_records " << rep.hex_records_b << "\n";
  std::cout << "failures " << rep.failures.size() << "\n";
  for (const auto & f : rep.failures) {
    std::cout << "seed " << f.seed << ": " << f.reason << "\n  repro: " << f.repro << "\n";
  }
  return rep.ok() ? kOk : kVerificationFailure;
}

int cmd_bench(uint32_t equations, uint64_t seed, double seconds)
{
  duplex::BenchOptions opt;
  opt.equations = equations;
  opt.seed = seed;
  opt.min_seconds = seconds;
  auto rep = duplex::run_bench(opt);
  if (!rep) {
    std::cerr << "error: " << rep.error << "\n";
    return kInputError;
  }
  std::printf("equations            %u\n", rep->equations);
  std::printf("duplex cycles        %llu\n", static_cast<unsigned long long>(rep->cycles));
  std::printf("elapsed seconds      %.3f\n", rep->seconds);
  std::printf("cycles/second        %.3f\n", rep->cycles_per_second);
  std::printf("equation evals/sec   %.0f (4 instances)\n", rep->equation_evals_per_second);
  std::printf("model fingerprint    %s\n", rep->fingerprint.c_str());
  return rep->cycles_per_second >= 1.0 ? kOk : kVerificationFailure;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"duplex: diverse-compilation 2oo2 safety controller toolkit"};
  app.require_subcommand(1);

  std::string model_path;
  std::string netlist_path;
  std::string out_dir = "out";
  std::string out_path;
  std::string scenario_path;
  std::string trace_path;
  std::vector<std::string> inline_faults;
  unsigned record_bytes = 0;
  uint32_t cycles = 0;
  uint64_t seed = 0;
  uint64_t max_states = 1ull << 20;
  uint32_t programs = 1000;
  uint32_t fuzz_cycles = 100;
  uint32_t jobs = 0;
  uint32_t equations = 50000;
  double bench_seconds = 2.0;

  auto * build = app.add_subcommand("build", "Compile a model through both chains");
  build->add_option("model", model_path, "model source file")->required();
  build->add_option("--out", out_dir, "artifact directory");
  build->add_option("--record-bytes", record_bytes, "bytes per image text record (both images)");

  auto * relay = app.add_subcommand("relay", "Translate a relay netlist to a model");
  relay->add_option("netlist", netlist_path, "netlist file")->required();
  relay->add_option("--out", out_path, "output model path ('-' for stdout)");

  auto * runc = app.add_subcommand("run", "Run a scenario on the duplex simulator");
  runc->add_option("model", model_path, "model source file")->required();
  runc->add_option("--scenario", scenario_path, "scenario JSON file");
  runc->add_option("--cycles", cycles, "cycle count (overrides scenario)");
  runc->add_option("--seed", seed, "seed (overrides scenario)");
  runc->add_option("--trace", trace_path, "write JSONL trace here");

  auto * inject = app.add_subcommand("inject", "Run with inline fault specs");
  inject->add_option("model", model_path, "model source file")->required();
  inject->add_option("--fault", inline_faults, "fault spec JSON object (repeatable)")
    ->required();
  inject->add_option("--scenario", scenario_path, "scenario JSON file");
  inject->add_option("--cycles", cycles, "cycle count");
  inject->add_option("--seed", seed, "seed");
  inject->add_option("--trace", trace_path, "write JSONL trace here");

  auto * check = app.add_subcommand("check", "Exhaustive invariant check");
  check->add_option("model", model_path, "model source file")->required();
  check->add_option("--max-states", max_states, "state-space limit");

  auto * fuzz = app.add_subcommand("fuzz", "Random-model differential campaign");
  fuzz->add_option("--programs", programs, "number of generated models");
  fuzz->add_option("--cycles", fuzz_cycles, "cycles per model");
  fuzz->add_option("--seed", seed, "base seed");
  fuzz->add_option("--jobs", jobs, "worker threads (0 = hardware)");

  auto * bench = app.add_subcommand("bench", "Interlocking throughput benchmark");
  bench->add_option("--equations", equations, "boolean equations per cycle");
  bench->add_option("--seed", seed, "seed");
  bench->add_option("--seconds", bench_seconds, "minimum measured seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return kInputError;
  }

  if (build->parsed()) return cmd_build(model_path, out_dir, record_bytes);
  if (relay->parsed()) return cmd_relay(netlist_path, out_path);
  if (runc->parsed()) {
    return run_scenario(model_path, scenario_path, cycles, seed, {}, trace_path);
  }
  if (inject->parsed()) {
    if (cycles == 0) cycles = 20;
    return run_scenario(model_path, scenario_path, cycles, seed, inline_faults, trace_path);
  }
  if (check->parsed()) return cmd_check(model_path, max_states);
  if (fuzz->parsed()) return cmd_fuzz(programs, fuzz_cycles, seed, jobs);
  if (bench->parsed()) return cmd_bench(equations, seed, bench_seconds);
  return kInputError;
}
