// duplex/sim.hpp - Two controllers in lockstep: frame exchange, cross
// comparison, heartbeat supervision, permissive board resolution (power AND
// command), state resync after reboot, and fault injection.
//
// MCU1 drives the power line and MCU2 the command line of every output, so a
// board output is energized only while both controllers are alive and agree.
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "duplex/events.hpp"
#include "duplex/mcu.hpp"
#include "duplex/util.hpp"

namespace duplex
{

enum class FaultKind
{
  CodeBitflip,
  DataBitflip,
  OpcodeSemantics,
  FrameDrop,
  FrameCorrupt,
  OutputStuck,
  McuKill,
};

const char * fault_kind_name(FaultKind k);

// One injected fault. `duration` 0 means permanent. Code flips with duration
// 0 live in the image store and survive reboot reloads; a bounded duration
// means a one-shot RAM flip that a reload heals. Data flips are always
// one-shot. Window kinds (opcode semantics, frame faults, stuck outputs) are
// active for [at_cycle, at_cycle + duration).
struct FaultSpec
{
  FaultKind kind = FaultKind::CodeBitflip;
  int mcu = 1;                           // 1 or 2; frame faults: the sender
  InstanceId instance = InstanceId::I1;  // code/data/opcode kinds
  uint32_t offset = 0;                   // byte offset in image (code) or data region
  uint32_t bit = 0;                      // 0..7
  std::string opcode;                    // mnemonic, opcode-semantics kind
  uint32_t output = 0;                   // line index, output-stuck kind
  int stuck_value = 1;                   // 0 or 1
  uint32_t at_cycle = 0;
  uint32_t duration = 0;
};

struct InputSet
{
  uint32_t at = 0;
  // "name" for scalars, "name(i)" for one element of an array input
  std::vector<std::pair<std::string, int64_t>> sets;
};

struct Scenario
{
  std::vector<InputSet> inputs;
  std::vector<FaultSpec> faults;
  uint32_t cycles = 0;
  uint64_t seed = 0;
};

Result<Scenario> parse_scenario_json(const std::string & text);

struct SimConfig
{
  McuConfig mcu;
  uint64_t seed = 0;
};

struct RunResult
{
  std::vector<std::vector<bool>> board_history;
  size_t event_count = 0;
};

TypedModel clone_typed_model(const TypedModel & tm);

class DuplexSim
{
public:
  static Result<DuplexSim> create(TypedModel tm, ImageA image_a, ImageB image_b, MemoryMap map,
                                  SimConfig config);

  // Validates and arms a fault. Errors are reported before any cycle runs.
  Result<bool> inject(const FaultSpec & fault);

  // One lockstep cycle; returns the resolved board output vector.
  const std::vector<bool> & step(std::span<const int64_t> inputs);

  // Scripted run: latched inputs, armed faults, `cycles` steps.
  Result<RunResult> run(const Scenario & scenario);

  const Mcu & mcu(int id) const { return id == 1 ? *mcu1_ : *mcu2_; }
  Mcu & mcu_mut(int id) { return id == 1 ? *mcu1_ : *mcu2_; }
  const std::vector<bool> & board() const { return board_; }
  uint32_t cycles_run() const { return cycle_; }
  const TypedModel & model() const { return tm_; }

  const std::vector<TraceEvent> & trace() const { return trace_; }
  void clear_trace() { trace_.clear(); }
  size_t count_events(EventKind kind) const;

  // Full JSONL trace: header line with versions and the configuration hash,
  // then one event per line. Byte-identical for identical inputs.
  std::string trace_jsonl() const;

private:
  DuplexSim() = default;

  void apply_due_faults(uint32_t cycle, EventSink & ev);
  void resolve_resync(uint32_t cycle, EventSink & ev);
  std::optional<Frame> transmit(int sender, const std::optional<Frame> & f, uint32_t cycle);
  bool fault_active(const FaultSpec & f, uint32_t cycle) const;

  TypedModel tm_;
  CanonicalLayout layout_;
  MemoryMap map_;
  SimConfig config_;
  std::unique_ptr<Mcu> mcu1_;
  std::unique_ptr<Mcu> mcu2_;
  std::vector<FaultSpec> faults_;
  std::vector<bool> board_;
  std::vector<bool> prev_board_;
  std::vector<TraceEvent> trace_;
  uint32_t cycle_ = 0;
  uint64_t rng_state_ = 0;
  uint64_t config_hash_ = 0;
};

}  // namespace duplex
