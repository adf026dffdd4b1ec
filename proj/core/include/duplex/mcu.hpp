// duplex/mcu.hpp - One simulated controller: both images loaded, the fixed
// safety sequencer run every cycle. The sequencer is host code: no model
// content can skip the self-test slice, the dual execution, or the local
// comparison.
//
// Per cycle, in order: self-test slice over the stored instruction oracle ->
// execute the chain-one image -> execute the chain-two image, each under the
// instruction budget -> compare outputs and canonical state of the two
// instances. Any trap, budget exhaustion, or local mismatch means the cycle
// drives nothing and the controller reboots; self-test and readback failures
// halt it permanently. A halted controller never drives a line again.
#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "duplex/codegen_a.hpp"
#include "duplex/codegen_b.hpp"
#include "duplex/complexity.hpp"
#include "duplex/events.hpp"
#include "duplex/memmap.hpp"
#include "duplex/selftest.hpp"
#include "duplex/typecheck.hpp"
#include "duplex/vm_common.hpp"

namespace duplex
{

enum class McuId
{
  Mcu1,
  Mcu2,
};

const char * mcu_name(McuId id);

enum class McuMode
{
  Running,
  Rebooting,
  Halted,
};

const char * mcu_mode_name(McuMode m);

// Which cells of the data regions hold outputs and state, in declaration
// order: the canonical serialization both digests are computed over.
struct CanonicalLayout
{
  struct Run
  {
    uint32_t cell = 0;
    uint32_t count = 0;
  };
  std::vector<Run> outputs;
  std::vector<Run> state;
  uint32_t input_cells = 0;
  uint32_t output_cells = 0;

  uint32_t state_cells() const
  {
    uint32_t n = 0;
    for (const auto & r : state) n += r.count;
    return n;
  }
};

CanonicalLayout canonical_layout(const TypedModel & tm);

struct McuConfig
{
  uint64_t instruction_budget = 0;
  uint32_t selftest_opcodes_per_cycle = 4;  // 0 disables the slice (test hook)
  uint32_t reboot_cycles = 5;               // R
  uint32_t reboot_storm_limit = 3;          // reboots tolerated per window
  uint32_t reboot_storm_window = 100;       // cycles
  // Consecutive missing or invalid partner frames tolerated; the next one
  // declares the partner dead.
  uint32_t heartbeat_tolerance = 3;
};

struct Frame
{
  uint16_t seq = 0;
  uint32_t cycle = 0;
  uint32_t out_digest = 0;
  uint32_t state_digest = 0;
  bool alive = true;
  bool rebooting = false;
  bool resync_request = false;
};

constexpr size_t kFrameSize = 20;
constexpr uint8_t kFrameSync = 0xA5;

std::array<uint8_t, kFrameSize> encode_frame(const Frame & f);
// Validates sync byte and trailing CRC-32; nullopt means "treat as absent".
std::optional<Frame> decode_frame(std::span<const uint8_t> bytes);

class Mcu
{
public:
  // `initial_cells` holds the power-up value of every declared variable and
  // loop-scratch cell, in layout order; spill scratch starts at zero.
  static Result<Mcu> load(McuId id, const ImageA & image_a, const ImageB & image_b,
                          const MemoryMap & map, const CanonicalLayout & layout,
                          std::vector<int64_t> initial_cells, const McuConfig & config);

  McuId id() const { return id_; }
  McuMode mode() const { return mode_; }
  uint32_t reboot_count() const { return reboot_count_; }
  bool resync_pending() const { return resync_pending_; }
  uint64_t cycles_executed() const { return cycle_; }

  // Reboot countdown and image/data reload. Called first each cycle.
  void begin_cycle(uint32_t cycle, EventSink & events);

  // Self-test slice, dual execution, local comparison. Only acts when
  // Running; fills driven lines and digests.
  void run_cycle(uint32_t cycle, std::span<const int64_t> inputs, EventSink & events);

  // Frame this controller puts on the link this cycle; nullopt when halted.
  std::optional<Frame> make_frame(uint32_t cycle);

  // Partner-frame validation: heartbeat bookkeeping and cross comparison.
  void receive_partner_frame(uint32_t cycle, const std::optional<Frame> & frame,
                             EventSink & events);

  // Readback of this controller's own lines after board resolution.
  void apply_readback(uint32_t cycle, std::span<const bool> sensed, EventSink & events);

  // Emits cycle_ok when the whole cycle went through cleanly.
  void end_cycle(uint32_t cycle, EventSink & events);

  const std::vector<bool> & lines() const { return lines_; }
  uint32_t out_digest() const { return out_digest_; }
  uint32_t state_digest() const { return state_digest_; }

  // Canonical state transfer (resync support).
  std::vector<uint8_t> read_canonical_state() const;
  std::vector<uint8_t> read_canonical_outputs() const;
  void install_canonical_state(std::span<const uint8_t> bytes);
  // User-function executions so far (two per healthy cycle).
  uint64_t instance_runs() const { return instance_runs_; }
  // Called by the orchestrator when a completed reboot cannot resync: the
  // controller restarts the reboot, which counts toward the storm limit.
  void resync_refused(uint32_t cycle, EventSink & events);
  void resync_done(uint32_t cycle, EventSink & events);

  // Fault hooks.
  void kill();  // silent permanent stop (power loss)
  void flip_code_once(InstanceId instance, uint32_t offset, uint32_t bit);
  void add_persistent_code_flip(InstanceId instance, uint32_t offset, uint32_t bit);
  void flip_data_once(InstanceId instance, uint32_t offset, uint32_t bit);
  void set_corruption(InstanceId instance, std::optional<OpcodeCorruption> c);

  uint32_t image_code_size(InstanceId instance) const
  {
    return instance == InstanceId::I1 ? static_cast<uint32_t>(pristine_a_.code.size())
                                      : static_cast<uint32_t>(pristine_b_.code.size());
  }
  const MemoryMap & map() const { return map_; }

  // Direct memory view for tests.
  std::span<const uint8_t> memory() const { return memory_; }

private:
  Mcu() = default;

  EventSource source() const;
  void reload();
  void halt(uint32_t cycle, EventSink & events, const char * reason);
  // Returns false when the storm limit forbids another reboot (halts instead).
  bool start_reboot(uint32_t cycle, EventSink & events, const char * reason);
  void deactivate_lines();

  std::vector<uint8_t> canonical_section(InstanceId instance,
                                         const std::vector<CanonicalLayout::Run> & runs) const;

  McuId id_ = McuId::Mcu1;
  MemoryMap map_;
  CanonicalLayout layout_;
  McuConfig config_;
  ImageA pristine_a_;
  ImageB pristine_b_;
  std::vector<int64_t> initial_cells_;  // declared variable init values
  std::vector<uint8_t> memory_;

  McuMode mode_ = McuMode::Running;
  bool killed_ = false;
  uint32_t reboot_remaining_ = 0;
  bool resync_pending_ = false;
  uint32_t reboot_count_ = 0;
  std::deque<uint32_t> reboot_starts_;

  uint64_t cycle_ = 0;
  uint16_t seq_ = 0;
  size_t selftest_cursor_ = 0;
  uint32_t miss_streak_ = 0;
  uint64_t instance_runs_ = 0;
  std::optional<uint16_t> last_partner_seq_;

  std::optional<OpcodeCorruption> corrupt_a_;
  std::optional<OpcodeCorruption> corrupt_b_;
  struct CodeFlip
  {
    InstanceId instance;
    uint32_t offset;
    uint32_t bit;
  };
  std::vector<CodeFlip> persistent_flips_;

  std::vector<bool> lines_;
  bool drove_ = false;
  bool healthy_cycle_ = false;
  uint32_t out_digest_ = 0;
  uint32_t state_digest_ = 0;
};

}  // namespace duplex
