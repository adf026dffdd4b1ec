// duplex/mcu.cpp
#include "duplex/mcu.hpp"

#include <algorithm>

#include "duplex/vm_a.hpp"
#include "duplex/vm_b.hpp"

namespace duplex
{

const char * mcu_name(McuId id) { return id == McuId::Mcu1 ? "MCU1" : "MCU2"; }

const char * mcu_mode_name(McuMode m)
{
  switch (m) {
    case McuMode::Running: return "running";
    case McuMode::Rebooting: return "rebooting";
    case McuMode::Halted: return "halted";
  }
  return "?";
}

CanonicalLayout canonical_layout(const TypedModel & tm)
{
  CanonicalLayout cl;
  for (const auto & v : tm.vars) {
    switch (v.section) {
      case VarSection::Input:
        cl.input_cells += v.type.cell_count();
        break;
      case VarSection::Output:
        cl.outputs.push_back({v.cell_offset, v.type.cell_count()});
        cl.output_cells += v.type.cell_count();
        break;
      case VarSection::State:
        cl.state.push_back({v.cell_offset, v.type.cell_count()});
        break;
    }
  }
  return cl;
}

std::array<uint8_t, kFrameSize> encode_frame(const Frame & f)
{
  std::array<uint8_t, kFrameSize> b{};
  auto put16 = [&](size_t at, uint16_t v) {
    b[at] = static_cast<uint8_t>(v);
    b[at + 1] = static_cast<uint8_t>(v >> 8);
  };
  auto put32 = [&](size_t at, uint32_t v) {
    b[at] = static_cast<uint8_t>(v);
    b[at + 1] = static_cast<uint8_t>(v >> 8);
    b[at + 2] = static_cast<uint8_t>(v >> 16);
    b[at + 3] = static_cast<uint8_t>(v >> 24);
  };
  b[0] = kFrameSync;
  put16(1, f.seq);
  put32(3, f.cycle);
  put32(7, f.out_digest);
  put32(11, f.state_digest);
  b[15] = static_cast<uint8_t>((f.alive ? 1 : 0) | (f.rebooting ? 2 : 0) |
                               (f.resync_request ? 4 : 0));
  put32(16, crc32(std::span<const uint8_t>(b.data(), 16)));
  return b;
}

std::optional<Frame> decode_frame(std::span<const uint8_t> bytes)
{
  if (bytes.size() != kFrameSize) return std::nullopt;
  if (bytes[0] != kFrameSync) return std::nullopt;
  auto get16 = [&](size_t at) {
    return static_cast<uint16_t>(bytes[at] | static_cast<uint16_t>(bytes[at + 1]) << 8);
  };
  auto get32 = [&](size_t at) {
    return static_cast<uint32_t>(bytes[at]) | static_cast<uint32_t>(bytes[at + 1]) << 8 |
           static_cast<uint32_t>(bytes[at + 2]) << 16 | static_cast<uint32_t>(bytes[at + 3]) << 24;
  };
  if (get32(16) != crc32(bytes.subspan(0, 16))) return std::nullopt;
  Frame f;
  f.seq = get16(1);
  f.cycle = get32(3);
  f.out_digest = get32(7);
  f.state_digest = get32(11);
  uint8_t status = bytes[15];
  f.alive = status & 1;
  f.rebooting = status & 2;
  f.resync_request = status & 4;
  return f;
}

EventSource Mcu::source() const
{
  return id_ == McuId::Mcu1 ? EventSource::Mcu1 : EventSource::Mcu2;
}

Result<Mcu> Mcu::load(McuId id, const ImageA & image_a, const ImageB & image_b,
                      const MemoryMap & map, const CanonicalLayout & layout,
                      std::vector<int64_t> initial_cells, const McuConfig & config)
{
  if (auto v = validate_map(map); !v) {
    return Result<Mcu>::fail(v.error);
  }
  if (image_a.code.size() > map.code_a.size) {
    return Result<Mcu>::fail("chain-one image larger than CODE_A");
  }
  if (image_b.code.size() > map.code_b.size) {
    return Result<Mcu>::fail("chain-two image larger than CODE_B");
  }
  if (4ull * image_a.data_cells > map.data_a.size) {
    return Result<Mcu>::fail("chain-one data does not fit DATA_A");
  }
  if (4ull * image_b.data_cells > map.data_b.size) {
    return Result<Mcu>::fail("chain-two data does not fit DATA_B");
  }
  if (image_b.code.size() % 4 != 0) {
    return Result<Mcu>::fail("chain-two image is not a whole number of words");
  }
  Mcu m;
  m.id_ = id;
  m.map_ = map;
  m.layout_ = layout;
  m.config_ = config;
  m.pristine_a_ = image_a;
  m.pristine_b_ = image_b;
  m.initial_cells_ = std::move(initial_cells);
  m.memory_.assign(map.space_size, 0);
  m.lines_.assign(layout.output_cells, false);
  m.reload();
  return Result<Mcu>::ok(std::move(m));
}

void Mcu::reload()
{
  std::fill(memory_.begin(), memory_.end(), 0);
  std::copy(pristine_a_.code.begin(), pristine_a_.code.end(), memory_.begin() + map_.code_a.base);
  std::copy(pristine_b_.code.begin(), pristine_b_.code.end(), memory_.begin() + map_.code_b.base);
  for (const CodeFlip & f : persistent_flips_) {
    flip_code_once(f.instance, f.offset, f.bit);
  }
  for (size_t cell = 0; cell < initial_cells_.size(); ++cell) {
    auto w = static_cast<uint32_t>(static_cast<int32_t>(initial_cells_[cell]));
    uint8_t * a = memory_.data() + map_.data_a.base + 4 * cell;
    a[0] = static_cast<uint8_t>(w);
    a[1] = static_cast<uint8_t>(w >> 8);
    a[2] = static_cast<uint8_t>(w >> 16);
    a[3] = static_cast<uint8_t>(w >> 24);
    uint8_t * b = memory_.data() + map_.data_b.base + 4 * cell;
    b[0] = static_cast<uint8_t>(w >> 24);
    b[1] = static_cast<uint8_t>(w >> 16);
    b[2] = static_cast<uint8_t>(w >> 8);
    b[3] = static_cast<uint8_t>(w);
  }
}

void Mcu::deactivate_lines()
{
  std::fill(lines_.begin(), lines_.end(), false);
  drove_ = false;
}

void Mcu::halt(uint32_t cycle, EventSink & events, const char * reason)
{
  deactivate_lines();
  if (mode_ != McuMode::Halted) {
    mode_ = McuMode::Halted;
    events.push_back(make_event(cycle, source(), EventKind::Halt, {{"reason", reason}}));
  }
}

bool Mcu::start_reboot(uint32_t cycle, EventSink & events, const char * reason)
{
  deactivate_lines();
  while (!reboot_starts_.empty() &&
         cycle - reboot_starts_.front() >= config_.reboot_storm_window) {
    reboot_starts_.pop_front();
  }
  if (reboot_starts_.size() + 1 > config_.reboot_storm_limit) {
    halt(cycle, events, "reboot storm");
    return false;
  }
  reboot_starts_.push_back(cycle);
  ++reboot_count_;
  mode_ = McuMode::Rebooting;
  reboot_remaining_ = config_.reboot_cycles;
  resync_pending_ = false;
  events.push_back(make_event(cycle, source(), EventKind::RebootStart, {{"reason", reason}}));
  return true;
}

void Mcu::begin_cycle(uint32_t cycle, EventSink & events)
{
  (void)cycle;
  (void)events;
  drove_ = false;
  healthy_cycle_ = false;
  if (mode_ == McuMode::Rebooting && !resync_pending_) {
    if (reboot_remaining_ > 0) {
      --reboot_remaining_;
    }
    if (reboot_remaining_ == 0) {
      reload();
      resync_pending_ = true;
    }
  }
}

void Mcu::run_cycle(uint32_t cycle, std::span<const int64_t> inputs, EventSink & events)
{
  cycle_ = cycle;
  deactivate_lines();
  if (mode_ != McuMode::Running) return;

  const SelfTestSuite & suite = SelfTestSuite::instance();
  const OpcodeCorruption * ca = corrupt_a_ ? &*corrupt_a_ : nullptr;
  const OpcodeCorruption * cb = corrupt_b_ ? &*corrupt_b_ : nullptr;
  for (uint32_t i = 0; i < config_.selftest_opcodes_per_cycle; ++i) {
    auto failure = suite.run_slot(selftest_cursor_, ca, cb);
    selftest_cursor_ = (selftest_cursor_ + 1) % suite.opcode_count();
    if (failure) {
      events.push_back(make_event(cycle, source(), EventKind::SelftestFail,
                                  {{"instance", instance_name(failure->vm)},
                                   {"opcode", failure->name}}));
      halt(cycle, events, "selftest failure");
      return;
    }
  }

  std::vector<int64_t> latch_a(layout_.output_cells, 0);
  std::vector<int64_t> latch_b(layout_.output_cells, 0);

  VmAContext ctx_a;
  ctx_a.memory = memory_;
  ctx_a.code = map_.code_a;
  ctx_a.data = map_.data_a;
  ctx_a.entry = map_.code_a.base + pristine_a_.entry;
  VmOutcome oa = run_vm_a(ctx_a, inputs, latch_a, config_.instruction_budget, ca);
  ++instance_runs_;
  if (!oa.ok) {
    events.push_back(make_event(cycle, source(), EventKind::LocalDivergence,
                                {{"instance", "I1"},
                                 {"reason", vm_fault_name(oa.fault)},
                                 {"pc", std::to_string(oa.fault_pc)}}));
    start_reboot(cycle, events, "instance fault");
    return;
  }

  VmBContext ctx_b;
  ctx_b.memory = memory_;
  ctx_b.code = map_.code_b;
  ctx_b.data = map_.data_b;
  ctx_b.entry = map_.code_b.base + pristine_b_.entry;
  VmOutcome ob = run_vm_b(ctx_b, inputs, latch_b, config_.instruction_budget, cb);
  ++instance_runs_;
  if (!ob.ok) {
    events.push_back(make_event(cycle, source(), EventKind::LocalDivergence,
                                {{"instance", "I2"},
                                 {"reason", vm_fault_name(ob.fault)},
                                 {"pc", std::to_string(ob.fault_pc)}}));
    start_reboot(cycle, events, "instance fault");
    return;
  }

  std::vector<uint8_t> out_a = canonical_section(InstanceId::I1, layout_.outputs);
  std::vector<uint8_t> out_b = canonical_section(InstanceId::I2, layout_.outputs);
  std::vector<uint8_t> st_a = canonical_section(InstanceId::I1, layout_.state);
  std::vector<uint8_t> st_b = canonical_section(InstanceId::I2, layout_.state);
  if (latch_a != latch_b || out_a != out_b || st_a != st_b) {
    events.push_back(make_event(cycle, source(), EventKind::LocalDivergence,
                                {{"reason", "instance_compare_mismatch"}}));
    start_reboot(cycle, events, "local divergence");
    return;
  }

  out_digest_ = crc32(out_a);
  state_digest_ = crc32(st_a);
  for (uint32_t i = 0; i < layout_.output_cells; ++i) {
    lines_[i] = latch_a[i] != 0;
  }
  drove_ = true;
  healthy_cycle_ = true;
}

std::optional<Frame> Mcu::make_frame(uint32_t cycle)
{
  if (mode_ == McuMode::Halted) return std::nullopt;
  Frame f;
  f.seq = seq_++;
  f.cycle = cycle;
  f.alive = true;
  f.rebooting = mode_ == McuMode::Rebooting;
  f.resync_request = resync_pending_;
  if (mode_ == McuMode::Running && drove_) {
    f.out_digest = out_digest_;
    f.state_digest = state_digest_;
  }
  return f;
}

void Mcu::receive_partner_frame(uint32_t cycle, const std::optional<Frame> & frame,
                                EventSink & events)
{
  if (mode_ != McuMode::Running) return;
  bool valid = frame.has_value() && frame->cycle == cycle && frame->alive;
  if (valid && last_partner_seq_ && frame->seq == *last_partner_seq_) {
    valid = false;  // replayed frame
  }
  if (!valid) {
    ++miss_streak_;
    if (miss_streak_ > config_.heartbeat_tolerance) {
      events.push_back(make_event(cycle, source(), EventKind::HeartbeatTimeout,
                                  {{"missed", std::to_string(miss_streak_)}}));
      halt(cycle, events, "heartbeat timeout");
    }
    return;
  }
  miss_streak_ = 0;
  last_partner_seq_ = frame->seq;
  if (frame->rebooting) return;
  if (!drove_) return;
  if (frame->out_digest != out_digest_ || frame->state_digest != state_digest_) {
    events.push_back(make_event(cycle, source(), EventKind::CrossDivergence,
                                {{"own_out", std::to_string(out_digest_)},
                                 {"partner_out", std::to_string(frame->out_digest)},
                                 {"own_state", std::to_string(state_digest_)},
                                 {"partner_state", std::to_string(frame->state_digest)}}));
    halt(cycle, events, "cross divergence");
  }
}

void Mcu::apply_readback(uint32_t cycle, std::span<const bool> sensed, EventSink & events)
{
  if (mode_ != McuMode::Running || !drove_) return;
  for (size_t i = 0; i < lines_.size() && i < sensed.size(); ++i) {
    if (sensed[i] != lines_[i]) {
      events.push_back(make_event(cycle, source(), EventKind::ReadbackFail,
                                  {{"line", std::to_string(i)},
                                   {"driven", lines_[i] ? "1" : "0"},
                                   {"sensed", sensed[i] ? "1" : "0"}}));
      halt(cycle, events, "readback failure");
      return;
    }
  }
}

void Mcu::end_cycle(uint32_t cycle, EventSink & events)
{
  if (mode_ == McuMode::Running && healthy_cycle_) {
    events.push_back(make_event(cycle, source(), EventKind::CycleOk, {}));
  }
}

std::vector<uint8_t> Mcu::canonical_section(InstanceId instance,
                                            const std::vector<CanonicalLayout::Run> & runs) const
{
  std::vector<uint8_t> out;
  const Region & region = instance == InstanceId::I1 ? map_.data_a : map_.data_b;
  bool big_endian = instance == InstanceId::I2;
  for (const auto & run : runs) {
    for (uint32_t i = 0; i < run.count; ++i) {
      const uint8_t * p = memory_.data() + region.base + 4 * (run.cell + i);
      uint32_t w;
      if (big_endian) {
        w = static_cast<uint32_t>(p[0]) << 24 | static_cast<uint32_t>(p[1]) << 16 |
            static_cast<uint32_t>(p[2]) << 8 | static_cast<uint32_t>(p[3]);
      } else {
        w = static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
            static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
      }
      out.push_back(static_cast<uint8_t>(w));
      out.push_back(static_cast<uint8_t>(w >> 8));
      out.push_back(static_cast<uint8_t>(w >> 16));
      out.push_back(static_cast<uint8_t>(w >> 24));
    }
  }
  return out;
}

std::vector<uint8_t> Mcu::read_canonical_state() const
{
  return canonical_section(InstanceId::I1, layout_.state);
}

std::vector<uint8_t> Mcu::read_canonical_outputs() const
{
  return canonical_section(InstanceId::I1, layout_.outputs);
}

void Mcu::install_canonical_state(std::span<const uint8_t> bytes)
{
  size_t pos = 0;
  for (const auto & run : layout_.state) {
    for (uint32_t i = 0; i < run.count && pos + 4 <= bytes.size(); ++i, pos += 4) {
      uint32_t w = static_cast<uint32_t>(bytes[pos]) | static_cast<uint32_t>(bytes[pos + 1]) << 8 |
                   static_cast<uint32_t>(bytes[pos + 2]) << 16 |
                   static_cast<uint32_t>(bytes[pos + 3]) << 24;
      uint8_t * a = memory_.data() + map_.data_a.base + 4 * (run.cell + i);
      a[0] = static_cast<uint8_t>(w);
      a[1] = static_cast<uint8_t>(w >> 8);
      a[2] = static_cast<uint8_t>(w >> 16);
      a[3] = static_cast<uint8_t>(w >> 24);
      uint8_t * b = memory_.data() + map_.data_b.base + 4 * (run.cell + i);
      b[0] = static_cast<uint8_t>(w >> 24);
      b[1] = static_cast<uint8_t>(w >> 16);
      b[2] = static_cast<uint8_t>(w >> 8);
      b[3] = static_cast<uint8_t>(w);
    }
  }
}

void Mcu::resync_refused(uint32_t cycle, EventSink & events)
{
  resync_pending_ = false;
  events.push_back(
    make_event(cycle, source(), EventKind::Resync, {{"status", "refused"}}));
  start_reboot(cycle, events, "resync refused");
}

void Mcu::resync_done(uint32_t cycle, EventSink & events)
{
  resync_pending_ = false;
  mode_ = McuMode::Running;
  miss_streak_ = 0;
  events.push_back(make_event(cycle, source(), EventKind::Resync, {{"status", "ok"}}));
  events.push_back(make_event(cycle, source(), EventKind::RebootDone, {}));
}

void Mcu::kill()
{
  killed_ = true;
  mode_ = McuMode::Halted;
  deactivate_lines();
}

void Mcu::flip_code_once(InstanceId instance, uint32_t offset, uint32_t bit)
{
  const Region & r = instance == InstanceId::I1 ? map_.code_a : map_.code_b;
  uint32_t size = image_code_size(instance);
  if (offset < size) {
    memory_[r.base + offset] ^= static_cast<uint8_t>(1u << (bit & 7));
  }
}

void Mcu::add_persistent_code_flip(InstanceId instance, uint32_t offset, uint32_t bit)
{
  persistent_flips_.push_back({instance, offset, bit});
  flip_code_once(instance, offset, bit);
}

void Mcu::flip_data_once(InstanceId instance, uint32_t offset, uint32_t bit)
{
  const Region & r = instance == InstanceId::I1 ? map_.data_a : map_.data_b;
  if (offset < r.size) {
    memory_[r.base + offset] ^= static_cast<uint8_t>(1u << (bit & 7));
  }
}

void Mcu::set_corruption(InstanceId instance, std::optional<OpcodeCorruption> c)
{
  if (instance == InstanceId::I1) {
    corrupt_a_ = c;
  } else {
    corrupt_b_ = c;
  }
}

}  // namespace duplex
