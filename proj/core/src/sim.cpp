// duplex/sim.cpp
#include "duplex/sim.hpp"

#include <algorithm>

#include <json.hpp>

#include "duplex/vm_a.hpp"
#include "duplex/vm_b.hpp"

namespace duplex
{

const char * event_kind_name(EventKind k)
{
  switch (k) {
    case EventKind::CycleOk: return "cycle_ok";
    case EventKind::LocalDivergence: return "local_divergence";
    case EventKind::CrossDivergence: return "cross_divergence";
    case EventKind::HeartbeatTimeout: return "heartbeat_timeout";
    case EventKind::SelftestFail: return "selftest_fail";
    case EventKind::ReadbackFail: return "readback_fail";
    case EventKind::RebootStart: return "reboot_start";
    case EventKind::RebootDone: return "reboot_done";
    case EventKind::Resync: return "resync";
    case EventKind::Halt: return "halt";
    case EventKind::OutputChange: return "output_change";
    case EventKind::FaultInjected: return "fault_injected";
  }
  return "?";
}

const char * event_source_name(EventSource s)
{
  switch (s) {
    case EventSource::Harness: return "HARNESS";
    case EventSource::Mcu1: return "MCU1";
    case EventSource::Mcu2: return "MCU2";
    case EventSource::Board: return "BOARD";
  }
  return "?";
}

std::string event_to_json(const TraceEvent & e)
{
  nlohmann::ordered_json j;
  j["cycle"] = e.cycle;
  j["source"] = event_source_name(e.source);
  j["kind"] = event_kind_name(e.kind);
  for (const auto & [k, v] : e.details) {
    j[k] = v;
  }
  return j.dump();
}

const char * fault_kind_name(FaultKind k)
{
  switch (k) {
    case FaultKind::CodeBitflip: return "code_bitflip";
    case FaultKind::DataBitflip: return "data_bitflip";
    case FaultKind::OpcodeSemantics: return "opcode_semantics";
    case FaultKind::FrameDrop: return "frame_drop";
    case FaultKind::FrameCorrupt: return "frame_corrupt";
    case FaultKind::OutputStuck: return "output_stuck";
    case FaultKind::McuKill: return "mcu_kill";
  }
  return "?";
}

TypedModel clone_typed_model(const TypedModel & tm)
{
  TypedModel c;
  c.model = clone_model(tm.model);
  c.vars = tm.vars;
  c.var_index = tm.var_index;
  c.n_inputs = tm.n_inputs;
  c.n_outputs = tm.n_outputs;
  c.n_state = tm.n_state;
  c.n_loops = tm.n_loops;
  c.var_cells = tm.var_cells;
  c.loop_cells_base = tm.loop_cells_base;
  return c;
}

namespace
{

std::optional<FaultKind> fault_kind_from_name(const std::string & s)
{
  for (FaultKind k : {FaultKind::CodeBitflip, FaultKind::DataBitflip, FaultKind::OpcodeSemantics,
                      FaultKind::FrameDrop, FaultKind::FrameCorrupt, FaultKind::OutputStuck,
                      FaultKind::McuKill}) {
    if (s == fault_kind_name(k)) return k;
  }
  return std::nullopt;
}

std::optional<uint8_t> opcode_byte(InstanceId instance, const std::string & name)
{
  if (instance == InstanceId::I1) {
    for (uint8_t op : vm_a_opcodes()) {
      if (name == vm_a_mnemonic(op)) return op;
    }
  } else {
    for (uint8_t op : vm_b_opcodes()) {
      if (name == vm_b_mnemonic(op)) return op;
    }
  }
  return std::nullopt;
}

uint64_t splitmix_next(uint64_t & state)
{
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

int source_rank(EventSource s)
{
  switch (s) {
    case EventSource::Harness: return 0;
    case EventSource::Mcu1: return 1;
    case EventSource::Mcu2: return 2;
    case EventSource::Board: return 3;
  }
  return 4;
}

}  // namespace

Result<Scenario> parse_scenario_json(const std::string & text)
{
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    return Result<Scenario>::fail("scenario: invalid JSON");
  }
  if (!j.is_object()) {
    return Result<Scenario>::fail("scenario: top level must be an object");
  }
  Scenario s;
  try {
    s.cycles = j.value("cycles", 0u);
    s.seed = j.value("seed", 0ull);
    if (j.contains("inputs")) {
      for (const auto & item : j.at("inputs")) {
        InputSet is;
        is.at = item.at("at").get<uint32_t>();
        for (const auto & [key, val] : item.at("set").items()) {
          if (!val.is_number_integer() && !val.is_boolean()) {
            return Result<Scenario>::fail("scenario: input value for '" + key +
                                          "' must be an integer");
          }
          int64_t v = val.is_boolean() ? (val.get<bool>() ? 1 : 0) : val.get<int64_t>();
          is.sets.emplace_back(key, v);
        }
        s.inputs.push_back(std::move(is));
      }
    }
    if (j.contains("faults")) {
      for (const auto & item : j.at("faults")) {
        FaultSpec f;
        auto kind = fault_kind_from_name(item.at("kind").get<std::string>());
        if (!kind) {
          return Result<Scenario>::fail("scenario: unknown fault kind");
        }
        f.kind = *kind;
        f.mcu = item.value("mcu", 1);
        std::string inst = item.value("instance", "I1");
        if (inst != "I1" && inst != "I2") {
          return Result<Scenario>::fail("scenario: instance must be I1 or I2");
        }
        f.instance = inst == "I1" ? InstanceId::I1 : InstanceId::I2;
        f.offset = item.value("offset", 0u);
        f.bit = item.value("bit", 0u);
        f.opcode = item.value("opcode", "");
        f.output = item.value("output", 0u);
        f.stuck_value = item.value("value", 1);
        f.at_cycle = item.value("at", 0u);
        f.duration = item.value("duration", 0u);
        s.faults.push_back(std::move(f));
      }
    }
  } catch (const nlohmann::json::exception & e) {
    return Result<Scenario>::fail(std::string("scenario: ") + e.what());
  }
  return Result<Scenario>::ok(std::move(s));
}

Result<DuplexSim> DuplexSim::create(TypedModel tm, ImageA image_a, ImageB image_b, MemoryMap map,
                                    SimConfig config)
{
  DuplexSim sim;
  sim.layout_ = canonical_layout(tm);
  sim.map_ = map;
  sim.config_ = config;
  std::vector<int64_t> init = initial_cells(tm);
  sim.tm_ = std::move(tm);

  uint64_t h = fnv1a64(image_a.code);
  h ^= fnv1a64(image_b.code) * 31;
  h ^= config.seed * 131;
  h ^= config.mcu.instruction_budget * 17;
  sim.config_hash_ = h;

  auto m1 = Mcu::load(McuId::Mcu1, image_a, image_b, map, sim.layout_, init, config.mcu);
  if (!m1) return Result<DuplexSim>::fail(m1.error);
  auto m2 = Mcu::load(McuId::Mcu2, image_a, image_b, map, sim.layout_, init, config.mcu);
  if (!m2) return Result<DuplexSim>::fail(m2.error);
  sim.mcu1_ = std::make_unique<Mcu>(std::move(*m1.value));
  sim.mcu2_ = std::make_unique<Mcu>(std::move(*m2.value));
  sim.board_.assign(sim.layout_.output_cells, false);
  sim.prev_board_.assign(sim.layout_.output_cells, false);
  sim.rng_state_ = config.seed ^ 0xD1B54A32D192ED03ull;
  return Result<DuplexSim>::ok(std::move(sim));
}

Result<bool> DuplexSim::inject(const FaultSpec & fault)
{
  if (fault.mcu != 1 && fault.mcu != 2) {
    return Result<bool>::fail("fault: mcu must be 1 or 2");
  }
  if (fault.bit > 7) {
    return Result<bool>::fail("fault: bit must be 0..7");
  }
  switch (fault.kind) {
    case FaultKind::CodeBitflip: {
      uint32_t size = mcu(fault.mcu).image_code_size(fault.instance);
      if (fault.offset >= size) {
        return Result<bool>::fail("fault: code offset outside image");
      }
      break;
    }
    case FaultKind::DataBitflip: {
      const Region & r = fault.instance == InstanceId::I1 ? map_.data_a : map_.data_b;
      if (fault.offset >= r.size) {
        return Result<bool>::fail("fault: data offset outside region");
      }
      break;
    }
    case FaultKind::OpcodeSemantics:
      if (!opcode_byte(fault.instance, fault.opcode)) {
        return Result<bool>::fail("fault: unknown opcode '" + fault.opcode + "'");
      }
      break;
    case FaultKind::OutputStuck:
      if (fault.output >= layout_.output_cells) {
        return Result<bool>::fail("fault: output index out of range");
      }
      if (fault.stuck_value != 0 && fault.stuck_value != 1) {
        return Result<bool>::fail("fault: stuck value must be 0 or 1");
      }
      break;
    case FaultKind::FrameDrop:
    case FaultKind::FrameCorrupt:
    case FaultKind::McuKill:
      break;
  }
  faults_.push_back(fault);
  return Result<bool>::ok(true);
}

bool DuplexSim::fault_active(const FaultSpec & f, uint32_t cycle) const
{
  if (cycle < f.at_cycle) return false;
  if (f.duration == 0) return true;
  return cycle < f.at_cycle + f.duration;
}

void DuplexSim::apply_due_faults(uint32_t cycle, EventSink & ev)
{
  for (FaultSpec & f : faults_) {
    Mcu & target = mcu_mut(f.mcu);
    if (cycle == f.at_cycle) {
      std::vector<std::pair<std::string, std::string>> details = {
        {"fault", fault_kind_name(f.kind)},
        {"mcu", mcu_name(f.mcu == 1 ? McuId::Mcu1 : McuId::Mcu2)},
      };
      switch (f.kind) {
        case FaultKind::CodeBitflip:
          if (f.duration == 0) {
            target.add_persistent_code_flip(f.instance, f.offset, f.bit);
          } else {
            target.flip_code_once(f.instance, f.offset, f.bit);
          }
          details.emplace_back("instance", instance_name(f.instance));
          details.emplace_back("offset", std::to_string(f.offset));
          details.emplace_back("bit", std::to_string(f.bit));
          break;
        case FaultKind::DataBitflip:
          target.flip_data_once(f.instance, f.offset, f.bit);
          details.emplace_back("instance", instance_name(f.instance));
          details.emplace_back("offset", std::to_string(f.offset));
          details.emplace_back("bit", std::to_string(f.bit));
          break;
        case FaultKind::OpcodeSemantics: {
          OpcodeCorruption c{*opcode_byte(f.instance, f.opcode)};
          target.set_corruption(f.instance, c);
          details.emplace_back("instance", instance_name(f.instance));
          details.emplace_back("opcode", f.opcode);
          break;
        }
        case FaultKind::McuKill:
          target.kill();
          break;
        case FaultKind::FrameDrop:
        case FaultKind::FrameCorrupt:
          break;
        case FaultKind::OutputStuck:
          details.emplace_back("output", std::to_string(f.output));
          details.emplace_back("value", std::to_string(f.stuck_value));
          break;
      }
      ev.push_back(make_event(cycle, EventSource::Harness, EventKind::FaultInjected,
                              std::move(details)));
    }
    // Window expiry for armed opcode corruption.
    if (f.kind == FaultKind::OpcodeSemantics && f.duration > 0 &&
        cycle == f.at_cycle + f.duration) {
      target.set_corruption(f.instance, std::nullopt);
    }
  }
}

void DuplexSim::resolve_resync(uint32_t cycle, EventSink & ev)
{
  for (int id : {1, 2}) {
    Mcu & self = mcu_mut(id);
    if (!self.resync_pending()) continue;
    Mcu & partner = mcu_mut(id == 1 ? 2 : 1);
    if (partner.mode() == McuMode::Running) {
      self.install_canonical_state(partner.read_canonical_state());
      self.resync_done(cycle, ev);
    } else {
      self.resync_refused(cycle, ev);
    }
  }
}

std::optional<Frame> DuplexSim::transmit(int sender, const std::optional<Frame> & f,
                                         uint32_t cycle)
{
  if (!f) return std::nullopt;
  bool drop = false;
  bool corrupt = false;
  for (const FaultSpec & spec : faults_) {
    if (spec.mcu != sender || !fault_active(spec, cycle)) continue;
    if (spec.kind == FaultKind::FrameDrop) drop = true;
    if (spec.kind == FaultKind::FrameCorrupt) corrupt = true;
  }
  if (drop) return std::nullopt;
  std::array<uint8_t, kFrameSize> bytes = encode_frame(*f);
  if (corrupt) {
    size_t idx = splitmix_next(rng_state_) % kFrameSize;
    auto mask = static_cast<uint8_t>(1 + splitmix_next(rng_state_) % 255);
    bytes[idx] ^= mask;
  }
  return decode_frame(bytes);
}

const std::vector<bool> & DuplexSim::step(std::span<const int64_t> inputs)
{
  uint32_t cycle = cycle_;
  EventSink ev;

  mcu1_->begin_cycle(cycle, ev);
  mcu2_->begin_cycle(cycle, ev);
  resolve_resync(cycle, ev);
  apply_due_faults(cycle, ev);

  mcu1_->run_cycle(cycle, inputs, ev);
  mcu2_->run_cycle(cycle, inputs, ev);

  auto f1 = mcu1_->make_frame(cycle);
  auto f2 = mcu2_->make_frame(cycle);
  auto d1 = transmit(1, f1, cycle);
  auto d2 = transmit(2, f2, cycle);
  mcu1_->receive_partner_frame(cycle, d2, ev);
  mcu2_->receive_partner_frame(cycle, d1, ev);

  // Board: line overrides, then power AND command per output.
  std::vector<bool> actual1(mcu1_->lines());
  std::vector<bool> actual2(mcu2_->lines());
  for (const FaultSpec & f : faults_) {
    if (f.kind != FaultKind::OutputStuck || !fault_active(f, cycle)) continue;
    auto & lines = f.mcu == 1 ? actual1 : actual2;
    if (f.output < lines.size()) lines[f.output] = f.stuck_value != 0;
  }
  for (uint32_t i = 0; i < layout_.output_cells; ++i) {
    board_[i] = actual1[i] && actual2[i];
  }
  if (board_ != prev_board_) {
    std::string bits;
    for (bool b : board_) bits += b ? '1' : '0';
    ev.push_back(
      make_event(cycle, EventSource::Board, EventKind::OutputChange, {{"outputs", bits}}));
    prev_board_ = board_;
  }

  mcu1_->apply_readback(cycle, actual1, ev);
  mcu2_->apply_readback(cycle, actual2, ev);

  mcu1_->end_cycle(cycle, ev);
  mcu2_->end_cycle(cycle, ev);

  std::stable_sort(ev.begin(), ev.end(), [](const TraceEvent & a, const TraceEvent & b) {
    return source_rank(a.source) < source_rank(b.source);
  });
  trace_.insert(trace_.end(), std::make_move_iterator(ev.begin()),
                std::make_move_iterator(ev.end()));
  ++cycle_;
  return board_;
}

Result<RunResult> DuplexSim::run(const Scenario & scenario)
{
  // Compile input timeline against the model before cycle 0.
  struct CellSet
  {
    uint32_t at;
    uint32_t cell;
    int64_t value;
  };
  std::vector<CellSet> sets;
  for (const auto & is : scenario.inputs) {
    for (const auto & [name, value] : is.sets) {
      std::string base = name;
      uint32_t elem = 0;
      auto paren = name.find('(');
      if (paren != std::string::npos && name.back() == ')') {
        base = name.substr(0, paren);
        try {
          elem = static_cast<uint32_t>(
            std::stoul(name.substr(paren + 1, name.size() - paren - 2)));
        } catch (...) {
          return Result<RunResult>::fail("scenario: bad element reference '" + name + "'");
        }
      }
      int idx = tm_.lookup(base);
      if (idx < 0 || tm_.var(idx).section != VarSection::Input) {
        return Result<RunResult>::fail("scenario: '" + base + "' is not an input");
      }
      const VarInfo & v = tm_.var(idx);
      if (elem >= v.type.cell_count()) {
        return Result<RunResult>::fail("scenario: element out of range in '" + name + "'");
      }
      if (v.type.scalar.kind == ScalarKind::Bool) {
        if (value != 0 && value != 1) {
          return Result<RunResult>::fail("scenario: boolean input '" + name + "' must be 0 or 1");
        }
      } else if (value < v.type.scalar.lo || value > v.type.scalar.hi) {
        return Result<RunResult>::fail("scenario: value outside declared range for '" + name +
                                       "'");
      }
      // Input cells are contiguous and first in the layout.
      sets.push_back({is.at, v.cell_offset + elem, value});
    }
  }
  for (const FaultSpec & f : scenario.faults) {
    auto r = inject(f);
    if (!r) return Result<RunResult>::fail(r.error);
  }

  // Latched inputs start at their fail-safe defaults.
  std::vector<int64_t> inputs(layout_.input_cells, 0);
  {
    std::vector<int64_t> init = initial_cells(tm_);
    for (uint32_t i = 0; i < layout_.input_cells; ++i) inputs[i] = init[i];
  }

  RunResult out;
  for (uint32_t c = 0; c < scenario.cycles; ++c) {
    for (const CellSet & s : sets) {
      if (s.at == c) inputs[s.cell] = s.value;
    }
    out.board_history.push_back(step(inputs));
  }
  out.event_count = trace_.size();
  return Result<RunResult>::ok(std::move(out));
}

size_t DuplexSim::count_events(EventKind kind) const
{
  size_t n = 0;
  for (const auto & e : trace_) {
    if (e.kind == kind) ++n;
  }
  return n;
}

std::string DuplexSim::trace_jsonl() const
{
  nlohmann::ordered_json header;
  header["format"] = "duplex-trace";
  header["version"] = 1;
  header["tool"] = "duplex 0.1.0";
  header["config_hash"] = config_hash_;
  header["cycles"] = cycle_;
  std::string out = header.dump();
  out += '\n';
  for (const auto & e : trace_) {
    out += event_to_json(e);
    out += '\n';
  }
  return out;
}

}  // namespace duplex
