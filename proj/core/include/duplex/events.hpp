// duplex/events.hpp - Observable record of every cycle of a duplex run.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace duplex
{

enum class EventKind
{
  CycleOk,
  LocalDivergence,
  CrossDivergence,
  HeartbeatTimeout,
  SelftestFail,
  ReadbackFail,
  RebootStart,
  RebootDone,
  Resync,
  Halt,
  OutputChange,
  FaultInjected,
};

enum class EventSource
{
  Harness,
  Mcu1,
  Mcu2,
  Board,
};

const char * event_kind_name(EventKind k);
const char * event_source_name(EventSource s);

struct TraceEvent
{
  uint32_t cycle = 0;
  EventSource source = EventSource::Harness;
  EventKind kind = EventKind::CycleOk;
  std::vector<std::pair<std::string, std::string>> details;
};

using EventSink = std::vector<TraceEvent>;

inline TraceEvent make_event(uint32_t cycle, EventSource source, EventKind kind,
                             std::vector<std::pair<std::string, std::string>> details = {})
{
  return TraceEvent{cycle, source, kind, std::move(details)};
}

// One JSON object per line, keys in fixed order; byte-deterministic.
std::string event_to_json(const TraceEvent & e);

}  // namespace duplex
