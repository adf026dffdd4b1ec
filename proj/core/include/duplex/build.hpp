// duplex/build.hpp - Full pipeline: source text -> typed model -> both
// images -> serialized artifacts.
#pragma once

#include <string>
#include <vector>

#include "duplex/codegen_a.hpp"
#include "duplex/codegen_b.hpp"
#include "duplex/complexity.hpp"
#include "duplex/diag.hpp"
#include "duplex/ir.hpp"
#include "duplex/memmap.hpp"
#include "duplex/typecheck.hpp"

namespace duplex
{

struct BuildOptions
{
  MemoryMap map = default_map();
  unsigned record_bytes_a = 16;
  // Four bytes per record keeps one image record per assembly instruction.
  unsigned record_bytes_b = 4;
};

struct BuildArtifacts
{
  TypedModel typed;
  CycleBound bound;
  uint64_t budget = 0;
  IrProgram ir;
  ImageA image_a;
  ImageB image_b;
  AsmListing asm_b;
  std::string hex_a;      // empty when the map exceeds the 16-bit text format
  std::string hex_b;
  std::string listing_a;
  MemoryMap map;
  std::string canonical_source;  // pretty-printed model
  std::string fingerprint;       // content hash of canonical_source
};

struct BuildOutcome
{
  std::optional<BuildArtifacts> artifacts;
  std::vector<Diagnostic> diagnostics;  // frontend rejections
  std::string error;                    // backend failures (region overflow...)
  explicit operator bool() const { return artifacts.has_value(); }
};

BuildOutcome build_source(const std::string & source, const BuildOptions & options = {});
BuildOutcome build_model(const Model & model, const BuildOptions & options = {});

// Region map, data layout, bounds, and fingerprint as deterministic JSON.
std::string map_json(const BuildArtifacts & artifacts);

// Writes model.mach, image_a.hex, image_b.hex, listing_a.txt, listing_b.asm,
// and map.json under `dir`.
Result<std::vector<std::string>> write_artifacts(const BuildArtifacts & artifacts,
                                                 const std::string & dir);

}  // namespace duplex
