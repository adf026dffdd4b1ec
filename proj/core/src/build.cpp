// duplex/build.cpp
#include "duplex/build.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "duplex/hexfmt.hpp"
#include "duplex/parser.hpp"
#include "duplex/printer.hpp"
#include "duplex/util.hpp"

namespace duplex
{

BuildOutcome build_model(const Model & model, const BuildOptions & options)
{
  BuildOutcome out;
  TypecheckResult tc = typecheck(model);
  if (!tc) {
    out.diagnostics = std::move(tc.diagnostics);
    return out;
  }
  BuildArtifacts a;
  a.typed = std::move(*tc.typed);
  a.map = options.map;
  a.bound = complexity_check(a.typed);
  a.budget = instruction_budget(a.typed, a.bound);
  a.canonical_source = print_model(a.typed.model);
  a.fingerprint = fingerprint_hex(a.canonical_source);

  a.ir = lower(a.typed);
  Result<ImageA> ia = emit_a(a.ir, a.map);
  if (!ia) {
    out.error = "chain one: " + ia.error;
    return out;
  }
  a.image_a = std::move(*ia.value);
  a.listing_a = listing_a(a.image_a, a.map);

  Result<AsmListing> asm_b = emit_asm(a.typed, a.map);
  if (!asm_b) {
    out.error = "chain two: " + asm_b.error;
    return out;
  }
  a.asm_b = std::move(*asm_b.value);
  Result<ImageB> ib = assemble(a.asm_b.text());
  if (!ib) {
    out.error = "chain two assembler: " + ib.error;
    return out;
  }
  a.image_b = std::move(*ib.value);

  if (a.map.space_size <= 65536) {
    auto ha = hex_encode(a.image_a.code, a.map.code_a.base, options.record_bytes_a);
    if (!ha) {
      out.error = "image text: " + ha.error;
      return out;
    }
    a.hex_a = std::move(*ha.value);
    auto hb = hex_encode(a.image_b.code, a.map.code_b.base, options.record_bytes_b);
    if (!hb) {
      out.error = "image text: " + hb.error;
      return out;
    }
    a.hex_b = std::move(*hb.value);
  }
  out.artifacts = std::move(a);
  return out;
}

BuildOutcome build_source(const std::string & source, const BuildOptions & options)
{
  ParseResult pr = parse_model(source);
  if (!pr) {
    BuildOutcome out;
    out.diagnostics = std::move(pr.diagnostics);
    return out;
  }
  return build_model(*pr.model, options);
}

std::string map_json(const BuildArtifacts & a)
{
  nlohmann::ordered_json j;
  j["fingerprint"] = a.fingerprint;
  j["space_size"] = a.map.space_size;
  auto region = [](const Region & r) {
    nlohmann::ordered_json o;
    o["base"] = r.base;
    o["size"] = r.size;
    return o;
  };
  j["regions"]["code_a"] = region(a.map.code_a);
  j["regions"]["code_b"] = region(a.map.code_b);
  j["regions"]["data_a"] = region(a.map.data_a);
  j["regions"]["data_b"] = region(a.map.data_b);
  j["max_ops"] = a.bound.max_ops;
  j["max_stack_depth"] = a.bound.max_stack_depth;
  j["instruction_budget"] = a.budget;
  j["code_bytes_a"] = a.image_a.code.size();
  j["code_bytes_b"] = a.image_b.code.size();
  j["required_stack_depth_a"] = a.image_a.required_stack_depth;
  j["max_eval_regs_b"] = a.image_b.max_eval_regs;
  j["data_cells_a"] = a.image_a.data_cells;
  j["data_cells_b"] = a.image_b.data_cells;
  nlohmann::ordered_json layout = nlohmann::ordered_json::array();
  for (const auto & v : a.typed.vars) {
    nlohmann::ordered_json o;
    o["name"] = v.name;
    switch (v.section) {
      case VarSection::Input: o["section"] = "input"; break;
      case VarSection::Output: o["section"] = "output"; break;
      case VarSection::State: o["section"] = "state"; break;
    }
    o["cell"] = v.cell_offset;
    o["cells"] = v.type.cell_count();
    if (v.type.scalar.kind == ScalarKind::Bool) {
      o["type"] = "BOOL";
    } else {
      o["type"] =
        "INT(" + std::to_string(v.type.scalar.lo) + ".." + std::to_string(v.type.scalar.hi) + ")";
    }
    layout.push_back(std::move(o));
  }
  j["layout"] = std::move(layout);
  return j.dump(2) + "\n";
}

Result<std::vector<std::string>> write_artifacts(const BuildArtifacts & a, const std::string & dir)
{
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return Result<std::vector<std::string>>::fail("cannot create directory " + dir);
  }
  std::vector<std::string> written;
  auto write = [&](const std::string & name, const std::string & content) {
    fs::path p = fs::path(dir) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) return false;
    f << content;
    written.push_back(p.string());
    return f.good();
  };
  if (!write("model.mach", a.canonical_source) || !write("image_a.hex", a.hex_a) ||
      !write("image_b.hex", a.hex_b) || !write("listing_a.txt", a.listing_a) ||
      !write("listing_b.asm", a.asm_b.text()) || !write("map.json", map_json(a))) {
    return Result<std::vector<std::string>>::fail("write failure under " + dir);
  }
  return Result<std::vector<std::string>>::ok(std::move(written));
}

}  // namespace duplex
