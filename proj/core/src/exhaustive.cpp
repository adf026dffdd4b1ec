// duplex/exhaustive.cpp
#include "duplex/exhaustive.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "duplex/util.hpp"

namespace duplex
{

namespace
{

uint64_t sat_mul(uint64_t a, uint64_t b)
{
  if (a == 0 || b == 0) return 0;
  if (a > UINT64_MAX / b) return UINT64_MAX;
  return a * b;
}

struct CellRange
{
  int64_t lo;
  int64_t hi;
  uint64_t span() const { return static_cast<uint64_t>(hi - lo) + 1; }
};

std::vector<CellRange> section_cell_ranges(const TypedModel & tm, VarSection section)
{
  std::vector<CellRange> out;
  for (const auto & v : tm.vars) {
    if (v.section != section) continue;
    CellRange r = v.type.scalar.kind == ScalarKind::Bool
                    ? CellRange{0, 1}
                    : CellRange{v.type.scalar.lo, v.type.scalar.hi};
    for (uint32_t i = 0; i < v.type.cell_count(); ++i) out.push_back(r);
  }
  return out;
}

struct VecHash
{
  size_t operator()(const std::vector<int64_t> & v) const
  {
    return static_cast<size_t>(fnv1a64(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t *>(v.data()), v.size() * sizeof(int64_t))));
  }
};

}  // namespace

ExhaustiveReport check_exhaustive(const TypedModel & tm, uint64_t max_states)
{
  ExhaustiveReport rep;
  auto state_ranges = section_cell_ranges(tm, VarSection::State);
  auto input_ranges = section_cell_ranges(tm, VarSection::Input);

  uint64_t state_space = 1;
  for (const auto & r : state_ranges) state_space = sat_mul(state_space, r.span());
  uint64_t input_space = 1;
  for (const auto & r : input_ranges) input_space = sat_mul(input_space, r.span());
  rep.estimate = sat_mul(state_space, input_space);
  if (rep.estimate > max_states) {
    rep.verdict = ExhaustiveReport::Verdict::TooLarge;
    return rep;
  }

  auto state_ids = state_var_ids(tm);
  std::vector<int64_t> base_cells = initial_cells(tm);
  std::vector<int64_t> init_state = read_section(tm, base_cells, state_ids);

  // Decodes a mixed-radix input index into a flattened input-cell vector.
  auto decode_input = [&](uint64_t k) {
    std::vector<int64_t> in(input_ranges.size());
    for (size_t i = 0; i < input_ranges.size(); ++i) {
      uint64_t span = input_ranges[i].span();
      in[i] = input_ranges[i].lo + static_cast<int64_t>(k % span);
      k /= span;
    }
    return in;
  };

  struct Node
  {
    std::vector<int64_t> state;
    int parent;
    uint64_t input_index;
  };
  std::vector<Node> nodes;
  std::unordered_map<std::vector<int64_t>, int, VecHash> seen;
  std::deque<int> frontier;

  auto make_witness = [&](int node, std::optional<uint64_t> final_input) {
    std::vector<std::vector<int64_t>> w;
    for (int n = node; n > 0; n = nodes[static_cast<size_t>(n)].parent) {
      w.push_back(decode_input(nodes[static_cast<size_t>(n)].input_index));
    }
    std::reverse(w.begin(), w.end());
    if (final_input) w.push_back(decode_input(*final_input));
    return w;
  };

  auto install_state = [&](std::vector<int64_t> & cells, const std::vector<int64_t> & st) {
    size_t pos = 0;
    for (int id : state_ids) {
      const VarInfo & v = tm.var(id);
      for (uint32_t i = 0; i < v.type.cell_count(); ++i) {
        cells[v.cell_offset + i] = st[pos++];
      }
    }
  };

  bool trapped = false;
  if (!eval_invariant(tm, base_cells, &trapped)) {
    rep.verdict = ExhaustiveReport::Verdict::Violated;
    rep.violation = trapped ? "invariant evaluation trapped on the initial state"
                            : "invariant violated on the initial state";
    rep.states_visited = 1;
    return rep;
  }

  nodes.push_back({init_state, -1, 0});
  seen.emplace(init_state, 0);
  frontier.push_back(0);

  while (!frontier.empty()) {
    int cur = frontier.front();
    frontier.pop_front();
    for (uint64_t k = 0; k < input_space; ++k) {
      std::vector<int64_t> cells = base_cells;
      install_state(cells, nodes[static_cast<size_t>(cur)].state);
      std::vector<int64_t> in = decode_input(k);
      StepResult sr = interp_step(tm, cells, in);
      if (sr.trap) {
        rep.verdict = ExhaustiveReport::Verdict::Violated;
        rep.trap = sr.trap;
        rep.violation = std::string("runtime trap: ") + trap_name(sr.trap->kind);
        rep.witness = make_witness(cur, k);
        rep.states_visited = nodes.size();
        return rep;
      }
      std::vector<int64_t> next = read_section(tm, cells, state_ids);
      auto it = seen.find(next);
      if (it != seen.end()) continue;
      int id = static_cast<int>(nodes.size());
      nodes.push_back({next, cur, k});
      seen.emplace(next, id);
      if (!eval_invariant(tm, cells, &trapped)) {
        rep.verdict = ExhaustiveReport::Verdict::Violated;
        rep.violation = trapped ? "invariant evaluation trapped" : "invariant violated";
        rep.witness = make_witness(id, std::nullopt);
        rep.states_visited = nodes.size();
        return rep;
      }
      frontier.push_back(id);
    }
  }

  rep.states_visited = nodes.size();
  rep.verdict = ExhaustiveReport::Verdict::Holds;
  return rep;
}

}  // namespace duplex
