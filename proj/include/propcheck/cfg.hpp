#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "propcheck/ast.hpp"

namespace propcheck {

using BlockId = std::uint32_t;

// Elements are statements or condition expressions (the test of an if or
// loop sits at the end of the block that evaluates it).
struct BasicBlock {
  std::vector<NodeId> elements;
  std::vector<BlockId> succs;
  std::vector<BlockId> preds;
};

struct Location {
  BlockId block;
  std::uint32_t index; // element index within the block
};

struct Cfg {
  NodeId function = kNoNode; // function node or Program
  BlockId entry = 0;
  std::vector<BasicBlock> blocks;
  std::unordered_map<NodeId, Location> element_location;

  // Block and element holding `node`, found by climbing parents up to the
  // function boundary. Empty for nodes in nested functions or unreachable code.
  std::optional<Location> locate(const Ast& ast, NodeId node) const;
};

// `root` is a function node or the Program.
Cfg build_cfg(const Ast& ast, NodeId root);

// The Program followed by every function node in source order.
std::vector<NodeId> cfg_roots(const Ast& ast);

struct DomInfo {
  std::map<BlockId, BlockId> idom; // absent for the entry block

  bool dominates(BlockId a, BlockId b) const;
  bool strictly_dominates(BlockId a, BlockId b) const { return a != b && dominates(a, b); }
};

DomInfo dominators(const Cfg& cfg);

// Dominance frontier of every block, derived from `dom`.
std::vector<std::vector<BlockId>> dominance_frontiers(const Cfg& cfg, const DomInfo& dom);

} // namespace propcheck
