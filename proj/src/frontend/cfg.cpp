#include "propcheck/cfg.hpp"

#include <algorithm>
#include <string>

namespace propcheck {

namespace {

constexpr BlockId kNone = static_cast<BlockId>(-1);

class CfgBuilder {
public:
  CfgBuilder(const Ast& ast, NodeId root) : ast_(ast) { cfg_.function = root; }

  Cfg run() {
    cur_ = new_block();
    NodeId root = cfg_.function;
    if (ast_.node(root).kind == NodeKind::Program) {
      for (NodeId s : ast_.node(root).children) stmt(s);
    } else {
      NodeId body = ast_.body(root);
      if (ast_.node(body).kind == NodeKind::Block) {
        for (NodeId s : ast_.node(body).children) stmt(s);
      } else {
        element(body);
      }
    }
    return prune();
  }

private:
  struct Jump {
    std::string label;
    BlockId break_to;
    BlockId continue_to; // kNone for non-loops
    bool breakable = true; // loops and switches; false for labeled statements
  };

  const Node& node(NodeId id) const { return ast_.node(id); }

  BlockId new_block() {
    BlockId id = static_cast<BlockId>(raw_.size());
    raw_.emplace_back();
    if (!catch_stack_.empty()) edge(id, catch_stack_.back());
    return id;
  }

  void edge(BlockId from, BlockId to) {
    auto& s = raw_[from].succs;
    if (std::find(s.begin(), s.end(), to) == s.end()) s.push_back(to);
  }

  void element(NodeId id) { raw_[cur_].elements.push_back(id); }

  bool is_empty(NodeId id) const { return node(id).kind == NodeKind::Empty; }

  // Moves to a fresh block with no predecessors (code after a jump).
  void dead() { cur_ = new_block(); }

  void stmt(NodeId id, std::string label = {}) {
    const Node& n = node(id);
    switch (n.kind) {
      case NodeKind::Block:
        for (NodeId s : n.children) stmt(s);
        break;
      case NodeKind::Empty:
      case NodeKind::FunctionDecl:
        break;
      case NodeKind::If: {
        element(n.children[0]);
        BlockId guard = cur_;
        BlockId then_b = new_block();
        edge(guard, then_b);
        cur_ = then_b;
        stmt(n.children[1]);
        BlockId then_end = cur_;
        BlockId else_end = guard;
        if (n.children.size() > 2) {
          BlockId else_b = new_block();
          edge(guard, else_b);
          cur_ = else_b;
          stmt(n.children[2]);
          else_end = cur_;
        }
        BlockId join = new_block();
        edge(then_end, join);
        edge(else_end, join);
        cur_ = join;
        break;
      }
      case NodeKind::While: {
        BlockId header = new_block();
        edge(cur_, header);
        cur_ = header;
        element(n.children[0]);
        BlockId body = new_block();
        BlockId after = new_block();
        edge(header, body);
        edge(header, after);
        loop_body(n.children[1], body, Jump{label, after, header});
        edge(cur_, header);
        cur_ = after;
        break;
      }
      case NodeKind::DoWhile: {
        BlockId body = new_block();
        BlockId cond = new_block();
        BlockId after = new_block();
        edge(cur_, body);
        loop_body(n.children[0], body, Jump{label, after, cond});
        edge(cur_, cond);
        cur_ = cond;
        element(n.children[1]);
        edge(cond, body);
        edge(cond, after);
        cur_ = after;
        break;
      }
      case NodeKind::For: {
        if (!is_empty(n.children[0])) element(n.children[0]);
        BlockId header = new_block();
        edge(cur_, header);
        cur_ = header;
        BlockId body = new_block();
        BlockId after = new_block();
        BlockId update = new_block();
        edge(header, body);
        if (!is_empty(n.children[1])) {
          element(n.children[1]);
          edge(header, after);
        }
        loop_body(n.children[3], body, Jump{label, after, update});
        edge(cur_, update);
        cur_ = update;
        if (!is_empty(n.children[2])) element(n.children[2]);
        edge(update, header);
        cur_ = after;
        break;
      }
      case NodeKind::ForIn: {
        element(n.children[1]);
        BlockId header = new_block();
        edge(cur_, header);
        cur_ = header;
        element(n.children[0]);
        BlockId body = new_block();
        BlockId after = new_block();
        edge(header, body);
        edge(header, after);
        loop_body(n.children[2], body, Jump{label, after, header});
        edge(cur_, header);
        cur_ = after;
        break;
      }
      case NodeKind::Switch: {
        element(n.children[0]);
        BlockId disc = cur_;
        BlockId after = new_block();
        jumps_.push_back(Jump{label, after, kNone});
        BlockId prev_end = kNone;
        bool has_default = false;
        for (std::size_t i = 1; i < n.children.size(); ++i) {
          const Node& c = node(n.children[i]);
          BlockId case_b = new_block();
          edge(disc, case_b);
          if (prev_end != kNone) edge(prev_end, case_b);
          cur_ = case_b;
          if (is_empty(c.children[0])) {
            has_default = true;
          } else {
            element(c.children[0]);
          }
          for (std::size_t j = 1; j < c.children.size(); ++j) stmt(c.children[j]);
          prev_end = cur_;
        }
        jumps_.pop_back();
        if (prev_end != kNone) edge(prev_end, after);
        if (!has_default) edge(disc, after);
        cur_ = after;
        break;
      }
      case NodeKind::Labeled: {
        NodeId body = n.children[0];
        NodeKind bk = node(body).kind;
        if (bk == NodeKind::While || bk == NodeKind::DoWhile || bk == NodeKind::For ||
            bk == NodeKind::ForIn || bk == NodeKind::Switch) {
          stmt(body, n.text);
        } else {
          BlockId after = new_block();
          jumps_.push_back(Jump{n.text, after, kNone, false});
          stmt(body);
          jumps_.pop_back();
          edge(cur_, after);
          cur_ = after;
        }
        break;
      }
      case NodeKind::Break:
      case NodeKind::Continue: {
        bool is_break = n.kind == NodeKind::Break;
        for (auto it = jumps_.rbegin(); it != jumps_.rend(); ++it) {
          bool match = n.text.empty() ? (is_break ? it->breakable : it->continue_to != kNone)
                                      : it->label == n.text;
          if (!match) continue;
          BlockId target = is_break ? it->break_to : it->continue_to;
          if (target != kNone) edge(cur_, target);
          break;
        }
        dead();
        break;
      }
      case NodeKind::Return:
      case NodeKind::Throw:
        element(id);
        dead();
        break;
      case NodeKind::Try:
        try_stmt(n);
        break;
      default:
        element(id);
        break;
    }
  }

  void loop_body(NodeId body, BlockId start, Jump jump) {
    jumps_.push_back(std::move(jump));
    cur_ = start;
    stmt(body);
    jumps_.pop_back();
  }

  void try_stmt(const Node& n) {
    bool has_catch = !is_empty(n.children[2]);
    bool has_finally = !is_empty(n.children[3]);
    BlockId handler = has_catch ? new_block() : kNone;
    BlockId finalizer = has_finally ? new_block() : kNone;
    BlockId target = has_catch ? handler : finalizer;

    BlockId before = cur_;
    catch_stack_.push_back(target);
    if (raw_[before].elements.empty()) {
      edge(before, target);
    } else {
      cur_ = new_block();
      edge(before, cur_);
    }
    stmt(n.children[0]);
    catch_stack_.pop_back();
    BlockId try_end = cur_;

    BlockId after = new_block();
    BlockId join = has_finally ? finalizer : after;
    edge(try_end, join);
    if (has_catch) {
      if (has_finally) catch_stack_.push_back(finalizer);
      cur_ = handler;
      if (!is_empty(n.children[1])) element(n.children[1]);
      stmt(n.children[2]);
      if (has_finally) catch_stack_.pop_back();
      edge(cur_, join);
    }
    if (has_finally) {
      cur_ = finalizer;
      stmt(n.children[3]);
      edge(cur_, after);
    }
    cur_ = after;
  }

  Cfg prune() {
    std::vector<BlockId> order;
    std::vector<BlockId> remap(raw_.size(), kNone);
    std::vector<BlockId> stack{0};
    std::vector<bool> seen(raw_.size(), false);
    seen[0] = true;
    while (!stack.empty()) {
      BlockId b = stack.back();
      stack.pop_back();
      order.push_back(b);
      for (BlockId s : raw_[b].succs)
        if (!seen[s]) {
          seen[s] = true;
          stack.push_back(s);
        }
    }
    std::sort(order.begin(), order.end());
    for (std::size_t i = 0; i < order.size(); ++i) remap[order[i]] = static_cast<BlockId>(i);
    cfg_.blocks.resize(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      BasicBlock& out = cfg_.blocks[i];
      out.elements = raw_[order[i]].elements;
      for (BlockId s : raw_[order[i]].succs) out.succs.push_back(remap[s]);
      std::sort(out.succs.begin(), out.succs.end());
    }
    for (BlockId b = 0; b < cfg_.blocks.size(); ++b)
      for (BlockId s : cfg_.blocks[b].succs) cfg_.blocks[s].preds.push_back(b);
    for (BlockId b = 0; b < cfg_.blocks.size(); ++b) {
      const auto& el = cfg_.blocks[b].elements;
      for (std::uint32_t i = 0; i < el.size(); ++i) cfg_.element_location[el[i]] = Location{b, i};
    }
    return std::move(cfg_);
  }

  const Ast& ast_;
  Cfg cfg_;
  std::vector<BasicBlock> raw_;
  BlockId cur_ = 0;
  std::vector<Jump> jumps_;
  std::vector<BlockId> catch_stack_;
};

} // namespace

std::optional<Location> Cfg::locate(const Ast& ast, NodeId node) const {
  for (NodeId n = node; n != kNoNode; n = ast.node(n).parent) {
    auto it = element_location.find(n);
    if (it != element_location.end()) return it->second;
    if (n == function) break;
    if (n != node && ast.is_function(n)) break;
  }
  return std::nullopt;
}

Cfg build_cfg(const Ast& ast, NodeId root) { return CfgBuilder(ast, root).run(); }

std::vector<NodeId> cfg_roots(const Ast& ast) {
  std::vector<NodeId> out;
  if (ast.root() == kNoNode) return out;
  out.push_back(ast.root());
  std::vector<NodeId> fns;
  for (NodeId id = 0; id < ast.size(); ++id)
    if (ast.is_function(id)) fns.push_back(id);
  std::sort(fns.begin(), fns.end(), [&](NodeId a, NodeId b) {
    return ast.node(a).span.start < ast.node(b).span.start;
  });
  out.insert(out.end(), fns.begin(), fns.end());
  return out;
}

bool DomInfo::dominates(BlockId a, BlockId b) const {
  for (;;) {
    if (a == b) return true;
    auto it = idom.find(b);
    if (it == idom.end()) return false;
    b = it->second;
  }
}

DomInfo dominators(const Cfg& cfg) {
  // Iterative algorithm of Cooper, Harvey and Kennedy over reverse postorder.
  DomInfo info;
  std::size_t n = cfg.blocks.size();
  if (n <= 1) return info;
  std::vector<BlockId> rpo;
  std::vector<std::uint32_t> rpo_index(n, kNone);
  {
    std::vector<bool> seen(n, false);
    std::vector<std::pair<BlockId, std::size_t>> stack{{cfg.entry, 0}};
    seen[cfg.entry] = true;
    std::vector<BlockId> post;
    while (!stack.empty()) {
      auto& [b, i] = stack.back();
      if (i < cfg.blocks[b].succs.size()) {
        BlockId s = cfg.blocks[b].succs[i++];
        if (!seen[s]) {
          seen[s] = true;
          stack.emplace_back(s, 0);
        }
      } else {
        post.push_back(b);
        stack.pop_back();
      }
    }
    rpo.assign(post.rbegin(), post.rend());
    for (std::uint32_t i = 0; i < rpo.size(); ++i) rpo_index[rpo[i]] = i;
  }
  std::vector<BlockId> doms(n, kNone);
  doms[cfg.entry] = cfg.entry;
  auto intersect = [&](BlockId a, BlockId b) {
    while (a != b) {
      while (rpo_index[a] > rpo_index[b]) a = doms[a];
      while (rpo_index[b] > rpo_index[a]) b = doms[b];
    }
    return a;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 1; i < rpo.size(); ++i) {
      BlockId b = rpo[i];
      BlockId new_idom = kNone;
      for (BlockId p : cfg.blocks[b].preds) {
        if (doms[p] == kNone) continue;
        new_idom = new_idom == kNone ? p : intersect(p, new_idom);
      }
      if (doms[b] != new_idom) {
        doms[b] = new_idom;
        changed = true;
      }
    }
  }
  for (BlockId b = 0; b < n; ++b)
    if (b != cfg.entry && doms[b] != kNone) info.idom[b] = doms[b];
  return info;
}

std::vector<std::vector<BlockId>> dominance_frontiers(const Cfg& cfg, const DomInfo& dom) {
  std::vector<std::vector<BlockId>> df(cfg.blocks.size());
  for (BlockId b = 0; b < cfg.blocks.size(); ++b) {
    const auto& preds = cfg.blocks[b].preds;
    if (preds.size() < 2) continue;
    auto it = dom.idom.find(b);
    if (it == dom.idom.end()) continue;
    for (BlockId p : preds) {
      BlockId runner = p;
      while (runner != it->second) {
        auto& f = df[runner];
        if (std::find(f.begin(), f.end(), b) == f.end()) f.push_back(b);
        auto up = dom.idom.find(runner);
        if (up == dom.idom.end()) break;
        runner = up->second;
      }
    }
  }
  for (auto& f : df) std::sort(f.begin(), f.end());
  return df;
}

} // namespace propcheck
