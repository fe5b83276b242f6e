#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "propcheck/cfg.hpp"
#include "propcheck/scope.hpp"

namespace propcheck {

using SsaVar = std::uint32_t;

// SSA value identities of identifier references. Two references with the
// same SsaVar denote the same value. References without a safe identity
// (variables reassigned from a nested function, reassigned globals,
// unreachable code) are absent.
struct SsaInfo {
  std::unordered_map<NodeId, SsaVar> value_of;

  std::optional<SsaVar> var_of(NodeId ident) const;
};

// `cfgs` and `doms` hold one entry per root of cfg_roots(ast), in that order.
SsaInfo build_ssa(const Ast& ast, const ScopeInfo& scopes, const std::vector<Cfg>& cfgs,
                  const std::vector<DomInfo>& doms);

} // namespace propcheck
