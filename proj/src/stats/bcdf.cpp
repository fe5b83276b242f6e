#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "propcheck/error.hpp"
#include "propcheck/stats.hpp"

namespace propcheck {

namespace {

using namespace boost::math::policies;
using BetaPolicy = policy<domain_error<errno_on_error>, overflow_error<errno_on_error>,
                          underflow_error<ignore_error>, evaluation_error<errno_on_error>,
                          promote_double<true>>;

} // namespace

double bcdf(std::uint64_t k, std::uint64_t n, double p) {
  if (std::isnan(p) || p < 0.0 || p > 1.0) throw DomainError("bcdf: p must lie in [0,1]");
  if (k > n) throw DomainError("bcdf: k must not exceed n");
  if (k == n || p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;
  // P(X <= k) = 1 - I_p(k+1, n-k), evaluated as the complemented
  // regularized incomplete beta to keep small tails exact.
  double a = static_cast<double>(k) + 1.0;
  double b = static_cast<double>(n - k);
  double v = boost::math::ibetac(a, b, p, BetaPolicy());
  if (std::isnan(v)) throw DomainError("bcdf: evaluation failed");
  return std::clamp(v, 0.0, 1.0);
}

} // namespace propcheck
