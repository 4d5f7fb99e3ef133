#ifndef FPL_INVARIANTS_HPP_
#define FPL_INVARIANTS_HPP_

#include <vector>

#include "fpl/config.hpp"

namespace fpl {

/// Property checks of every module, evaluated on the configured instance with
/// randomized probes drawn from cfg.solver.seed.
std::vector<Verdict> check_invariants(const RunConfig& cfg);

}  // namespace fpl

#endif  // FPL_INVARIANTS_HPP_
