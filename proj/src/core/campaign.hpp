#pragma once

// JSON-configured verification campaigns streamed as JSON lines.
//
// A config object names a "command" (certify, minkowski, ssa, ssa-bridge,
// counterexample, norm) plus that command's parameters. The seed fully
// determines every line; with "jobs" > 1 trials run concurrently but lines
// are still emitted in trial order, so output bytes do not depend on jobs.
// Lines carry no timestamps.

#include <cstdint>
#include <functional>
#include <string>

#include "core/json_io.hpp"

namespace tracecvx {

using LineSink = std::function<void(const std::string&)>;

struct CampaignResult {
  size_t violations = 0;
  size_t lines = 0;
};

/// kSchema for malformed configs; domain errors propagate from the modules.
CampaignResult run_campaign(const Json& config, const LineSink& sink);

/// Regenerates the shipped fixtures under `dir`: one counterexample per
/// (p, q) in {(3,1), (2.5,1), (4,2), (3,5)} at dimension 2, a psi
/// non-monotonicity witness, and golden functional values with their inputs.
/// Returns the list of files written.
Json make_fixtures(const std::string& dir, std::uint64_t seed);

}  // namespace tracecvx
