#pragma once

// Subcommand implementations behind the CLI front end; kept as library
// functions so the CSV schemas and determinism are directly testable.

#include <ostream>
#include <stdexcept>
#include <string>

#include "lde/run_config.hpp"

namespace lde {

/// Command-line misuse distinct from physics-domain and numerical errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void run_jeff_scaling(const RunConfig& cfg, std::ostream& os);
void run_jeff_surface(const RunConfig& cfg, std::ostream& os);
void run_decoherence(const RunConfig& cfg, std::ostream& os);
void run_teleport(const RunConfig& cfg, std::ostream& os);

/// Resolve the channel coupling: explicit override or the saturated value
/// from the configured chain.
double resolve_j_eff(const RunConfig& cfg, std::string* source = nullptr);

}  // namespace lde
