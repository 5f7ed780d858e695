#pragma once

#include "cpe/config.hpp"
#include "cpe/transform.hpp"

namespace cpe {

/// Initial state named by `init`: rest, a smooth wave, smooth random Fourier
/// modes (seeded), or a field dump. w is diagnosed.
ModelState initial_state(const InitSpec& init, const GridSpec& g, const Params& p);

/// Smooth unit-amplitude pattern used to perturb a datum in the stability
/// study: xi -> xi (1 + delta phi / 2) or u1 -> u1 + delta phi.
ModelState perturb(const ModelState& s, const std::string& field, double delta,
                   const Params& p);

}  // namespace cpe
