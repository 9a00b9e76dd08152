#ifndef CASIMIR_CASIMIR_HPP
#define CASIMIR_CASIMIR_HPP

// Umbrella header for the library (the CLI front end is separate).

#include "casimir/errors.hpp"
#include "casimir/numerics.hpp"
#include "casimir/observables.hpp"
#include "casimir/parabolic_basis.hpp"
#include "casimir/parallel.hpp"
#include "casimir/spectral.hpp"
#include "casimir/thermal.hpp"
#include "casimir/types.hpp"
#include "casimir/wedge_basis.hpp"

#endif  // CASIMIR_CASIMIR_HPP
