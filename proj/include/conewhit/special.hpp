#pragma once

// Small scalar special-function helpers shared across modules.

namespace conewhit {

// Digamma (psi) for x > 0.
double digamma(double x);

}  // namespace conewhit
