#pragma once

#include "ewjn/liouville.hpp"

namespace ewjn {

// exp(A) for the 16x16 Liouville generators. Small norms take a truncated
// Taylor series (the per-step generators here have ||A h|| ~ 1e-2); larger
// norms use scaling-and-squaring with the order-13 Pade approximant.
Matrix16cd expm16(const Matrix16cd& a);

}  // namespace ewjn
