#pragma once

#include "lieadj/algebra.hpp"

namespace lieadj {

/// Matrix exponential by scaling and squaring around a truncated Taylor core.
Matrix expm(const Matrix& a, int taylor_order = 24);

/// Principal square root by the Denman–Beavers iteration.
Matrix sqrtm(const Matrix& a);

/// Principal logarithm by inverse scaling and squaring: square roots until
/// ‖A − I‖_F < 0.25, then the series 2·atanh((A − I)(A + I)⁻¹).
Matrix logm(const Matrix& a);

}  // namespace lieadj
