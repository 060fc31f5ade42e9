#pragma once

#include <span>

#include "schatten/grid.hpp"

namespace schatten::fft {

/// Unnormalized in-place DFT over the d axes of a grid. sign = -1 forward, +1 backward.
void transform(const Grid& g, std::span<cplx> data, int sign);

/// Unnormalized in-place DFT of an N x N kernel over all 2d axes.
/// The buffer is laid out column-major as K(x, y) at x + N*y.
void transform_kernel(const Grid& g, std::span<cplx> data, int sign);

}  // namespace schatten::fft
