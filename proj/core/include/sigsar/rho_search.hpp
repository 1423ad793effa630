#pragma once

#include <functional>

namespace sigsar {

struct RhoSearchOptions {
  double lower = -0.99;
  double upper = 0.99;
  /// Step of the coarse scan that brackets the maximum before refinement.
  double grid_step = 0.02;
  /// Brent precision in bits; 26 bits is the sqrt(epsilon) limit for doubles.
  int bits = 26;
};

struct RhoOptimum {
  double rho = 0.0;
  double value = 0.0;
};

/// Maximises a smooth 1-D function on [lower, upper]: a coarse scan picks the
/// best grid point, then Brent's method refines inside the neighbouring cells.
RhoOptimum maximize_rho(const std::function<double(double)>& objective, const RhoSearchOptions& options = {});

}  // namespace sigsar
