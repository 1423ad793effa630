#include "sigsar/rho_search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

namespace sigsar {

RhoOptimum maximize_rho(const std::function<double(double)>& objective, const RhoSearchOptions& options) {
  if (!(options.upper > options.lower) || !(options.grid_step > 0.0))
    throw std::invalid_argument("maximize_rho: invalid search interval");

  const int cells = std::max(1, static_cast<int>(std::ceil((options.upper - options.lower) / options.grid_step)));
  const double step = (options.upper - options.lower) / cells;

  RhoOptimum best{options.lower, -std::numeric_limits<double>::infinity()};
  int best_index = 0;
  for (int i = 0; i <= cells; ++i) {
    const double rho = (i == cells) ? options.upper : options.lower + i * step;
    const double v = objective(rho);
    if (v > best.value) {
      best = {rho, v};
      best_index = i;
    }
  }
  if (!std::isfinite(best.value)) throw std::runtime_error("maximize_rho: objective is not finite on the grid");

  const double lo = std::max(options.lower, options.lower + (best_index - 1) * step);
  const double hi = std::min(options.upper, options.lower + (best_index + 1) * step);
  std::uintmax_t max_iter = 200;
  const auto [rho, neg] = boost::math::tools::brent_find_minima(
      [&](double r) { return -objective(r); }, lo, hi, options.bits, max_iter);
  if (-neg > best.value) best = {rho, -neg};
  return best;
}

}  // namespace sigsar
