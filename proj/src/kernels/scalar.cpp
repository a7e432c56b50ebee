#include <limits>

#include "robocontract/kernels.hpp"

namespace robocontract::kernels::scalar {

void nearest_site(std::span<const double> qx, std::span<const double> qy,
                  std::span<const double> sx, std::span<const double> sy,
                  std::span<std::uint32_t> index_out, std::span<double> d2_out) {
  const std::size_t sites = sx.size();
  for (std::size_t i = 0; i < qx.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_index = 0;
    for (std::size_t s = 0; s < sites; ++s) {
      const double dx = qx[i] - sx[s];
      const double dy = qy[i] - sy[s];
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        best_index = static_cast<std::uint32_t>(s);
      }
    }
    index_out[i] = best_index;
    d2_out[i] = best;
  }
}

void squared_distances(double px, double py, std::span<const double> sx,
                       std::span<const double> sy, std::span<double> out) {
  for (std::size_t s = 0; s < sx.size(); ++s) {
    const double dx = px - sx[s];
    const double dy = py - sy[s];
    out[s] = dx * dx + dy * dy;
  }
}

}  // namespace robocontract::kernels::scalar
