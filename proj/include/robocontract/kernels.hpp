#pragma once

// Data-parallel inner loops of the allocation engine. Every instruction-set
// variant must produce bit-identical output to the scalar reference: the
// arithmetic is dx*dx + dy*dy with no fused multiply-add, and argmin ties
// resolve to the lowest site index.

#include <cstdint>
#include <span>
#include <string_view>

namespace robocontract::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// For each query point i, the index of the closest site (lowest index on
/// ties) and the squared distance to it. Requires at least one site.
using NearestSiteFn = void (*)(std::span<const double> qx, std::span<const double> qy,
                               std::span<const double> sx, std::span<const double> sy,
                               std::span<std::uint32_t> index_out, std::span<double> d2_out);

/// Squared distance from (px, py) to every site.
using SquaredDistancesFn = void (*)(double px, double py, std::span<const double> sx,
                                    std::span<const double> sy, std::span<double> out);

struct KernelTable {
  Isa isa;
  NearestSiteFn nearest_site;
  SquaredDistancesFn squared_distances;
};

/// True when the running CPU can execute `isa` and it was compiled in.
bool isa_available(Isa isa);

/// Table for a specific instruction set; throws if unavailable.
const KernelTable& kernels_for(Isa isa);

/// Best available table, chosen once at first call. Setting the
/// ROBOCONTRACT_FORCE_SCALAR environment variable pins the scalar path.
const KernelTable& active_kernels();

namespace scalar {
void nearest_site(std::span<const double> qx, std::span<const double> qy,
                  std::span<const double> sx, std::span<const double> sy,
                  std::span<std::uint32_t> index_out, std::span<double> d2_out);
void squared_distances(double px, double py, std::span<const double> sx,
                       std::span<const double> sy, std::span<double> out);
}  // namespace scalar

#if defined(ROBOCONTRACT_HAVE_AVX2)
namespace avx2 {
void nearest_site(std::span<const double> qx, std::span<const double> qy,
                  std::span<const double> sx, std::span<const double> sy,
                  std::span<std::uint32_t> index_out, std::span<double> d2_out);
void squared_distances(double px, double py, std::span<const double> sx,
                       std::span<const double> sy, std::span<double> out);
}  // namespace avx2
#endif

}  // namespace robocontract::kernels
