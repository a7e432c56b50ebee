#include <cstdlib>
#include <stdexcept>
#include <string>

#include "robocontract/kernels.hpp"

namespace robocontract::kernels {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, &scalar::nearest_site, &scalar::squared_distances};
#if defined(ROBOCONTRACT_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2, &avx2::nearest_site, &avx2::squared_distances};
#endif

const KernelTable& select() {
  if (const char* force = std::getenv("ROBOCONTRACT_FORCE_SCALAR"); force && *force && std::string(force) != "0")
    return kScalar;
#if defined(ROBOCONTRACT_HAVE_AVX2)
  if (isa_available(Isa::Avx2)) return kAvx2;
#endif
  return kScalar;
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(ROBOCONTRACT_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa))
    throw std::runtime_error("kernel ISA " + std::string(to_string(isa)) + " is not available");
#if defined(ROBOCONTRACT_HAVE_AVX2)
  if (isa == Isa::Avx2) return kAvx2;
#endif
  return kScalar;
}

const KernelTable& active_kernels() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace robocontract::kernels
