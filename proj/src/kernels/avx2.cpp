// Compiled with -mavx2 only; callers reach it through the dispatch table
// after a runtime CPU check.

#include <immintrin.h>

#include <limits>

#include "robocontract/kernels.hpp"

namespace robocontract::kernels::avx2 {

void nearest_site(std::span<const double> qx, std::span<const double> qy,
                  std::span<const double> sx, std::span<const double> sy,
                  std::span<std::uint32_t> index_out, std::span<double> d2_out) {
  const std::size_t n = qx.size();
  const std::size_t sites = sx.size();
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());

  // Four query points per lane group; site indices ride along as doubles,
  // which is exact far beyond any realistic robot count.
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d px = _mm256_loadu_pd(qx.data() + i);
    const __m256d py = _mm256_loadu_pd(qy.data() + i);
    __m256d best = inf;
    __m256d best_index = _mm256_setzero_pd();
    for (std::size_t s = 0; s < sites; ++s) {
      const __m256d dx = _mm256_sub_pd(px, _mm256_set1_pd(sx[s]));
      const __m256d dy = _mm256_sub_pd(py, _mm256_set1_pd(sy[s]));
      const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
      const __m256d closer = _mm256_cmp_pd(d2, best, _CMP_LT_OQ);
      best = _mm256_blendv_pd(best, d2, closer);
      best_index = _mm256_blendv_pd(best_index, _mm256_set1_pd(static_cast<double>(s)), closer);
    }
    alignas(32) double idx[4];
    _mm256_store_pd(idx, best_index);
    _mm256_storeu_pd(d2_out.data() + i, best);
    for (int lane = 0; lane < 4; ++lane) index_out[i + static_cast<std::size_t>(lane)] = static_cast<std::uint32_t>(idx[lane]);
  }
  if (i < n) {
    scalar::nearest_site(qx.subspan(i), qy.subspan(i), sx, sy, index_out.subspan(i),
                         d2_out.subspan(i));
  }
}

void squared_distances(double px, double py, std::span<const double> sx,
                       std::span<const double> sy, std::span<double> out) {
  const std::size_t n = sx.size();
  const __m256d vx = _mm256_set1_pd(px);
  const __m256d vy = _mm256_set1_pd(py);
  std::size_t s = 0;
  for (; s + 4 <= n; s += 4) {
    const __m256d dx = _mm256_sub_pd(vx, _mm256_loadu_pd(sx.data() + s));
    const __m256d dy = _mm256_sub_pd(vy, _mm256_loadu_pd(sy.data() + s));
    _mm256_storeu_pd(out.data() + s,
                     _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
  }
  if (s < n) scalar::squared_distances(px, py, sx.subspan(s), sy.subspan(s), out.subspan(s));
}

}  // namespace robocontract::kernels::avx2
