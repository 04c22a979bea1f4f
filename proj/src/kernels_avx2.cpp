// Compiled with -mavx2 -mfma -mpopcnt. Only reached after a runtime CPU check.
#include "soup/kernels.hpp"

#include <immintrin.h>

#include <bit>

namespace soup::kernels::detail {
namespace {

void accumulate_avx2(const float* x, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d lo = _mm256_cvtps_pd(_mm_loadu_ps(x + i));
    const __m256d hi = _mm256_cvtps_pd(_mm_loadu_ps(x + i + 4));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), lo));
    _mm256_storeu_pd(acc + i + 4, _mm256_add_pd(_mm256_loadu_pd(acc + i + 4), hi));
  }
  for (; i < n; ++i) acc[i] += static_cast<double>(x[i]);
}

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double squared_distance_avx2(const float* a, const float* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_cvtps_pd(_mm_loadu_ps(a + i)),
                                     _mm256_cvtps_pd(_mm_loadu_ps(b + i)));
    const __m256d d1 = _mm256_sub_pd(_mm256_cvtps_pd(_mm_loadu_ps(a + i + 4)),
                                     _mm256_cvtps_pd(_mm_loadu_ps(b + i + 4)));
    s0 = _mm256_fmadd_pd(d0, d0, s0);
    s1 = _mm256_fmadd_pd(d1, d1, s1);
  }
  double sum = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return sum;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
  }
  double sum = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

// Separate multiply and add so every lane rounds exactly like the scalar loop.
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// Nibble-table popcount (Mula): per-byte counts via pshufb, summed with psadbw.
__m256i popcount_bytes(__m256i v) {
  const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                       0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low_mask);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
  return _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
}

std::uint64_t hsum_u64(__m256i v) {
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

ErrorCounts error_counts_avx2(const std::uint64_t* a, const std::uint64_t* b,
                              std::size_t n_bits) {
  const std::size_t full = n_bits / 64;
  const __m256i ones = _mm256_set1_epi64x(-1);
  __m256i acc_uns = _mm256_setzero_si256();
  __m256i acc_sha = _mm256_setzero_si256();
  std::size_t w = 0;
  for (; w + 4 <= full; w += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + w));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + w));
    const __m256i uns = _mm256_xor_si256(va, vb);
    // ~a & ~b == ~(a | b)
    const __m256i sha = _mm256_xor_si256(_mm256_or_si256(va, vb), ones);
    acc_uns = _mm256_add_epi64(acc_uns, _mm256_sad_epu8(popcount_bytes(uns), _mm256_setzero_si256()));
    acc_sha = _mm256_add_epi64(acc_sha, _mm256_sad_epu8(popcount_bytes(sha), _mm256_setzero_si256()));
  }
  ErrorCounts out{hsum_u64(acc_uns), hsum_u64(acc_sha)};
  for (; w < full; ++w) {
    out.unshared += static_cast<std::uint64_t>(std::popcount(a[w] ^ b[w]));
    out.shared += static_cast<std::uint64_t>(std::popcount(~(a[w] | b[w])));
  }
  if (const std::size_t tail = n_bits % 64; tail != 0) {
    const std::uint64_t mask = (std::uint64_t{1} << tail) - 1;
    out.unshared += static_cast<std::uint64_t>(std::popcount((a[full] ^ b[full]) & mask));
    out.shared += static_cast<std::uint64_t>(std::popcount(~(a[full] | b[full]) & mask));
  }
  return out;
}

}  // namespace

const KernelTable& avx2_table_unchecked() {
  static const KernelTable table{
      "avx2",   accumulate_avx2, squared_distance_avx2,
      dot_avx2, axpy_avx2,       error_counts_avx2,
  };
  return table;
}

}  // namespace soup::kernels::detail
