#pragma once

// Data-parallel inner loops used across the toolkit.
//
// Every kernel has a scalar reference implementation. Wider variants (AVX2 on
// x86-64) are compiled in separate translation units and picked at runtime
// from the CPU feature flags. Set SOUPBENCH_SIMD=scalar to force the
// reference path.
//
// Exactness between variants:
//   accumulate, axpy, error_counts  bit-identical to scalar
//   squared_distance, dot           same value up to summation order

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace soup::kernels {

struct ErrorCounts {
  std::uint64_t unshared = 0;  // exactly one side wrong
  std::uint64_t shared = 0;    // both sides wrong

  friend bool operator==(const ErrorCounts&, const ErrorCounts&) = default;
};

struct KernelTable {
  std::string_view name;

  // acc[i] += double(x[i])
  void (*accumulate)(const float* x, double* acc, std::size_t n);
  // sum_i (double(a[i]) - double(b[i]))^2
  double (*squared_distance)(const float* a, const float* b, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // Bit i of a word array is 1 when example i is classified correctly.
  // Bits at positions >= n_bits are ignored.
  ErrorCounts (*error_counts)(const std::uint64_t* a, const std::uint64_t* b,
                              std::size_t n_bits);
};

const KernelTable& scalar_table();

// nullptr when the variant was not built or the CPU lacks the feature.
const KernelTable* avx2_table();

// All variants usable on this machine, scalar first.
std::vector<const KernelTable*> available_tables();

// The table used by the rest of the library. Chosen once per process.
const KernelTable& active();

inline void accumulate(std::span<const float> x, std::span<double> acc) {
  active().accumulate(x.data(), acc.data(), x.size());
}

inline double squared_distance(std::span<const float> a, std::span<const float> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

namespace detail {
// Defined in kernels_avx2.cpp when built.
const KernelTable& avx2_table_unchecked();
}  // namespace detail

}  // namespace soup::kernels
