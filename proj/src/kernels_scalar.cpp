#include "soup/kernels.hpp"

#include <bit>

namespace soup::kernels {
namespace {

void accumulate_scalar(const float* x, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += static_cast<double>(x[i]);
}

double squared_distance_scalar(const float* a, const float* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return sum;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

ErrorCounts error_counts_scalar(const std::uint64_t* a, const std::uint64_t* b,
                                std::size_t n_bits) {
  ErrorCounts out;
  const std::size_t full = n_bits / 64;
  for (std::size_t w = 0; w < full; ++w) {
    out.unshared += static_cast<std::uint64_t>(std::popcount(a[w] ^ b[w]));
    out.shared += static_cast<std::uint64_t>(std::popcount(~a[w] & ~b[w]));
  }
  if (const std::size_t tail = n_bits % 64; tail != 0) {
    const std::uint64_t mask = (std::uint64_t{1} << tail) - 1;
    out.unshared += static_cast<std::uint64_t>(std::popcount((a[full] ^ b[full]) & mask));
    out.shared += static_cast<std::uint64_t>(std::popcount(~a[full] & ~b[full] & mask));
  }
  return out;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      "scalar",          accumulate_scalar, squared_distance_scalar,
      dot_scalar,        axpy_scalar,       error_counts_scalar,
  };
  return table;
}

}  // namespace soup::kernels
