#pragma once

// Data-parallel inner loops used by the vector and operator layers.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2+FMA variant. The variant is chosen once at runtime from CPUID; the
// environment variable DSM_ISA=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace dsm::kernels {

enum class Isa { Scalar, Avx2 };

[[nodiscard]] std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*weighted_dot)(const double* w, const double* x, const double* y,
                         std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // z = alpha * x + beta * y
  void (*lincomb)(double alpha, const double* x, double beta, const double* y,
                  double* z, std::size_t n);
  // y = M x, M row-major rows x cols
  void (*gemv)(const double* m, const double* x, double* y, std::size_t rows,
               std::size_t cols);
  // y = M^T x, M row-major rows x cols
  void (*gemv_t)(const double* m, const double* x, double* y, std::size_t rows,
                 std::size_t cols);
};

const KernelTable& scalar_table() noexcept;

// nullptr when the build or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table() noexcept;

// Table selected at first use; stable for the process lifetime.
const KernelTable& active() noexcept;

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}

inline double weighted_dot(std::span<const double> w, std::span<const double> x,
                           std::span<const double> y) {
  return active().weighted_dot(w.data(), x.data(), y.data(), x.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void lincomb(double alpha, std::span<const double> x, double beta,
                    std::span<const double> y, std::span<double> z) {
  active().lincomb(alpha, x.data(), beta, y.data(), z.data(), x.size());
}

inline void gemv(std::span<const double> m, std::size_t rows, std::size_t cols,
                 std::span<const double> x, std::span<double> y) {
  active().gemv(m.data(), x.data(), y.data(), rows, cols);
}

inline void gemv_t(std::span<const double> m, std::size_t rows, std::size_t cols,
                   std::span<const double> x, std::span<double> y) {
  active().gemv_t(m.data(), x.data(), y.data(), rows, cols);
}

}  // namespace dsm::kernels
