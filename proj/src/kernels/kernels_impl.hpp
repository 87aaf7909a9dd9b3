#pragma once

#include <cstddef>

namespace dsm::kernels::detail {

double dot_scalar(const double* x, const double* y, std::size_t n);
double weighted_dot_scalar(const double* w, const double* x, const double* y,
                           std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void lincomb_scalar(double alpha, const double* x, double beta, const double* y,
                    double* z, std::size_t n);
void gemv_scalar(const double* m, const double* x, double* y, std::size_t rows,
                 std::size_t cols);
void gemv_t_scalar(const double* m, const double* x, double* y, std::size_t rows,
                   std::size_t cols);

#if defined(DSM_HAVE_AVX2)
double dot_avx2(const double* x, const double* y, std::size_t n);
double weighted_dot_avx2(const double* w, const double* x, const double* y,
                         std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void lincomb_avx2(double alpha, const double* x, double beta, const double* y,
                  double* z, std::size_t n);
void gemv_avx2(const double* m, const double* x, double* y, std::size_t rows,
               std::size_t cols);
void gemv_t_avx2(const double* m, const double* x, double* y, std::size_t rows,
                 std::size_t cols);
#endif

}  // namespace dsm::kernels::detail
