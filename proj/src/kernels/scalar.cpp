#include "kernels_impl.hpp"

namespace dsm::kernels::detail {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double weighted_dot_scalar(const double* w, const double* x, const double* y,
                           std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * x[i] * y[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void lincomb_scalar(double alpha, const double* x, double beta, const double* y,
                    double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = alpha * x[i] + beta * y[i];
}

void gemv_scalar(const double* m, const double* x, double* y, std::size_t rows,
                 std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = dot_scalar(m + i * cols, x, cols);
}

void gemv_t_scalar(const double* m, const double* x, double* y, std::size_t rows,
                   std::size_t cols) {
  for (std::size_t j = 0; j < cols; ++j) y[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) axpy_scalar(x[i], m + i * cols, y, cols);
}

}  // namespace dsm::kernels::detail
