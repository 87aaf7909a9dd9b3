#include <cstdlib>
#include <cstring>

#include "dsm/kernels.hpp"
#include "kernels_impl.hpp"

namespace dsm::kernels {

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{Isa::Scalar,         detail::dot_scalar,
                                 detail::weighted_dot_scalar,
                                 detail::axpy_scalar, detail::lincomb_scalar,
                                 detail::gemv_scalar, detail::gemv_t_scalar};
  return table;
}

const KernelTable* avx2_table() noexcept {
#if defined(DSM_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  static const KernelTable table{Isa::Avx2,         detail::dot_avx2,
                                 detail::weighted_dot_avx2,
                                 detail::axpy_avx2, detail::lincomb_avx2,
                                 detail::gemv_avx2, detail::gemv_t_avx2};
  return supported ? &table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept {
  static const KernelTable& chosen = []() -> const KernelTable& {
    const char* forced = std::getenv("DSM_ISA");
    if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return chosen;
}

}  // namespace dsm::kernels
