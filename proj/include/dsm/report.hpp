#pragma once

// Result of a flow integration or an iterative solve stopped by the
// a-posteriori discrepancy rule ||F(u) - f_delta|| <= C1 delta^e.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dsm/core.hpp"

namespace dsm {

enum class StopStatus {
  StoppedByDiscrepancy,
  ExhaustedHorizon,  ///< t_max or n_max reached above the threshold
  StepFloor,         ///< adaptive step fell below step_min
};

[[nodiscard]] std::string_view to_string(StopStatus s) noexcept;

struct ResidualSample {
  double t = 0.0;  ///< time for flows, iteration index for iterations
  double residual = 0.0;
};

struct SolveReport {
  std::string method;
  StopStatus status = StopStatus::ExhaustedHorizon;
  HilbertVector u_final;
  double t_stop = 0.0;
  std::int64_t n_stop = 0;  ///< iterations: n_delta; flows: accepted steps
  double residual_at_stop = 0.0;
  double threshold = 0.0;  ///< C1 delta^e
  double a_at_stop = 0.0;
  std::vector<ResidualSample> history;

  // Bookkeeping. Steps rejected by the adaptive flow integrator, and whether
  // M1 (used for step sizes) was estimated rather than supplied.
  std::int64_t rejected_steps = 0;
  double M1_used = 0.0;
  bool M1_estimated = false;

  [[nodiscard]] bool stopped() const noexcept {
    return status == StopStatus::StoppedByDiscrepancy;
  }
};

}  // namespace dsm
