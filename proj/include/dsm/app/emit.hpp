#pragma once

// CSV / JSON serialization of solver reports. Field order is fixed; floats are
// written with 17 significant digits so values round-trip exactly.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsm/bench.hpp"
#include "dsm/discrepancy.hpp"
#include "dsm/inequalities.hpp"
#include "dsm/report.hpp"
#include "dsm/schedules.hpp"

namespace dsm::app {

enum class Format { Csv, Json };

Format format_from_string(const std::string& s);

/// One solve on one noisy data set.
struct SolveRow {
  double delta_rel = 0.0;
  std::uint64_t seed = 0;
  double delta = 0.0;
  SolveReport report;
  std::optional<double> rel_error;  ///< ||u - exact|| / ||exact|| when known
};

struct DPRow {
  double delta_rel = 0.0;
  std::uint64_t seed = 0;
  double delta = 0.0;
  DPResult result;
  std::optional<double> rel_error;
  std::optional<double> a_analytic;  ///< closed form, rank-one problem only
};

std::string format_double(double x);

std::string emit_solve(const std::vector<SolveRow>& rows, Format f);
/// t,residual per sample; in JSON, one history array per row.
std::string emit_solve_history(const std::vector<SolveRow>& rows, Format f);
std::string emit_dp(const std::vector<DPRow>& rows, Format f);
std::string emit_conditions(const ConditionReport& r, Format f);
std::string emit_bound(const BoundReport& r, Format f, bool trajectory);
/// CSV: delta_rel,n_iterations,rel_error,residual_at_stop,a_at_stop,seed_count.
/// JSON additionally carries per-seed detail.
std::string emit_table1(const std::vector<Table1Row>& rows, Format f);

/// Writes `content` to `path`; throws IoError.
void write_file(const std::string& path, const std::string& content);

}  // namespace dsm::app
