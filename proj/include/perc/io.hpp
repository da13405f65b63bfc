#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "perc/bounds.hpp"
#include "perc/couplings.hpp"
#include "perc/explore.hpp"
#include "perc/union_find.hpp"

namespace perc {
namespace io {

// Doubles print with 17 significant digits (exact round-trip); the table CSV
// prints 4 decimals.
inline std::string json_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fixed4(double v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string bound_result_json(const bounds::BoundResult& r);
std::string table_csv(const std::vector<bounds::TableRow>& rows);
std::string table_json(const std::vector<bounds::TableRow>& rows);
std::string survival_json(const ModelSpec& model, const mc::SurvivalEstimate& est, uint64_t seed);
std::string survival_csv(const mc::SurvivalEstimate& est);
std::string sweep_csv(const mc::SweepCurve& curve);
std::string sweep_json(const ModelSpec& model, const mc::SweepCurve& curve, uint64_t seed);
std::string step_record_jsonl(const couplings::StepRecord& rec);
std::string domination_report_json(const couplings::CouplingParams& params,
                                   const couplings::DominationReport& report,
                                   const std::vector<couplings::CalibrationResult>& calibrations,
                                   uint64_t seed);

}  // namespace io
}  // namespace perc
