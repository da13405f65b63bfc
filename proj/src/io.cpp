#include "perc/io.hpp"

#include <sstream>

namespace perc {
namespace io {

namespace {

std::string vertex_json(const Vertex& v) {
  std::string s = "[";
  for (int i = 0; i < v.dim; ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s + "]";
}

const char* elem_kind_name(ElemKind k) {
  switch (k) {
    case ElemKind::site: return "site";
    case ElemKind::zd_bond: return "edge";
    case ElemKind::tri_bond: return "tri-edge";
    case ElemKind::split_edge: return "split-edge";
    case ElemKind::split_vertex: return "split-vertex";
  }
  return "?";
}

}  // namespace

std::string bound_result_json(const bounds::BoundResult& r) {
  std::ostringstream os;
  os << "{\"family\":\"" << family_name(r.model) << "\",\"d\":" << r.model.d << ",\"method\":\""
     << bounds::method_name(r.method) << "\",\"value\":" << json_double(r.value)
     << ",\"rounded\":" << fixed4(r.rounded) << ",\"provenance\":[";
  for (size_t i = 0; i < r.provenance.size(); ++i) {
    const auto& pe = r.provenance[i];
    if (i) os << ",";
    os << "{\"method\":\"" << bounds::method_name(pe.method) << "\",\"d\":" << pe.d
       << ",\"value\":" << json_double(pe.value) << "}";
  }
  os << "]}";
  return os.str();
}

std::string table_csv(const std::vector<bounds::TableRow>& rows) {
  std::ostringstream os;
  os << "d,bond,oriented_bond,site,oriented_site\n";
  for (const auto& row : rows) {
    os << row.d;
    for (const auto& cell : row.cells) os << "," << fixed4(cell.rounded);
    os << "\n";
  }
  return os.str();
}

std::string table_json(const std::vector<bounds::TableRow>& rows) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (i) os << ",";
    os << "{\"d\":" << row.d << ",\"method_extended\":" << (row.method_extended ? "true" : "false");
    static const char* names[4] = {"bond", "oriented_bond", "site", "oriented_site"};
    for (int c = 0; c < 4; ++c) {
      const auto& cell = row.cells[static_cast<size_t>(c)];
      os << ",\"" << names[c] << "\":{\"value\":" << json_double(cell.value)
         << ",\"rounded\":" << fixed4(cell.rounded) << ",\"method\":\""
         << bounds::method_name(cell.method) << "\"}";
    }
    os << "}";
  }
  os << "]";
  return os.str();
}

std::string survival_json(const ModelSpec& model, const mc::SurvivalEstimate& est, uint64_t seed) {
  std::ostringstream os;
  os << "{\"family\":\"" << family_name(model) << "\",\"d\":" << model.d
     << ",\"p\":" << json_double(est.p) << ",\"box_radius\":" << est.box_radius
     << ",\"replicas\":" << est.replicas << ",\"hits\":" << est.hits
     << ",\"estimate\":" << json_double(est.estimate) << ",\"ci_low\":" << json_double(est.ci_low)
     << ",\"ci_high\":" << json_double(est.ci_high) << ",\"seed\":" << seed
     << ",\"starts_treated_open\":true,\"event\":\"boundary-hit\"}";
  return os.str();
}

std::string survival_csv(const mc::SurvivalEstimate& est) {
  std::ostringstream os;
  os << "p,estimate,ci_low,ci_high\n";
  os << json_double(est.p) << "," << json_double(est.estimate) << ","
     << json_double(est.ci_low) << "," << json_double(est.ci_high) << "\n";
  return os.str();
}

std::string sweep_csv(const mc::SweepCurve& curve) {
  std::ostringstream os;
  os << "p,estimate,ci_low,ci_high\n";
  for (const auto& pt : curve.points)
    os << json_double(pt.p) << "," << json_double(pt.estimate) << "," << json_double(pt.ci_low)
       << "," << json_double(pt.ci_high) << "\n";
  return os.str();
}

std::string sweep_json(const ModelSpec& model, const mc::SweepCurve& curve, uint64_t seed) {
  std::ostringstream os;
  os << "{\"family\":\"" << family_name(model) << "\",\"d\":" << model.d
     << ",\"box_radius\":" << curve.box_radius << ",\"replicas\":" << curve.replicas
     << ",\"seed\":" << seed << ",\"points\":[";
  for (size_t i = 0; i < curve.points.size(); ++i) {
    const auto& pt = curve.points[i];
    if (i) os << ",";
    os << "{\"p\":" << json_double(pt.p) << ",\"estimate\":" << json_double(pt.estimate)
       << ",\"ci_low\":" << json_double(pt.ci_low) << ",\"ci_high\":" << json_double(pt.ci_high)
       << "}";
  }
  os << "]}";
  return os.str();
}

std::string step_record_jsonl(const couplings::StepRecord& rec) {
  std::ostringstream os;
  os << "{\"n\":" << rec.n << ",\"item\":{\"kind\":\"" << elem_kind_name(rec.item.kind)
     << "\",\"base\":" << vertex_json(rec.item.base) << ",\"dir\":" << rec.item.dir
     << ",\"label\":" << rec.item.label << "},\"event\":{\"occurred\":"
     << (rec.event.occurred ? "true" : "false") << ",\"k\":" << rec.event.landing_k
     << ",\"label\":" << rec.event.landing_label << "},\"infected_size\":" << rec.infected_size
     << "}";
  return os.str();
}

std::string domination_report_json(const couplings::CouplingParams& params,
                                   const couplings::DominationReport& report,
                                   const std::vector<couplings::CalibrationResult>& calibrations,
                                   uint64_t seed) {
  std::ostringstream os;
  os << "{\"kind\":\"" << couplings::coupling_kind_name(params.kind) << "\",\"d\":" << params.d;
  if (params.kind == couplings::CouplingKindId::fold) os << ",\"k\":" << params.k;
  if (params.kind == couplings::CouplingKindId::triangular) {
    os << ",\"p1\":" << json_double(params.p1) << ",\"p2\":" << json_double(params.p2)
       << ",\"p3\":" << json_double(params.p3);
  } else {
    os << ",\"p\":" << json_double(params.p);
  }
  os << ",\"seed\":" << seed << ",\"replicas\":" << report.replicas
     << ",\"step_cap\":" << report.step_cap << ",\"pathwise\":{\"violations\":"
     << report.pathwise_violations << ",\"pass\":" << (report.pathwise_violations == 0 ? "true" : "false")
     << "},\"identities\":{\"violations\":" << report.identity_violations
     << ",\"pass\":" << (report.identity_violations == 0 ? "true" : "false") << "}";
  os << ",\"distributional\":{\"alpha\":" << json_double(report.alpha_total) << ",\"tails\":[";
  for (size_t i = 0; i < report.tails.size(); ++i) {
    const auto& t = report.tails[i];
    if (i) os << ",";
    os << "{\"m\":" << t.m << ",\"coupling\":" << json_double(t.coupling)
       << ",\"direct\":" << json_double(t.direct) << ",\"pvalue\":" << json_double(t.pvalue)
       << ",\"pass\":" << (t.pass ? "true" : "false") << "}";
  }
  os << "],\"pass\":" << (report.distributional_pass ? "true" : "false") << "}";
  os << ",\"calibration\":[";
  for (size_t i = 0; i < calibrations.size(); ++i) {
    const auto& c = calibrations[i];
    if (i) os << ",";
    os << "{\"expected\":" << json_double(c.expected) << ",\"empirical\":" << json_double(c.empirical)
       << ",\"samples\":" << c.samples << ",\"sigma_units\":" << json_double(c.sigma_units)
       << ",\"pass\":" << (c.pass ? "true" : "false") << "}";
  }
  bool cal_ok = true;
  for (const auto& c : calibrations) cal_ok = cal_ok && c.pass;
  os << "],\"pass\":" << ((report.pass && cal_ok) ? "true" : "false") << "}";
  return os.str();
}

}  // namespace io
}  // namespace perc
