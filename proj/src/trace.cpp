#include "mcf/trace.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mcf/errors.hpp"

namespace mcf {

void FlowTrace::append(const TraceRow& row) {
  if (rows.empty()) {
    gauge = row.gauge;
  } else {
    require(row.gauge == gauge, ErrorCode::InvalidArgument,
            "trace rows must share one gauge");
    require(row.time > rows.back().time, ErrorCode::InvalidArgument,
            "trace time coordinates must be strictly increasing");
  }
  rows.push_back(row);
}

const char* singular_trigger_name(SingularTrigger trigger) {
  switch (trigger) {
    case SingularTrigger::CurvatureBlowup: return "curvature_blowup";
    case SingularTrigger::NeckPinch: return "neck_pinch";
    case SingularTrigger::MinEdgeCollapse: return "min_edge_collapse";
  }
  return "?";
}

std::string SingularEvent::to_json() const {
  nlohmann::json j;
  j["location"] = {location.x(), location.y(), location.z()};
  j["time"] = time;
  j["peak_A"] = peak_A;
  j["trigger"] = singular_trigger_name(trigger);
  return j.dump(2);
}

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

void write_trace_csv(const FlowTrace& trace, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::Io, "cannot open " + path + " for writing");
  out << "time,gauge,E_tilde,dissipation,maxA,supF,minEdge,class,class_radius,class_residual\n";
  for (const auto& r : trace.rows) {
    out << fmt(r.time) << ',' << gauge_name(r.gauge) << ',' << fmt(r.e_tilde) << ','
        << fmt(r.dissipation) << ',' << fmt(r.max_A) << ',' << fmt(r.sup_F) << ','
        << fmt(r.min_edge) << ',' << r.cls << ',';
    out << (std::isnan(r.cls_radius) ? "" : fmt(r.cls_radius)) << ',';
    out << (std::isnan(r.cls_residual) ? "" : fmt(r.cls_residual)) << '\n';
  }
  require(out.good(), ErrorCode::Io, "write failed: " + path);
}

FlowTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open " + path);
  FlowTrace trace;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      require(line.rfind("time,gauge,", 0) == 0, ErrorCode::Parse,
              path + ": unexpected trace header");
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
    while (cols.size() < 10) cols.emplace_back();
    require(cols.size() == 10, ErrorCode::Parse, path + ": bad trace row: " + line);
    TraceRow row;
    row.time = std::stod(cols[0]);
    row.gauge = gauge_from_name(cols[1]);
    row.e_tilde = std::stod(cols[2]);
    row.dissipation = std::stod(cols[3]);
    row.max_A = std::stod(cols[4]);
    row.sup_F = std::stod(cols[5]);
    row.min_edge = std::stod(cols[6]);
    row.cls = cols[7];
    if (!cols[8].empty()) row.cls_radius = std::stod(cols[8]);
    if (!cols[9].empty()) row.cls_residual = std::stod(cols[9]);
    trace.append(row);
  }
  return trace;
}

}  // namespace mcf
