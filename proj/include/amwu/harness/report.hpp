#pragma once

// File outputs: trace CSV, JSON sidecar, content hash and SVG charts.

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "amwu/algorithms.hpp"

namespace amwu::harness {

/// t,f,grad_norm followed by x<block>_<i> for every coordinate.
std::string csv_header(const Shape& shape);
/// One row per record, numbers printed with %.17g.
std::string trace_csv(const Trace& trace, const Shape& shape);

/// SHA-1 of "blob <size>\0<content>", the object id git assigns to `content`.
std::string git_blob_hash(const std::string& content);

nlohmann::json schedule_trace_json(const Trace& trace);

struct Series {
  std::string label;
  std::vector<double> t;
  std::vector<double> f;
  std::vector<Vector> points;  ///< flattened x, optional
};

/// f-vs-t chart; when every series carries 3-dimensional points, a second
/// panel shows the trajectories on the 2-simplex in barycentric coordinates.
/// `metadata` is embedded verbatim in a <metadata> element.
std::string svg_chart(const std::string& title, const std::vector<Series>& series, const std::string& metadata);

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::string& path, const std::string& content);

/// %.17g
std::string num(double v);

}  // namespace amwu::harness
