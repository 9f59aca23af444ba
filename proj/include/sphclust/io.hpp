#pragma once

#include "sphclust/exact_solver.hpp"
#include "sphclust/medians.hpp"
#include "sphclust/model.hpp"
#include "sphclust/stats.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace sphclust {

using Json = nlohmann::ordered_json;

enum class Normalize { None, MinMax };

struct IngestOptions {
    char delimiter = ',';
    bool has_header = false;
    Normalize normalize = Normalize::None;
};

/// One point per row. Blank lines are skipped; fields may carry surrounding
/// whitespace.
Dataset parse_dataset(std::istream& in, const IngestOptions& opts = {});
Dataset ingest(const std::string& path, const IngestOptions& opts = {});

/// Per-coordinate (x - min) / (max - min); constant columns become 0.
Eigen::MatrixXd min_max_normalize(const Eigen::MatrixXd& points);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

void write_dataset(std::ostream& out, const Dataset& data, char delimiter = ',');

/// step_index, kind, F_value, gen_grad_norm, n_on_spheres, x0..x{d-1}.
/// Row 0 is the start point with kind "Start".
void write_trace(std::ostream& out, const Trajectory& trajectory, const Problem& problem,
                 char delimiter = ',');

/// x, y, is_outlier, label.
void write_projection(std::ostream& out, const ProjectionTable& table, char delimiter = ',');

Json point_to_json(const Point& p);
Point point_from_json(const Json& j);

Json to_json(const EtaReport& report);
EtaReport eta_report_from_json(const Json& j);

Json to_json(const CenterReport& report);

/// Writes to `path`, or to stdout when `path` is empty.
void write_text(const std::string& path, const std::string& text);

} // namespace sphclust
