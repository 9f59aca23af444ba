#include "sphclust/io.hpp"

#include "sphclust/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string_view>

namespace sphclust {

namespace {

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::string where(long line, long column) {
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

} // namespace

Eigen::MatrixXd min_max_normalize(const Eigen::MatrixXd& points) {
    Eigen::MatrixXd out(points.rows(), points.cols());
    for (Eigen::Index j = 0; j < points.rows(); ++j) {
        const double lo = points.row(j).minCoeff();
        const double hi = points.row(j).maxCoeff();
        if (hi > lo)
            out.row(j) = (points.row(j).array() - lo) / (hi - lo);
        else
            out.row(j).setZero();
    }
    return out;
}

Dataset parse_dataset(std::istream& in, const IngestOptions& opts) {
    std::vector<std::vector<double>> rows;
    std::string line;
    long line_no = 0;
    bool header_pending = opts.has_header;
    std::size_t width = 0;
    long width_line = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        std::vector<double> row;
        std::string_view rest = line;
        long column = 0;
        while (true) {
            ++column;
            const auto cut = rest.find(opts.delimiter);
            const std::string_view field = trim(rest.substr(0, cut));
            double v = 0.0;
            const auto* first = field.data();
            const auto* last = first + field.size();
            if (!field.empty() && *first == '+')
                ++first;
            const auto [ptr, ec] = std::from_chars(first, last, v);
            if (field.empty() || ec != std::errc() || ptr != last)
                throw Error(ErrorKind::ParseError,
                            where(line_no, column) + ": cannot parse '" + std::string(field) + "'");
            if (!std::isfinite(v))
                throw Error(ErrorKind::ParseError,
                            where(line_no, column) + ": non-finite value '" + std::string(field) + "'");
            row.push_back(v);
            if (cut == std::string_view::npos)
                break;
            rest.remove_prefix(cut + 1);
        }
        if (rows.empty()) {
            width = row.size();
            width_line = line_no;
        } else if (row.size() != width) {
            throw Error(ErrorKind::RaggedRows, "line " + std::to_string(line_no) + " has " +
                                                   std::to_string(row.size()) + " columns, line " +
                                                   std::to_string(width_line) + " has " +
                                                   std::to_string(width));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw Error(ErrorKind::EmptyFile, "no data rows");

    Eigen::MatrixXd pts(static_cast<Eigen::Index>(width), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < width; ++k)
            pts(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = rows[i][k];
    if (opts.normalize == Normalize::MinMax)
        pts = min_max_normalize(pts);
    return Dataset(std::move(pts));
}

Dataset ingest(const std::string& path, const IngestOptions& opts) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
    return parse_dataset(in, opts);
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_dataset(std::ostream& out, const Dataset& data, char delimiter) {
    for (int i = 0; i < data.size(); ++i) {
        for (int k = 0; k < data.dim(); ++k) {
            if (k)
                out << delimiter;
            out << format_double(data.points()(k, i));
        }
        out << '\n';
    }
}

void write_trace(std::ostream& out, const Trajectory& trajectory, const Problem& problem,
                 char delimiter) {
    out << "step_index" << delimiter << "kind" << delimiter << "F_value" << delimiter
        << "gen_grad_norm" << delimiter << "n_on_spheres";
    for (int k = 0; k < problem.dim(); ++k)
        out << delimiter << 'x' << k;
    out << '\n';

    auto row = [&](std::size_t index, std::string_view kind, double f, double g, std::size_t on,
                   const Point& p) {
        out << index << delimiter << kind << delimiter << format_double(f) << delimiter
            << format_double(g) << delimiter << on;
        for (Eigen::Index k = 0; k < p.size(); ++k)
            out << delimiter << format_double(p(k));
        out << '\n';
    };
    const Certificate start = certify(problem, trajectory.start);
    row(0, "Start", trajectory.start_f, start.gen_grad_norm, start.signature.i_zero.size(),
        trajectory.start);
    for (std::size_t s = 0; s < trajectory.steps.size(); ++s) {
        const Step& st = trajectory.steps[s];
        row(s + 1, to_string(st.kind), st.f_value, st.gen_grad_norm, st.signature.i_zero.size(),
            st.point);
    }
}

void write_projection(std::ostream& out, const ProjectionTable& table, char delimiter) {
    out << "x" << delimiter << "y" << delimiter << "is_outlier" << delimiter << "label\n";
    for (const auto& r : table.rows)
        out << format_double(r.x) << delimiter << format_double(r.y) << delimiter
            << (r.is_outlier ? 1 : 0) << delimiter << r.label << '\n';
}

Json point_to_json(const Point& p) {
    Json arr = Json::array();
    for (Eigen::Index k = 0; k < p.size(); ++k)
        arr.push_back(p(k));
    return arr;
}

Point point_from_json(const Json& j) {
    Point p(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k)
        p(static_cast<Eigen::Index>(k)) = j.at(k).get<double>();
    return p;
}

namespace {

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> optional_from(const Json& j) {
    if (j.is_null())
        return std::nullopt;
    return j.get<double>();
}

} // namespace

Json to_json(const EtaReport& r) {
    Json j;
    j["eta"] = r.eta;
    j["center"] = point_to_json(r.center);
    j["F_value"] = r.f_value;
    j["sc_radius_sq"] = r.sc_radius_sq;
    j["converged"] = r.converged;
    j["gen_grad_norm"] = r.gen_grad_norm;
    j["n_out_sc"] = r.n_out_sc;
    j["n_out_com"] = r.n_out_com;
    j["mean_cost_sc"] = optional_json(r.mean_cost_sc);
    j["mean_cost_com"] = optional_json(r.mean_cost_com);
    j["outlier_ratio"] = optional_json(r.outlier_ratio);
    Json steps;
    for (int k = 0; k < kStepKinds; ++k)
        steps[std::string(to_string(static_cast<StepKind>(k)))] = r.step_counts[k];
    j["step_counts"] = steps;
    if (!r.timings.empty()) {
        Json t;
        for (const auto& [name, secs] : r.timings)
            t[name] = secs;
        j["timings"] = t;
    }
    return j;
}

EtaReport eta_report_from_json(const Json& j) {
    EtaReport r;
    r.eta = j.at("eta").get<double>();
    r.center = point_from_json(j.at("center"));
    r.f_value = j.at("F_value").get<double>();
    r.sc_radius_sq = j.at("sc_radius_sq").get<double>();
    r.converged = j.at("converged").get<bool>();
    r.gen_grad_norm = j.at("gen_grad_norm").get<double>();
    r.n_out_sc = j.at("n_out_sc").get<int>();
    r.n_out_com = j.at("n_out_com").get<int>();
    r.mean_cost_sc = optional_from(j.at("mean_cost_sc"));
    r.mean_cost_com = optional_from(j.at("mean_cost_com"));
    r.outlier_ratio = optional_from(j.at("outlier_ratio"));
    const Json& steps = j.at("step_counts");
    for (int k = 0; k < kStepKinds; ++k)
        r.step_counts[k] = steps.at(std::string(to_string(static_cast<StepKind>(k)))).get<int>();
    if (j.contains("timings"))
        for (const auto& [name, secs] : j.at("timings").items())
            r.timings[name] = secs.get<double>();
    return r;
}

Json to_json(const CenterReport& r) {
    Json j;
    j["labels"] = r.labels;
    j["mean"] = point_to_json(r.mean);
    j["projection_median"] = point_to_json(r.projection_median);
    Json sc = Json::object();
    for (const auto& [eta, c] : r.sc_centers)
        sc[sc_label(eta)] = point_to_json(c);
    j["sc_centers"] = sc;
    Json dist = Json::array();
    for (const auto& a : r.labels) {
        Json row = Json::array();
        for (const auto& b : r.labels)
            row.push_back(r.pairwise_distances.at({a, b}));
        dist.push_back(row);
    }
    j["distances"] = dist;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
    out << text;
    if (!out)
        throw Error(ErrorKind::IoError, "write failed for '" + path + "'");
}

} // namespace sphclust
