#include "crackle/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "crackle/errors.hpp"

namespace crackle {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ojson json_double(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

void CsvTable::add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw StructuralError("CSV row width does not match header");
    rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw IoError("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

ojson to_json(const ScalingSolution& s) {
    ojson j;
    j["R_kn"] = json_double(s.R_kn);
    j["c_kn"] = json_double(s.c_kn);
    j["d_kn"] = json_double(s.d_kn);
    j["closed_form"] = json_double(s.closed_form);
    j["residual"] = json_double(s.residual);
    return j;
}

ojson to_json(const PoissonFit& f) {
    ojson j;
    j["lambda"] = json_double(f.lambda);
    j["chi_square"] = json_double(f.chi_square);
    j["dof"] = f.dof;
    j["bins"] = f.bins;
    j["p_value"] = json_double(f.p_value);
    j["tv_distance"] = json_double(f.tv_distance);
    return j;
}

ojson to_json(const CensusReport& r) {
    ojson j;
    j["statistic"] = statistic_name(r.config.statistic);
    j["regime"] = r.regime.to_string();
    ojson pts = ojson::array();
    for (const auto& p : r.points) {
        ojson e;
        e["n"] = json_double(p.n);
        e["r_n"] = json_double(p.r_n);
        e["scaling"] = to_json(p.scaling);
        e["replications"] = p.values.size();
        e["mean"] = json_double(p.mean);
        e["variance"] = json_double(p.variance);
        e["lambda"] = json_double(p.lambda);
        e["lambda_stderr"] = json_double(p.lambda_stderr);
        if (p.has_fit) e["fit_theory"] = to_json(p.fit_theory);
        if (p.fit_empirical.bins > 0) e["fit_empirical"] = to_json(p.fit_empirical);
        pts.push_back(std::move(e));
    }
    j["points"] = std::move(pts);
    return j;
}

CsvTable census_counts_csv(const CensusReport& r) {
    CsvTable t;
    t.header = {"replication", "n", "k", "count", "R_kn", "seed"};
    for (const auto& p : r.points)
        for (std::size_t i = 0; i < p.values.size(); ++i)
            t.add({std::to_string(i), format_double(p.n), std::to_string(r.config.k),
                   format_double(p.values[i]), format_double(p.scaling.R_kn), std::to_string(p.seeds[i])});
    return t;
}

CsvTable census_plot_csv(const CensusReport& r) {
    CsvTable t;
    t.header = {"x", "y", "series"};
    for (const auto& p : r.points) {
        t.add({format_double(p.n), format_double(p.mean), "empirical_mean"});
        if (std::isfinite(p.lambda)) t.add({format_double(p.n), format_double(p.lambda), "limit_lambda"});
    }
    return t;
}

}  // namespace crackle
