#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "crackle/census.hpp"

namespace crackle {

using ojson = nlohmann::ordered_json;

// %.17g, with inf/-inf/nan spelled out.
std::string format_double(double v);

// JSON number, or the strings "inf"/"-inf"/"nan" for non-finite values.
ojson json_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
    std::string str() const;  // header row, LF line endings
};

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

ojson to_json(const ScalingSolution& s);
ojson to_json(const PoissonFit& f);
ojson to_json(const CensusReport& r);

// replication, n, k, count, R_kn, seed
CsvTable census_counts_csv(const CensusReport& r);
// x, y, series
CsvTable census_plot_csv(const CensusReport& r);

}  // namespace crackle
