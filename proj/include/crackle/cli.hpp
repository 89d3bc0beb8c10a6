#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "crackle/census.hpp"
#include "crackle/errors.hpp"

namespace crackle {

constexpr const char* kToolVersion = "1.0.0";

struct CliConfig {
    ExperimentConfig exp;
    std::string constraint_graph = "path";  // gamma_iso target: path, cycle, star, complete
    std::string output_dir = "out";
    std::vector<double> t_grid{0.0, 0.25, 0.5, 0.75, 1.0};
    int annuli_k_max = 3;
    double delta = 2.0;
    double g = 1.0;
    int trials = 2000;
    int palm_direct = 2000;
    std::size_t palm_samples = 200000;
    std::size_t stable_terms = 100000;
    double scaling_C = 0.0;  // solve-scaling only; 0 uses the normalized constant
};

// "key = value" lines, '#' comments. Unknown or repeated keys are rejected with
// the line number; semantic checks (alpha > d, the n^s band, ...) run afterwards.
CliConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
CliConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const CliConfig& cfg);
void apply_setting(CliConfig& cfg, const std::string& key, const std::string& value);
void validate_config(const CliConfig& cfg);

// Ordered list of recognised keys.
const std::vector<std::string>& config_keys();

int exit_code_for(ErrorClass c);

// Usage errors exit with 2; see exit_code_for for the rest.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv);

}  // namespace crackle
