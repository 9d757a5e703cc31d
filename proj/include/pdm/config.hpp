#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pdm/coordmap.hpp"
#include "pdm/model.hpp"

namespace pdm {

// Suite names accepted in a config, in report order.
const std::vector<std::string>& known_suites();
// Tolerance keys with their defaults.
const std::map<std::string, double>& default_tolerances();

struct GridConfig {
    double x_min = -4.0;
    double x_max = 4.0;
    std::size_t n = 2001;
};

struct SpectrumConfig {
    std::vector<double> expected;  // compared against the lowest eigenvalues by real part
    bool pairing = true;           // also check the conjugate-pair defect
};

enum class EtaChoice { Plus, Identity, ExpParity };

struct ConservationConfig {
    std::optional<GridConfig> grid;  // defaults to the model grid
    std::string psi1_re = "exp(-x^2/2)", psi1_im = "0";
    std::string psi2_re = "exp(-(x-0.5)^2/2)", psi2_im = "0";
    double dt = 1e-3;
    std::size_t steps = 1000;
    EtaChoice eta = EtaChoice::Plus;
};

struct OrthogonalityConfig {
    std::size_t count = 2;  // lowest eigenpairs checked pairwise
    bool parity_flip = false;
};

struct CoordmapConfig {
    std::string F = "x";
    double delta = 1.0;
    std::size_t n = 4001;
};

struct BacklundConfig {
    bool configured = false;  // the closed-form checks of the coordmap suite need this domain
    GridConfig grid{4.5, 12.0, 4001};
    Branch branch = Branch::Minus;
    std::vector<double> lambdas{1.0, 1.0, 1.0};
};

struct OutputConfig {
    std::string format = "json";
    std::string path;  // empty: standard output
};

struct RunConfig {
    std::string name;
    std::map<std::string, std::string> model_text;  // expression keys as written
    ModelSpec model;
    GridConfig grid;
    std::vector<std::string> suites;
    std::map<std::string, double> tolerances;
    OutputConfig output;
    SpectrumConfig spectrum;
    ConservationConfig conservation;
    OrthogonalityConfig orthogonality;
    CoordmapConfig coordmap;
    BacklundConfig backlund;

    double tol(const std::string& key) const;
};

// Throws Error(Config) with the offending key path, e.g. "model.U".
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// "key=value" from the command line; the key must be a known tolerance.
void apply_tolerance_override(RunConfig& cfg, const std::string& assignment);
// Replaces the configured suite list; each name must be known.
void select_suites(RunConfig& cfg, const std::vector<std::string>& names);

}  // namespace pdm
