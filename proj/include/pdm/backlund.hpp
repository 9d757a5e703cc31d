#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pdm/grid.hpp"
#include "pdm/report.hpp"

namespace pdm {

constexpr std::size_t kBacklundProbes = 64;

// One equation Y'' = χ(Y) φ(Y') of the constant-mass type (θ = 0 there).
struct OdeFamily {
    std::function<double(double)> chi;
    std::function<double(double)> phi;
    std::optional<std::function<double(double)>> chi_prime;
    std::function<double(double)> theta = [](double) { return 0.0; };
    std::string label;
};

struct PivotSolution {
    GridPtr x;
    SampledFunction R;
    SampledFunction Rp;
    SampledFunction Rpp;
};

// A family evaluated along the pivot: at pivot node i the transformed
// equation has independent variable X_i, solution Y_i and slope P_i = dY/dX.
struct BacklundStage {
    OdeFamily family;
    RVec X;
    RVec Y;
    RVec P;
    double lambda = 0.0;         // constant of the B̂ step that produced this stage
    double lambda_defect = 0.0;  // max |P̄ χ(Y) - λ| with P̄ from finite differences
};

struct BacklundChain {
    PivotSolution pivot;
    std::vector<BacklundStage> stages;  // stages[0] is the untransformed family
    std::vector<double> lambdas;
};

struct ClosureReport {
    ResidualReport summary;        // worst of the two product identities
    double product_defect = 0.0;   // max |p̄̄ R' χ(R) - 1|
    double slope_defect = 0.0;     // max |λ₂ p̄̄̄ χ(R) - R'|
    double pbb_defect = 0.0;       // max |p̄̄ - 1/(R' χ(R))|
    double x_defect = 0.0;         // max |x̄̄̄ - x|
    double R_defect = 0.0;         // max |R̄̄̄ - R|
    double x_affine_defect = 0.0;  // same after the best affine fit
    double R_affine_defect = 0.0;
};

struct FamilyCount {
    std::size_t distinct = 0;
    bool repeated = false;  // a generated family matched an earlier one
    std::vector<std::string> labels;
};

double chi_cm(double R);
double chi_cm_prime(double R);
OdeFamily constant_mass_family();

PivotSolution make_pivot(const SampledFunction& R);
BacklundStage initial_stage(const OdeFamily& fam, const PivotSolution& pivot);

// φ♯(q) = -q³ φ(1/q); χ is kept as the same function.
OdeFamily s_transform(const OdeFamily& fam);
// Roles of X and Y exchanged along the pivot.
BacklundStage s_transform(const BacklundStage& st, const PivotSolution& pivot);
BacklundStage b_transform(const BacklundStage& st, const PivotSolution& pivot, double lambda);

ResidualReport stage_residual(const BacklundStage& st, const PivotSolution& pivot,
                              std::size_t band = kInteriorBand);

BacklundChain build_chain(const OdeFamily& fam, const PivotSolution& pivot, const std::vector<double>& lambdas);
ClosureReport closure_check(const BacklundChain& chain);

// Indices of the probe nodes: equispaced on the pivot, skipping a band at each end.
std::vector<std::size_t> probe_nodes(std::size_t n, std::size_t count = kBacklundProbes,
                                     std::size_t band = kInteriorBand);

// Relative gap between the (χ, φ) pairs of two stages at the probe nodes.
double family_defect(const BacklundStage& a, const BacklundStage& b, const std::vector<std::size_t>& nodes);

// max |φ(p) - (φ♯)♯(p)| / max |φ(p)| at the pivot slopes.
double s_involution_defect(const OdeFamily& fam, const PivotSolution& pivot);

// Ŝ⁻¹∘B̂∘Ŝ against B̂.
ResidualReport commute_check(const OdeFamily& fam, const PivotSolution& pivot, double lambda = 1.0);

// Breadth-first closure of {fam} under B̂ and Ŝ, capped at max_families.
FamilyCount count_distinct_families(const OdeFamily& fam, const PivotSolution& pivot, double lambda = 1.0,
                                    std::size_t max_families = 12, double tol = 1e-6);

}  // namespace pdm
