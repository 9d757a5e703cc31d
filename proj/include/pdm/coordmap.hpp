#pragma once

#include <functional>
#include <vector>

#include "pdm/expr.hpp"
#include "pdm/grid.hpp"
#include "pdm/report.hpp"

namespace pdm {

enum class Branch { Plus, Minus };

const char* branch_name(Branch b);

struct CoordinateMap {
    GridPtr grid_x;
    SampledFunction R;
    SampledFunction S;
    SampledFunction xi;
    SampledFunction U_modified;
    SampledFunction Z;
    SampledFunction sigma;
    Branch branch = Branch::Plus;
};

// Monotone piecewise-cubic interpolant through (x_i, y_i); x must be strictly increasing.
class MonotoneInterp {
public:
    MonotoneInterp(std::vector<double> x, std::vector<double> y);
    double operator()(double x) const;
    double front() const { return lo_; }
    double back() const { return hi_; }

private:
    std::function<double(double)> f_;
    double lo_ = 0.0;
    double hi_ = 0.0;
};

SampledFunction R_from_F(const SampledFunction& F, const SampledFunction& U, double delta);

struct MappedF {
    SampledFunction f;      // S·F
    SampledFunction f_log;  // F + U (ln √R)'
    double gap = 0.0;       // max |f - f_log|
};
MappedF map_f(const SampledFunction& F, const SampledFunction& U, const SampledFunction& R);

SampledFunction xi_from_R(const SampledFunction& R);
SampledFunction modified_mass(const SampledFunction& U, const SampledFunction& R);

// Values y(x_i) re-tabulated onto a uniform grid in the monotone coordinate s(x_i).
struct Retabulated {
    GridPtr grid;  // uniform in s
    std::vector<RVec> columns;
};
Retabulated retabulate(const RVec& s, const std::vector<RVec>& ys, std::size_t n);

struct FTransformReport {
    ResidualReport residual;  // f(ξ) against the ξ-re-tabulated (1/2) d𝓤/dx
    double literal_gap = 0.0;  // max |S·F_input - (1/2) d𝓤/dξ|, informational
    double f_scale = 0.0;
};
// R from F by the exponential formula, then G := R, F̂ := (G/2)(U/G)', f := S·F̂,
// compared with (1/2) d𝓤/dx evaluated through a uniform ξ grid.
FTransformReport check_f_transform(const SampledFunction& U, const SampledFunction& F, double delta);

// Max error of ξ ↦ x ↦ ξ through the two monotone interpolants, sampled
// at the midpoints of a uniform ξ grid.
double xi_roundtrip_error(const SampledFunction& xi);

SampledFunction sigma_fn(const SampledFunction& U, double lambda1, double lambda2);
// Anchored at x0 even when x0 lies off the grid; the gap is integrated from U_expr.
SampledFunction sigma_fn(const Expression& U_expr, const GridPtr& g, double lambda1, double lambda2, double x0 = 0.0);

SampledFunction R_closed_form(const SampledFunction& sigma, Branch branch, double margin = 0.25);
ResidualReport ode_residual_4_18(const SampledFunction& R, const SampledFunction& U,
                                 std::size_t band = kInteriorBand);
SampledFunction xi_closed_form(const SampledFunction& sigma, Branch branch, double c, double margin = 0.25);

double chi_of_R(double R);

CoordinateMap build_coordinate_map(const SampledFunction& U, const SampledFunction& F, double delta);

}  // namespace pdm
