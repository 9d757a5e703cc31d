#pragma once

#include <optional>

#include "pdm/expr.hpp"
#include "pdm/grid.hpp"

namespace pdm {

// Generating data of one scenario. A(x) = a(x) is real and b = 0.
struct ModelSpec {
    Expression U = parse_expr("1");
    Expression a = parse_expr("0");
    Expression G = parse_expr("1");
    Expression g = parse_expr("0");
    // When set, F is taken from this expression instead of F = (G/2)(U/G)'.
    std::optional<Expression> F;
    double epsilon = 0.0;
    double gamma = 0.0;
    double delta = 1.0;
    double lambda1 = 1.0;
    double lambda2 = 0.0;
};

struct PotentialPair {
    SampledFunction V_plus;
    SampledFunction V_minus;
};

SampledFunction sample_expr(const Expression& e, const GridPtr& g);

SampledFunction sample_U(const ModelSpec& spec, const GridPtr& g);
SampledFunction gauge_phase_alpha(const ModelSpec& spec, const GridPtr& g);
SampledFunction F_from_G(const ModelSpec& spec, const GridPtr& g);
SampledFunction f_from_U(const ModelSpec& spec, const GridPtr& g);

// F as the scenario defines it: the explicit override or F_from_G.
SampledFunction scenario_F(const ModelSpec& spec, const GridPtr& g);

SampledFunction potential_V_plus(const SampledFunction& F, const SampledFunction& G,
                                 const SampledFunction& U, double epsilon);
SampledFunction potential_V_minus(const SampledFunction& f, const SampledFunction& g_fn,
                                  const SampledFunction& U, double gamma);
PotentialPair potentials(const ModelSpec& spec, const GridPtr& g);

// Max interior |lhs - rhs| of the null-derivative equation linking F, G, U.
// Derivatives nest three deep, so the default band skips every row whose
// stencil reaches a one-sided end formula.
double residual_eq13(const SampledFunction& F, const SampledFunction& G, const SampledFunction& U,
                     std::size_t band = 3);

SampledFunction kernel_eigenfunction(const SampledFunction& F, const SampledFunction& G,
                                     const SampledFunction& a, const SampledFunction& U);

// Discrete L2 norm by trapezoid quadrature.
double l2_norm(const SampledFunction& f);

}  // namespace pdm
