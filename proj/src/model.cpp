#include "pdm/model.hpp"

#include <cmath>

#include "pdm/error.hpp"

namespace pdm {

namespace {

RVec real_values(const SampledFunction& f) { return f.values.real(); }

}  // namespace

SampledFunction sample_expr(const Expression& e, const GridPtr& g)
{
    CVec v(static_cast<Eigen::Index>(g->n));
    for (std::size_t i = 0; i < g->n; ++i)
        v[static_cast<Eigen::Index>(i)] = eval_expr(e, g->points[i]);
    return SampledFunction{g, v};
}

SampledFunction sample_U(const ModelSpec& spec, const GridPtr& g)
{
    SampledFunction U = sample_expr(spec.U, g);
    for (std::size_t i = 0; i < g->n; ++i)
        if (!(U[i].real() > 0.0))
            throw Error(ErrorKind::NonPositive,
                        "U(x) must be positive; U(" + std::to_string(g->points[i]) + ") = " + std::to_string(U[i].real()));
    return U;
}

SampledFunction gauge_phase_alpha(const ModelSpec& spec, const GridPtr& g)
{
    if (!g->symmetric)
        throw Error(ErrorKind::GridNotSymmetric, "gauge phase is anchored at x = 0 on a symmetric grid");
    SampledFunction U = sample_U(spec, g);
    SampledFunction a = sample_expr(spec.a, g);
    SampledFunction integrand{g, (a.values.array() / U.values.array()).matrix()};
    SampledFunction alpha = cumulative_integral(integrand, 0.0);
    alpha.values = (-2.0 * alpha.values.real()).cast<cplx>();
    return alpha;
}

SampledFunction F_from_G(const ModelSpec& spec, const GridPtr& g)
{
    SampledFunction U = sample_U(spec, g);
    SampledFunction G = sample_expr(spec.G, g);
    for (std::size_t i = 0; i < g->n; ++i)
        if (G[i].real() == 0.0)
            throw Error(ErrorKind::ZeroCrossing, "G vanishes at x = " + std::to_string(g->points[i]));
    for (std::size_t i = 0; i + 1 < g->n; ++i)
        if (G[i].real() * G[i + 1].real() < 0.0)
            throw Error(ErrorKind::ZeroCrossing, "G changes sign near x = " + std::to_string(g->points[i]));
    RVec Up = real_values(derivative(U));
    RVec Gp = real_values(derivative(G));
    RVec F = 0.5 * Up.array() - U.real().array() * Gp.array() / (2.0 * G.real().array());
    return sample_real(g, F);
}

SampledFunction f_from_U(const ModelSpec& spec, const GridPtr& g)
{
    SampledFunction U = sample_U(spec, g);
    RVec f = 0.5 * real_values(derivative(U));
    return sample_real(g, f);
}

SampledFunction scenario_F(const ModelSpec& spec, const GridPtr& g)
{
    if (spec.F)
        return sample_expr(*spec.F, g);
    return F_from_G(spec, g);
}

SampledFunction potential_V_plus(const SampledFunction& F, const SampledFunction& G,
                                 const SampledFunction& U, double epsilon)
{
    require_same_grid(F, G);
    require_same_grid(F, U);
    const auto& g = F.grid;
    CVec UF = (U.values.array() * F.values.array()).matrix();
    CVec dUF = derivative(SampledFunction{g, UF}).values;
    CVec Gp = derivative(G).values;
    const cplx I(0.0, 1.0);
    CVec V = (F.values.array().square() - G.values.array().square() - dUF.array()
              - 2.0 * I * U.values.array() * Gp.array() + epsilon)
                 .matrix();
    return SampledFunction{g, V};
}

SampledFunction potential_V_minus(const SampledFunction& f, const SampledFunction& g_fn,
                                  const SampledFunction& U, double gamma)
{
    require_same_grid(f, g_fn);
    require_same_grid(f, U);
    const cplx I(0.0, 1.0);
    CVec w = (f.values.array() + I * g_fn.values.array()).matrix();
    CVec Uw = (U.values.array() * w.array()).matrix();
    CVec dUw = derivative(SampledFunction{f.grid, Uw}).values;
    CVec V = (w.array().square() - dUw.array() + gamma).matrix();
    return SampledFunction{f.grid, V};
}

PotentialPair potentials(const ModelSpec& spec, const GridPtr& g)
{
    SampledFunction U = sample_U(spec, g);
    SampledFunction F = scenario_F(spec, g);
    SampledFunction G = sample_expr(spec.G, g);
    SampledFunction f = f_from_U(spec, g);
    SampledFunction gg = sample_expr(spec.g, g);
    return {potential_V_plus(F, G, U, spec.epsilon), potential_V_minus(f, gg, U, spec.gamma)};
}

double residual_eq13(const SampledFunction& F, const SampledFunction& G, const SampledFunction& U,
                     std::size_t band)
{
    require_same_grid(F, G);
    require_same_grid(F, U);
    const GridPtr& g = F.grid;
    auto d = [&](const RVec& v) { return real_values(derivative(sample_real(g, v))); };

    const RVec f = F.real(), Gv = G.real(), Uv = U.real();
    const RVec Gp = d(Gv);
    const double gscale = std::max(1.0, Gv.cwiseAbs().maxCoeff());
    for (std::size_t i = band; i + band < g->n; ++i)
        if (std::fabs(Gp[static_cast<Eigen::Index>(i)]) <= 1e-12 * gscale)
            throw Error(ErrorKind::ZeroCrossing, "G' vanishes at x = " + std::to_string(g->points[i]));

    const RVec Fp = d(f);
    const RVec Up = d(Uv);
    const RVec Upp = d(Up);
    const RVec Gpp = d(Gp);
    const RVec UF = Uv.cwiseProduct(f);
    const RVec UFp = d(UF);
    const RVec UFpp = d(UFp);
    const RVec U2Gpp_p = d(Uv.cwiseProduct(Uv).cwiseProduct(Gpp));
    const RVec UUpp_p = d(Uv.cwiseProduct(Upp));
    const RVec GU = Gv.cwiseQuotient(Uv);
    const RVec GUp = d(GU);
    const RVec GUpp = d(GUp);

    const auto a = [](const RVec& v) { return v.array(); };
    RVec lhs = a(f).square() - a(UFp);
    RVec rhs = (a(Gv) / a(Gp)) * (-a(f) * a(Fp) + 0.5 * a(UFpp))
               + (1.0 / a(Gp))
                     * (0.25 * a(U2Gpp_p) - 0.25 * a(Gv) * a(UUpp_p) + 0.25 * a(Up) * a(Uv) * a(GUpp)
                        + 0.5 * a(Up).square() * a(Uv) * a(GUp))
               - 0.25 * a(Upp) * a(Uv);
    double worst = 0.0;
    for (std::size_t i = band; i + band < g->n; ++i) {
        auto k = static_cast<Eigen::Index>(i);
        worst = std::max(worst, std::fabs(lhs[k] - rhs[k]));
    }
    return worst;
}

SampledFunction kernel_eigenfunction(const SampledFunction& F, const SampledFunction& G,
                                     const SampledFunction& a, const SampledFunction& U)
{
    require_same_grid(F, G);
    require_same_grid(F, a);
    require_same_grid(F, U);
    const GridPtr& g = F.grid;
    const double x0 = default_anchor(*g);
    CVec re = (F.values.real().array() / U.values.real().array()).cast<cplx>().matrix();
    CVec im = ((G.values.real() - a.values.real()).array() / U.values.real().array()).cast<cplx>().matrix();
    RVec I1 = cumulative_integral(SampledFunction{g, re}, x0).values.real();
    RVec I2 = cumulative_integral(SampledFunction{g, im}, x0).values.real();
    // shift the real exponent so the largest sample is O(1) before exponentiating
    const double top = (-I1).maxCoeff();
    const double bottom = (-I1).minCoeff();
    if (top - bottom > 700.0)
        throw Error(ErrorKind::Overflow, "kernel exponent spans more than 700");
    CVec psi(I1.size());
    for (Eigen::Index i = 0; i < psi.size(); ++i)
        psi[i] = std::exp(cplx(-I1[i] - top, -I2[i]));
    SampledFunction out{g, psi};
    const double nrm = l2_norm(out);
    out.values /= nrm;
    return out;
}

double l2_norm(const SampledFunction& f)
{
    CVec m2 = f.values.cwiseAbs2().cast<cplx>();
    return std::sqrt(integrate(SampledFunction{f.grid, m2}).real());
}

}  // namespace pdm
