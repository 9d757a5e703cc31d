#include "pdm/operators.hpp"

#include <cmath>
#include <vector>

#include "pdm/error.hpp"

namespace pdm {

namespace {

using Trip = Eigen::Triplet<cplx>;
const cplx I(0.0, 1.0);

CVec d1(const GridPtr& g, const CVec& v) { return diff_matrix(g, 1).m * v; }

void check_grids(std::initializer_list<const SampledFunction*> fs)
{
    const SampledFunction* first = *fs.begin();
    for (const SampledFunction* f : fs)
        require_same_grid(*first, *f);
}

}  // namespace

SpMat dirichlet_diag(const CVec& v)
{
    const Eigen::Index n = v.size();
    std::vector<Trip> t;
    t.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 1; i < n - 1; ++i)
        t.emplace_back(i, i, v[i]);
    SpMat D(n, n);
    D.setFromTriplets(t.begin(), t.end());
    return D;
}

SpMat full_diag(const CVec& v)
{
    const Eigen::Index n = v.size();
    std::vector<Trip> t;
    t.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        t.emplace_back(i, i, v[i]);
    SpMat D(n, n);
    D.setFromTriplets(t.begin(), t.end());
    return D;
}

OperatorCoefficients coefficients(const SampledFunction& U, const SampledFunction& a,
                                  const SampledFunction& F, const SampledFunction& G)
{
    check_grids({&U, &a, &F, &G});
    const GridPtr& g = U.grid;
    const auto u = U.values.array();
    const auto av = a.values.array();
    const CVec Up = d1(g, U.values);
    const CVec GmA = G.values - a.values;
    const CVec UGmA_p = d1(g, (u * GmA.array()).matrix());
    const CVec UF_p = d1(g, (u * F.values.array()).matrix());
    const CVec Ua_p = d1(g, (u * av).matrix());

    OperatorCoefficients c;
    c.K = {g, (u * Up.array() + I * u * GmA.array()).matrix()};
    c.L = {g, (F.values.array().square() + GmA.array().square() - I * UGmA_p.array() - UF_p.array()).matrix()};
    c.M = {g, (u * Up.array() - I * u * av).matrix()};
    c.N = {g, (av.square() + I * Ua_p.array()).matrix()};
    return c;
}

OperatorMatrix build_H0(const SampledFunction& U, const SampledFunction& V)
{
    require_same_grid(U, V);
    const GridPtr& g = U.grid;
    const auto n = static_cast<Eigen::Index>(g->n);
    const double h2 = g->h * g->h;
    // conservative form: U² sampled at half points as the neighbour average
    std::vector<Trip> t;
    t.reserve(static_cast<std::size_t>(3 * n));
    for (Eigen::Index i = 1; i < n - 1; ++i) {
        const double um = 0.5 * (std::norm(U.values[i - 1]) + std::norm(U.values[i]));
        const double up = 0.5 * (std::norm(U.values[i]) + std::norm(U.values[i + 1]));
        t.emplace_back(i, i - 1, -um / h2);
        t.emplace_back(i, i, (um + up) / h2 + V.values[i]);
        t.emplace_back(i, i + 1, -up / h2);
    }
    OperatorMatrix H{g, SpMat(n, n)};
    H.m.setFromTriplets(t.begin(), t.end());
    return H;
}

OperatorMatrix build_modified_H(const SampledFunction& U, const SampledFunction& a, const SampledFunction& V)
{
    check_grids({&U, &a, &V});
    const GridPtr& g = U.grid;
    const CVec zero = CVec::Zero(U.values.size());
    OperatorCoefficients c = coefficients(U, a, SampledFunction{g, zero}, SampledFunction{g, zero});
    const SpMat D1 = dirichlet_diff(*g, 1);
    const SpMat D2 = dirichlet_diff(*g, 2);
    const CVec U2 = U.values.array().square().matrix();
    SpMat H = -SpMat(full_diag(U2) * D2) - 2.0 * SpMat(full_diag(c.M.values) * D1) + dirichlet_diag(c.N.values + V.values);
    return {g, H};
}

std::pair<OperatorMatrix, OperatorMatrix> build_zeta(const SampledFunction& U, const SampledFunction& F,
                                                     const SampledFunction& G, const SampledFunction& a,
                                                     ZetaDagger variant)
{
    check_grids({&U, &F, &G, &a});
    const GridPtr& g = U.grid;
    const SpMat D1 = dirichlet_diff(*g, 1);
    const CVec W = F.values + I * G.values;
    SpMat Z = SpMat(full_diag(U.values) * D1) + dirichlet_diag(W - I * a.values);
    SpMat Zd;
    if (variant == ZetaDagger::ConjugateTranspose) {
        Zd = SpMat(Z.adjoint());
    } else {
        Zd = -SpMat(D1 * full_diag(U.values)) + dirichlet_diag(W.conjugate() + I * a.values);
    }
    return {OperatorMatrix{g, Z}, OperatorMatrix{g, Zd}};
}

OperatorMatrix build_eta_plus(const SampledFunction& U, const SampledFunction& F, const SampledFunction& G,
                              const SampledFunction& a, EtaPlusMode mode, ZetaDagger variant)
{
    check_grids({&U, &F, &G, &a});
    const GridPtr& g = U.grid;
    if (mode == EtaPlusMode::Product) {
        auto [Z, Zd] = build_zeta(U, F, G, a, variant);
        return {g, SpMat(Zd.m * Z.m)};
    }
    OperatorCoefficients c = coefficients(U, a, F, G);
    const SpMat D1 = dirichlet_diff(*g, 1);
    const SpMat D2 = dirichlet_diff(*g, 2);
    const CVec U2 = U.values.array().square().matrix();
    SpMat E = -SpMat(full_diag(U2) * D2) - 2.0 * SpMat(full_diag(c.K.values) * D1) + dirichlet_diag(c.L.values);
    return {g, E};
}

std::pair<OperatorMatrix, OperatorMatrix> build_eta_minus(const SampledFunction& U, const SampledFunction& f,
                                                          const SampledFunction& g_fn, const SampledFunction& a,
                                                          bool check_f, double f_tol)
{
    check_grids({&U, &f, &g_fn, &a});
    const GridPtr& g = U.grid;
    if (check_f) {
        const CVec half_Up = 0.5 * d1(g, U.values);
        const double gap = (f.values - half_Up).cwiseAbs().maxCoeff();
        if (gap > f_tol)
            throw Error(ErrorKind::Inconsistent,
                        "anti-Hermiticity requires f = U'/2; max |f - U'/2| = " + std::to_string(gap));
    }
    const SpMat D1 = dirichlet_diff(*g, 1);
    const CVec w = f.values + I * g_fn.values;
    SpMat E = SpMat(full_diag(U.values) * D1) + dirichlet_diag(w - I * a.values);
    SpMat Ed = -SpMat(D1 * full_diag(U.values)) + dirichlet_diag(w.conjugate() + I * a.values);
    return {OperatorMatrix{g, E}, OperatorMatrix{g, Ed}};
}

OperatorMatrix build_eta_exp_parity(const SampledFunction& alpha, const GridPtr& g)
{
    if (!same_grid(alpha.grid, g))
        throw Error(ErrorKind::GridMismatch, "alpha is not sampled on this grid");
    if (!g->symmetric)
        throw Error(ErrorKind::GridNotSymmetric, "exp(-i alpha) P needs a symmetric grid");
    const Eigen::Index n = alpha.values.size();
    const RVec al = alpha.values.real();
    const double scale = std::max(1.0, al.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::fabs(al[i] + al[n - 1 - i]) > 1e-10 * scale)
            throw Error(ErrorKind::ParityViolation, "alpha must be odd; the gauge needs a(x) and U(x) even");
    CVec phase(n);
    for (Eigen::Index i = 0; i < n; ++i)
        phase[i] = std::exp(-I * al[i]);
    return {g, SpMat(full_diag(phase) * parity_matrix(g).m)};
}

CVec apply_tau(const SampledFunction& alpha, const CVec& v)
{
    if (alpha.values.size() != v.size())
        throw Error(ErrorKind::GridMismatch, "tau: vector length does not match alpha");
    CVec out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out[i] = std::conj(std::exp(I * alpha.values[i].real()) * v[i]);
    return out;
}

OperatorMatrix build_h_her(const SampledFunction& rho, const OperatorMatrix& H)
{
    if (!same_grid(rho.grid, H.grid))
        throw Error(ErrorKind::GridMismatch, "rho and H live on different grids");
    CVec inv(rho.values.size());
    for (Eigen::Index i = 0; i < inv.size(); ++i) {
        if (std::abs(rho.values[i]) == 0.0 || !std::isfinite(std::abs(rho.values[i])))
            throw Error(ErrorKind::ZeroCrossing, "rho vanishes on the grid");
        inv[i] = 1.0 / rho.values[i];
    }
    return {H.grid, SpMat(full_diag(rho.values) * H.m * full_diag(inv))};
}

OperatorMatrix adjoint(const OperatorMatrix& O) { return {O.grid, SpMat(O.m.adjoint())}; }

OperatorMatrix identity_operator(const GridPtr& g)
{
    const auto n = static_cast<Eigen::Index>(g->n);
    SpMat Id(n, n);
    Id.setIdentity();
    return {g, Id};
}

OperatorBundle build_bundle(const ModelSpec& spec, const GridPtr& g)
{
    const SampledFunction U = sample_U(spec, g);
    const SampledFunction a = sample_expr(spec.a, g);
    const SampledFunction F = scenario_F(spec, g);
    const SampledFunction G = sample_expr(spec.G, g);
    const SampledFunction f = f_from_U(spec, g);
    const SampledFunction gg = sample_expr(spec.g, g);

    OperatorBundle b;
    const SampledFunction Vp = potential_V_plus(F, G, U, spec.epsilon);
    const SampledFunction Vm = potential_V_minus(f, gg, U, spec.gamma);
    b.H = build_modified_H(U, a, Vp);
    b.H_dag = adjoint(b.H);
    b.H_minus = build_modified_H(U, a, Vm);
    std::tie(b.zeta, b.zeta_dag) = build_zeta(U, F, G, a);
    b.eta_plus = OperatorMatrix{g, SpMat(b.zeta_dag.m * b.zeta.m)};
    std::tie(b.eta_minus, b.eta_minus_dag) = build_eta_minus(U, f, gg, a);

    if (g->symmetric) {
        b.alpha = gauge_phase_alpha(spec, g);
    } else {
        b.alpha = SampledFunction{g, CVec::Zero(static_cast<Eigen::Index>(g->n))};
    }
    CVec rho(b.alpha.values.size());
    for (Eigen::Index i = 0; i < rho.size(); ++i)
        rho[i] = std::exp(-0.5 * I * b.alpha.values[i].real());
    b.rho = SampledFunction{g, rho};
    b.h_her = build_h_her(b.rho, b.H);
    b.eta_exp_parity = OperatorMatrix{g, SpMat(0, 0)};
    if (g->symmetric) {
        try {
            b.eta_exp_parity = build_eta_exp_parity(b.alpha, g);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ParityViolation)
                throw;
        }
    }
    return b;
}

}  // namespace pdm
