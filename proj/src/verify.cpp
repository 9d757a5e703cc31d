#include "pdm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/SparseLU>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "pdm/coordmap.hpp"
#include "pdm/error.hpp"

namespace pdm {

namespace {

const cplx I(0.0, 1.0);
constexpr double kEps = std::numeric_limits<double>::epsilon();

Eigen::Index rows_inside(const CMat& m, std::size_t band)
{
    return std::max<Eigen::Index>(0, m.rows() - 2 * static_cast<Eigen::Index>(band));
}

double interior_norm(const CMat& m, std::size_t band)
{
    const Eigen::Index k = rows_inside(m, band);
    if (k == 0)
        return 0.0;
    return m.middleRows(static_cast<Eigen::Index>(band), k).norm();
}

void require_dims(const OperatorMatrix& A, const OperatorMatrix& B)
{
    if (A.m.rows() != B.m.rows() || A.m.cols() != B.m.cols() || A.m.rows() != A.m.cols())
        throw Error(ErrorKind::GridMismatch, "operator dimensions differ");
    if (A.grid && B.grid && !same_grid(A.grid, B.grid))
        throw Error(ErrorKind::GridMismatch, "operators live on different grids");
}

ResidualReport make_report(const std::string& name, const CMat& AP, const CMat& BP, const CMat& P,
                           std::size_t band, double floor_scale, std::size_t n)
{
    const CMat diff = AP - BP;
    const double num = interior_norm(diff, band);
    const double den = std::max(interior_norm(AP, band), interior_norm(BP, band));
    const double pn = P.norm();
    ResidualReport r;
    r.name = name;
    r.grid_n = n;
    r.interior_band = band;
    r.absolute = pn > 0.0 ? num / pn : 0.0;
    r.relative = den > 0.0 ? num / den : (num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    r.roundoff_floor = den > 0.0 ? floor_scale * kEps * pn / den : 0.0;
    return r;
}

// Column norm of the adjoint equals the row-sum norm of the operator itself.
double max_col_sum(const SpMat& m) { return max_row_sum(SpMat(m.adjoint())); }

void check_R(const SampledFunction& R, bool allow_one)
{
    for (Eigen::Index i = 0; i < R.values.size(); ++i) {
        const double r = R.values[i].real();
        if (!(r > 0.0))
            throw Error(ErrorKind::SingularR, "R must be positive; R = " + std::to_string(r));
        if (!allow_one && std::fabs(r - 1.0) < 1e-9)
            throw Error(ErrorKind::SingularR, "R touches the excluded value 1");
    }
}

}  // namespace

double max_row_sum(const SpMat& m)
{
    double best = 0.0;
    for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
        double s = 0.0;
        for (SpMat::InnerIterator it(m, r); it; ++it)
            s += std::abs(it.value());
        best = std::max(best, s);
    }
    return best;
}

CMat probe_set(const Grid& g, std::size_t count, std::uint64_t seed)
{
    const auto n = static_cast<Eigen::Index>(g.n);
    const double L = g.x_max - g.x_min;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    CMat P(n, static_cast<Eigen::Index>(count));
    const double pi = std::acos(-1.0);
    for (std::size_t j = 0; j < count; ++j) {
        cplx c[5];
        double sgn[5];
        for (int m = 0; m < 5; ++m) {
            const double re = normal(rng);
            const double im = normal(rng);
            c[m] = cplx(re, im);
            sgn[m] = coin(rng) ? -1.0 : 1.0;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const double t = (g.points[static_cast<std::size_t>(i)] - g.x_min) / L;
            cplx s = 0.0;
            for (int m = 0; m < 5; ++m)
                s += c[m] * std::exp(I * (sgn[m] * pi * m * t));
            P(i, static_cast<Eigen::Index>(j)) = std::pow(std::sin(pi * t), 6) * s;
        }
    }
    return P;
}

ResidualReport identity_residual(const std::string& name, const OperatorMatrix& A, const OperatorMatrix& B,
                                 std::size_t band)
{
    require_dims(A, B);
    const GridPtr& g = A.grid;
    const CMat P = probe_set(*g);
    const CMat AP = A.m * P;
    const CMat BP = B.m * P;
    const double scale = 4.0 * (max_row_sum(A.m) + max_row_sum(B.m));
    return make_report(name, AP, BP, P, band, scale, g->n);
}

ResidualReport intertwining_residual(const OperatorMatrix& eta, const OperatorMatrix& H, std::size_t band)
{
    require_dims(eta, H);
    const GridPtr& g = H.grid;
    const CMat P = probe_set(*g);
    const SpMat Hd = H.m.adjoint();
    const CMat AP = eta.m * (H.m * P);
    const CMat BP = Hd * (eta.m * P);
    const double scale = 4.0 * max_row_sum(eta.m) * std::max(max_row_sum(H.m), max_col_sum(H.m));
    return make_report("intertwining", AP, BP, P, band, scale, g->n);
}

HermiticityReport hermiticity_class(const OperatorMatrix& O, double tol, std::size_t band)
{
    const CMat P = probe_set(*O.grid);
    const SpMat Od = O.m.adjoint();
    const CMat OP = O.m * P;
    const CMat OdP = Od * P;
    const double den = std::max(interior_norm(OP, band), interior_norm(OdP, band));
    HermiticityReport r;
    if (den == 0.0) {
        r.cls = HermClass::Hermitian;
        return r;
    }
    r.hermitian_defect = interior_norm(OP - OdP, band) / den;
    r.anti_hermitian_defect = interior_norm(OP + OdP, band) / den;
    r.defect = std::min(r.hermitian_defect, r.anti_hermitian_defect);
    if (r.defect > tol)
        r.cls = HermClass::Neither;
    else
        r.cls = r.hermitian_defect <= r.anti_hermitian_defect ? HermClass::Hermitian : HermClass::AntiHermitian;
    return r;
}

const char* herm_class_name(HermClass c)
{
    switch (c) {
    case HermClass::Hermitian:
        return "hermitian";
    case HermClass::AntiHermitian:
        return "anti_hermitian";
    case HermClass::Neither:
        return "neither";
    }
    return "neither";
}

ResidualReport tau_residual(const OperatorMatrix& H, const SampledFunction& alpha, std::size_t band)
{
    if (!same_grid(H.grid, alpha.grid))
        throw Error(ErrorKind::GridMismatch, "alpha and H live on different grids");
    const CMat P = probe_set(*H.grid);
    const SpMat Hd = H.m.adjoint();
    CMat AP(P.rows(), P.cols()), BP(P.rows(), P.cols());
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
        const CVec v = P.col(j);
        AP.col(j) = apply_tau(alpha, H.m * v);
        BP.col(j) = Hd * apply_tau(alpha, v);
    }
    const double scale = 4.0 * std::max(max_row_sum(H.m), max_col_sum(H.m));
    return make_report("tau_check", AP, BP, P, band, scale, H.grid->n);
}

double conjugate_pair_defect(const std::vector<cplx>& ev)
{
    // the set is compared with its own mirror image, so one direction suffices
    double worst = 0.0;
    for (const cplx& z : ev) {
        double best = std::numeric_limits<double>::infinity();
        const cplx zc = std::conj(z);
        for (const cplx& w : ev)
            best = std::min(best, std::abs(w - zc));
        worst = std::max(worst, best);
    }
    return worst;
}

SpectralReport spectrum(const OperatorMatrix& H, bool want_vectors, std::size_t cap)
{
    const Eigen::Index n = H.dim();
    if (n < 3)
        throw Error(ErrorKind::InvalidArgument, "spectrum needs at least one interior point");
    const Eigen::Index k = n - 2;
    if (static_cast<std::size_t>(n) > cap)
        throw Error(ErrorKind::InvalidArgument,
                    "matrix dimension " + std::to_string(n) + " exceeds the dense cap " + std::to_string(cap));
    CMat B = CMat(H.m).block(1, 1, k, k);

    const double scale = B.cwiseAbs().maxCoeff();
    const bool herm = (B - B.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * std::max(1.0, scale);

    std::vector<cplx> ev(static_cast<std::size_t>(k));
    CMat V;
    const char jobz = want_vectors ? 'V' : 'N';
    if (herm) {
        CMat A = 0.5 * (B + B.adjoint());
        RVec w(k);
        CMat Z = want_vectors ? CMat(k, k) : CMat(1, 1);
        std::vector<lapack_int> support(static_cast<std::size_t>(2 * k));
        lapack_int found = 0;
        // zheevd returns wrong eigenvalues with vectors on the bundled OpenBLAS; MRRR does not
        lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, jobz, 'A', 'U', static_cast<lapack_int>(k), A.data(),
                                         static_cast<lapack_int>(k), 0.0, 0.0, 0, 0, 0.0, &found, w.data(),
                                         Z.data(), static_cast<lapack_int>(want_vectors ? k : 1), support.data());
        if (info != 0)
            throw Error(ErrorKind::Solver, "zheevr failed with info " + std::to_string(info));
        for (Eigen::Index i = 0; i < k; ++i)
            ev[static_cast<std::size_t>(i)] = w[i];
        if (want_vectors)
            V = Z;
    } else {
        CVec w(k);
        CMat vr = want_vectors ? CMat(k, k) : CMat(1, 1);
        lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', jobz, static_cast<lapack_int>(k), B.data(),
                                        static_cast<lapack_int>(k), w.data(), nullptr, 1, vr.data(),
                                        static_cast<lapack_int>(want_vectors ? k : 1));
        if (info != 0)
            throw Error(ErrorKind::Solver, "zgeev failed with info " + std::to_string(info));
        for (Eigen::Index i = 0; i < k; ++i)
            ev[static_cast<std::size_t>(i)] = w[i];
        if (want_vectors)
            V = vr;
    }

    std::vector<std::size_t> order(ev.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (ev[a].real() != ev[b].real())
            return ev[a].real() < ev[b].real();
        return ev[a].imag() < ev[b].imag();
    });

    SpectralReport rep;
    rep.eigenvalues.reserve(ev.size());
    for (std::size_t i : order) {
        rep.eigenvalues.push_back(ev[i]);
        rep.reality_max_imag = std::max(rep.reality_max_imag, std::fabs(ev[i].imag()));
    }
    rep.conjugate_pair_defect = conjugate_pair_defect(rep.eigenvalues);
    if (want_vectors) {
        rep.vectors = CMat::Zero(n, k);
        for (Eigen::Index j = 0; j < k; ++j)
            rep.vectors.block(1, j, k, 1) = V.col(static_cast<Eigen::Index>(order[static_cast<std::size_t>(j)]));
    }
    return rep;
}

SpectralReport lowest_eigenpairs(const OperatorMatrix& H, std::size_t count, double tol)
{
    const Eigen::Index n = H.dim();
    const Eigen::Index k = n - 2;
    if (count == 0 || static_cast<Eigen::Index>(count) > k)
        throw Error(ErrorKind::InvalidArgument, "requested more eigenpairs than interior points");
    const SpMat Hi = H.m.block(1, 1, k, k);
    CMat A = 0.5 * (CMat(Hi) + CMat(Hi).adjoint());
    const auto m = static_cast<lapack_int>(count);
    RVec w(k);
    CMat Z(k, static_cast<Eigen::Index>(count));
    std::vector<lapack_int> support(static_cast<std::size_t>(2 * count));
    lapack_int found = 0;
    lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', static_cast<lapack_int>(k), A.data(),
                                     static_cast<lapack_int>(k), 0.0, 0.0, 1, m, 0.0, &found, w.data(), Z.data(),
                                     static_cast<lapack_int>(k), support.data());
    if (info != 0 || found != m)
        throw Error(ErrorKind::Solver, "zheevr subset failed with info " + std::to_string(info));

    const double scale = max_row_sum(Hi);
    SpMat Id(k, k);
    Id.setIdentity();
    SpectralReport rep;
    rep.vectors = CMat::Zero(n, static_cast<Eigen::Index>(count));
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(count); ++j) {
        CVec v = Z.col(j).normalized();
        cplx sigma = v.dot(Hi * v);
        for (int it = 0; it < 30; ++it) {
            const double res = (Hi * v - sigma * v).norm();
            if (res <= tol * scale)
                break;
            Eigen::SparseMatrix<cplx> S(SpMat(Hi - sigma * Id));
            S.makeCompressed();
            Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu(S);
            if (lu.info() != Eigen::Success)
                break;  // shift hit an eigenvalue to working precision
            CVec y = lu.solve(v);
            if (lu.info() != Eigen::Success || !y.allFinite())
                break;
            v = y.normalized();
            sigma = v.dot(Hi * v);
        }
        rep.eigenvalues.push_back(sigma);
        rep.vectors.block(1, j, k, 1) = v;
        rep.reality_max_imag = std::max(rep.reality_max_imag, std::fabs(sigma.imag()));
    }
    rep.conjugate_pair_defect = conjugate_pair_defect(rep.eigenvalues);
    return rep;
}

cplx eta_orthogonality(const SampledFunction& psi1, const SampledFunction& psi2, const OperatorMatrix& eta,
                       cplx E1, cplx E2, bool parity_flip)
{
    require_same_grid(psi1, psi2);
    if (!same_grid(psi1.grid, eta.grid))
        throw Error(ErrorKind::GridMismatch, "eta and the states live on different grids");
    CVec left = psi2.values;
    if (parity_flip)
        left = parity_matrix(psi1.grid).m * left;
    const CVec eta_psi = eta.m * psi1.values;
    const CVec integrand = left.conjugate().cwiseProduct(eta_psi);
    return (E1 - std::conj(E2)) * integrate(SampledFunction{psi1.grid, integrand});
}

double ContinuityRecord::relative_drift() const
{
    if (rho_eta_integral.empty())
        return 0.0;
    const cplx ref = rho_eta_integral.front();
    double worst = 0.0;
    for (const cplx& v : rho_eta_integral)
        worst = std::max(worst, std::abs(v - ref));
    const double s = std::abs(ref);
    return s > 0.0 ? worst / s : worst;
}

ContinuityRecord evolve_conservation(const OperatorMatrix& H, const OperatorMatrix& eta,
                                     const SampledFunction& psi1_0, const SampledFunction& psi2_0, double dt,
                                     std::size_t steps)
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw Error(ErrorKind::InvalidArgument, "time step must be positive");
    require_dims(H, eta);
    require_same_grid(psi1_0, psi2_0);
    if (!same_grid(H.grid, psi1_0.grid))
        throw Error(ErrorKind::GridMismatch, "states and H live on different grids");

    const Eigen::Index n = H.dim();
    const Eigen::Index k = n - 2;
    const SpMat Hi = H.m.block(1, 1, k, k);
    SpMat Id(k, k);
    Id.setIdentity();
    const cplx c = 0.5 * I * dt;
    SpMat lhs = Id + c * Hi;
    const SpMat rhs = Id - c * Hi;
    Eigen::SparseMatrix<cplx> lhs_c(lhs);
    lhs_c.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
    lu.compute(lhs_c);
    if (lu.info() != Eigen::Success)
        throw Error(ErrorKind::Solver, "Crank-Nicolson factorization failed");

    CVec p1 = CVec::Zero(n), p2 = CVec::Zero(n);
    p1.segment(1, k) = psi1_0.values.segment(1, k);
    p2.segment(1, k) = psi2_0.values.segment(1, k);

    const GridPtr& g = H.grid;
    auto record = [&](ContinuityRecord& r, double t) {
        const CVec integrand = p2.conjugate().cwiseProduct(eta.m * p1);
        r.times.push_back(t);
        r.rho_eta_integral.push_back(integrate(SampledFunction{g, integrand}));
    };

    ContinuityRecord rec;
    rec.times.reserve(steps + 1);
    rec.rho_eta_integral.reserve(steps + 1);
    record(rec, 0.0);
    for (std::size_t s = 1; s <= steps; ++s) {
        CVec b1 = rhs * p1.segment(1, k);
        CVec b2 = rhs * p2.segment(1, k);
        p1.segment(1, k) = lu.solve(b1);
        p2.segment(1, k) = lu.solve(b2);
        if (lu.info() != Eigen::Success)
            throw Error(ErrorKind::Solver, "Crank-Nicolson solve failed");
        record(rec, static_cast<double>(s) * dt);
    }
    return rec;
}

ResidualReport factorization_residual(const OperatorMatrix& eta_plus, const OperatorMatrix& eta_minus,
                                      const OperatorMatrix& eta_minus_dag, const SampledFunction& U,
                                      const SampledFunction& R)
{
    require_same_grid(U, R);
    check_R(R, false);
    const GridPtr& g = U.grid;
    const CVec Rp = derivative(R).values;
    const CVec c = (0.5 * U.values.array() * Rp.array() / R.values.array()).matrix();
    const SpMat C = dirichlet_diag(c);
    const SpMat B = (eta_minus_dag.m - C) * (eta_minus.m - C);
    ResidualReport r = identity_residual("factorization", eta_plus, OperatorMatrix{g, B});
    return r;
}

ResidualReport decomposition_residual(const OperatorMatrix& eta_plus, const OperatorMatrix& eta_minus,
                                      const OperatorMatrix& eta_minus_dag, const SampledFunction& U,
                                      const SampledFunction& R)
{
    require_same_grid(U, R);
    check_R(R, false);
    const GridPtr& g = U.grid;
    const auto u = U.values.array();
    const auto r = R.values.array();
    const CVec Up = derivative(U).values;
    const CVec Rp = derivative(R).values;
    const CVec Rpp = derivative(R, 2).values;
    const auto rp = Rp.array();
    const CVec scalar = (u.square() * Rpp.array() / (2.0 * r) + u * Up.array() * rp / r
                         - ((r - 3.0) / (r - 1.0)) * (u * rp / (2.0 * r)).square())
                            .matrix();
    const SpMat B = SpMat(eta_minus_dag.m * eta_minus.m) + dirichlet_diag(scalar);
    return identity_residual("decomposition", eta_plus, OperatorMatrix{g, B});
}

ResidualReport similarity_residual(const OperatorMatrix& zeta, const OperatorMatrix& eta_minus,
                                   const SampledFunction& R)
{
    check_R(R, true);
    const GridPtr& g = R.grid;
    const CVec sq = R.values.cwiseSqrt();
    const CVec isq = sq.cwiseInverse();
    const SpMat B = full_diag(sq) * eta_minus.m * full_diag(isq);
    return identity_residual("similarity", zeta, OperatorMatrix{g, B});
}

SimilarityPipeline build_similarity_pipeline(const ModelSpec& spec, const GridPtr& g)
{
    SimilarityPipeline p;
    p.U = sample_U(spec, g);
    p.G = sample_expr(spec.G, g);
    const SampledFunction a = sample_expr(spec.a, g);
    p.F = scenario_F(spec, g);
    p.R = R_from_F(p.F, p.U, spec.delta);
    p.f = map_f(p.F, p.U, p.R).f;
    auto [Z, Zd] = build_zeta(p.U, p.F, p.G, a);
    p.zeta = Z;
    p.eta_plus = OperatorMatrix{g, SpMat(Zd.m * Z.m)};
    // f = F/R is not U'/2 here, so the anti-Hermiticity check does not apply
    std::tie(p.eta_minus, p.eta_minus_dag) = build_eta_minus(p.U, p.f, p.G, a, false);
    return p;
}

std::vector<double> observed_orders(const std::vector<double>& residuals)
{
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < residuals.size(); ++i)
        out.push_back(std::log2(residuals[i] / residuals[i + 1]));
    return out;
}

bool Refinement::roundoff_limited() const
{
    if (relative.empty())
        return false;
    for (std::size_t i = 0; i < relative.size(); ++i)
        if (relative[i] > floor[i])
            return false;
    return true;
}

double Refinement::min_order() const
{
    if (orders.empty())
        return 0.0;
    return *std::min_element(orders.begin(), orders.end());
}

std::vector<std::size_t> refinement_levels(std::size_t n0, std::size_t count)
{
    std::vector<std::size_t> out;
    std::size_t n = n0;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(n);
        n = 2 * n - 1;
    }
    return out;
}

}  // namespace pdm
