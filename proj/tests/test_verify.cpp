#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>

#include "pdm/error.hpp"
#include "pdm/operators.hpp"
#include "pdm/verify.hpp"

using namespace pdm;

namespace {

const cplx I(0.0, 1.0);

SampledFunction S(const char* e, const GridPtr& g) { return sample_expr(parse_expr(e), g); }

ModelSpec m1()
{
    ModelSpec s;
    s.G = parse_expr("exp(x)");
    s.g = parse_expr("exp(x)");
    return s;
}

ModelSpec oscillator()
{
    ModelSpec s;
    s.G = parse_expr("0");
    s.F = parse_expr("x");
    return s;
}

ErrorKind kind_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Io;
}

SampledFunction column(const SpectralReport& sp, const GridPtr& g, Eigen::Index j)
{
    SampledFunction p{g, sp.vectors.col(j)};
    p.values /= l2_norm(p);
    return p;
}

}  // namespace

TEST_CASE("M1 intertwining converges at second order")
{
    std::vector<double> r;
    for (std::size_t n : refinement_levels(1001, 2)) {
        const auto b = build_bundle(m1(), make_grid(-4, 4, n));
        r.push_back(intertwining_residual(b.eta_plus, b.H).relative);
    }
    CHECK(r[0] < 1e-4);
    CHECK(r[0] / r[1] >= 3.5);
}

TEST_CASE("identity metric on the oscillator sits at rounding level")
{
    auto g = make_grid(-10, 10, 1001);
    const auto b = build_bundle(oscillator(), g);
    const auto rep = intertwining_residual(identity_operator(g), b.H);
    CHECK(rep.relative <= rep.roundoff_floor);
    CHECK(rep.relative < 1e-13);
}

TEST_CASE("intertwining notices a perturbed potential" * doctest::may_fail())
{
    auto g = make_grid(-4, 4, 1001);
    const ModelSpec s = m1();
    const auto b = build_bundle(s, g);
    SampledFunction V = potentials(s, g).V_plus;
    V.values.array() += 0.1 * I;
    const auto H = build_modified_H(sample_U(s, g), S("0", g), V);
    CHECK(intertwining_residual(b.eta_plus, H).relative > 1e-2);
}

TEST_CASE("hermiticity classes")
{
    auto g = make_grid(-4, 4, 1001);
    const auto b = build_bundle(m1(), g);
    const auto ep = hermiticity_class(b.eta_plus);
    CHECK(ep.cls == HermClass::Hermitian);
    CHECK(ep.hermitian_defect < 1e-14);

    const auto one = S("1", g), zero = S("0", g);
    const auto em = build_eta_minus(one, zero, S("x", g), zero).first;
    CHECK(hermiticity_class(em).cls == HermClass::AntiHermitian);

    CHECK(hermiticity_class(b.H).cls == HermClass::Neither);
    CHECK(std::string(herm_class_name(HermClass::AntiHermitian)) == "anti_hermitian");
}

TEST_CASE("box spectrum")
{
    const double L = 3.0;
    auto g = make_grid(0, L, 1001);
    const auto sp = spectrum(build_H0(S("1", g), S("0", g)));
    CHECK(sp.eigenvalues.size() == 999);
    for (int k = 1; k <= 5; ++k)
        CHECK(std::abs(sp.eigenvalues[static_cast<std::size_t>(k - 1)] - std::pow(k * M_PI / L, 2)) < 1e-3);
    CHECK(sp.reality_max_imag < 1e-10);
}

TEST_CASE("oscillator spectrum")
{
    const auto b = build_bundle(oscillator(), make_grid(-10, 10, 2001));
    const auto sp = spectrum(b.H);
    for (int k = 0; k < 5; ++k)
        CHECK(std::abs(sp.eigenvalues[static_cast<std::size_t>(k)] - cplx(2.0 * k)) < 2e-3);
}

TEST_CASE("M1 spectrum closes under conjugation" * doctest::may_fail())
{
    const auto b = build_bundle(m1(), make_grid(-4, 4, 1001));
    CHECK(spectrum(b.H).conjugate_pair_defect < 1e-6);
}

TEST_CASE("conjugate pair defect")
{
    CHECK(conjugate_pair_defect({cplx(1, 2), cplx(1, -2), cplx(3, 0)}) == 0.0);
    // 1+2i lies closest to 3 among {1-2i, 3}
    CHECK(conjugate_pair_defect({cplx(1, 2), cplx(3, 0)}) == doctest::Approx(std::sqrt(8.0)));
}

TEST_CASE("lowest eigenpairs agree with the full spectrum")
{
    auto g = make_grid(-4, 4, 401);
    const auto b = build_bundle(m1(), g);
    const auto full = spectrum(b.H);
    const auto low = lowest_eigenpairs(b.H, 3);
    REQUIRE(low.eigenvalues.size() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(std::abs(low.eigenvalues[j] - full.eigenvalues[j]) < 1e-8 * std::abs(full.eigenvalues[j]));
        const CVec v = low.vectors.col(static_cast<Eigen::Index>(j));
        CHECK((b.H.m * v - low.eigenvalues[j] * v).segment(1, 399).norm() < 1e-8 * std::abs(low.eigenvalues[j]));
    }
    CHECK_THROWS_AS(lowest_eigenpairs(b.H, 400), Error);
}

TEST_CASE("oscillator states are orthogonal under the identity metric")
{
    auto g = make_grid(-10, 10, 2001);
    const auto b = build_bundle(oscillator(), g);
    const auto sp = lowest_eigenpairs(b.H, 2);
    const auto p0 = column(sp, g, 0), p1 = column(sp, g, 1);
    const auto eta = identity_operator(g);
    CHECK(std::abs(eta_orthogonality(p0, p1, eta, sp.eigenvalues[0], sp.eigenvalues[1])) < 1e-8);
    CHECK(eta_orthogonality(p0, p0, eta, cplx(2.0), cplx(2.0)) == cplx(0.0));
}

TEST_CASE("gauge scenario states are orthogonal under the exp-parity metric")
{
    ModelSpec s;
    s.a = parse_expr("exp(-x^2)");
    auto g = make_grid(-4, 4, 3001);
    const auto b = build_bundle(s, g);
    REQUIRE(b.eta_exp_parity.dim() == 3001);
    const auto sp = lowest_eigenpairs(b.H, 2);
    const auto p0 = column(sp, g, 0), p1 = column(sp, g, 1);
    CHECK(std::abs(eta_orthogonality(p0, p1, b.eta_exp_parity, sp.eigenvalues[0], sp.eigenvalues[1])) < 1e-6);
    CHECK(std::abs(eta_orthogonality(p1, p0, b.eta_exp_parity, sp.eigenvalues[1], sp.eigenvalues[0])) < 1e-6);
}

TEST_CASE("gauge similarity preserves the spectrum")
{
    ModelSpec s;
    s.a = parse_expr("exp(-x^2)");
    const auto b = build_bundle(s, make_grid(-4, 4, 801));
    const auto a = spectrum(b.H), h = spectrum(b.h_her);
    for (std::size_t j = 0; j < 10; ++j)
        CHECK(std::abs(a.eigenvalues[j] - h.eigenvalues[j]) < 1e-6);
}

TEST_CASE("oscillator norm is conserved")
{
    auto g = make_grid(-10, 10, 1001);
    const auto b = build_bundle(oscillator(), g);
    const auto ground = column(lowest_eigenpairs(b.H, 1), g, 0);
    const auto rec = evolve_conservation(b.H, identity_operator(g), ground, ground, 1e-3, 1000);
    CHECK(rec.times.size() == rec.rho_eta_integral.size());
    CHECK(rec.times.back() == doctest::Approx(1.0));
    CHECK(rec.relative_drift() < 1e-10);
    CHECK(kind_of([&] { evolve_conservation(b.H, identity_operator(g), ground, ground, 0.0, 10); }) ==
          ErrorKind::InvalidArgument);
}

TEST_CASE("M1 eta integral is conserved")
{
    auto g = make_grid(-30, 3, 2001);
    const auto b = build_bundle(m1(), g);
    const auto psi1 = S("exp(-(x+10)^2/2)", g);
    SampledFunction psi2 = S("exp(-(x+9.5)^2/2)", g);
    psi2.values = (psi2.values.array() * (S("cos(0.5*x)", g).values.array() + I * S("sin(0.5*x)", g).values.array()))
                      .matrix();
    const auto rec = evolve_conservation(b.H, b.eta_plus, psi1, psi2, 1e-3, 1000);
    CHECK(rec.relative_drift() < 1e-6);
}

TEST_CASE("factorization, decomposition and similarity on the M1 pipeline")
{
    std::vector<double> fa, de, si;
    for (std::size_t n : refinement_levels(1001, 2)) {
        const auto p = build_similarity_pipeline(m1(), make_grid(-4, 4, n));
        fa.push_back(factorization_residual(p.eta_plus, p.eta_minus, p.eta_minus_dag, p.U, p.R).relative);
        de.push_back(decomposition_residual(p.eta_plus, p.eta_minus, p.eta_minus_dag, p.U, p.R).relative);
        si.push_back(similarity_residual(p.zeta, p.eta_minus, p.R).relative);
    }
    CHECK(fa[1] < 1e-3);
    CHECK(de[1] < 1e-3);
    CHECK(si[1] < 1e-3);
    CHECK(observed_orders(fa)[0] > 1.5);
    CHECK(observed_orders(de)[0] > 1.5);
    CHECK(observed_orders(si)[0] > 1.5);
}

TEST_CASE("constant R reduces the identities")
{
    auto g = make_grid(-4, 4, 1001);
    const auto U = S("1", g), F = S("-0.5", g), G = S("exp(x)", g), a = S("0", g);
    const auto [Z, Zd] = build_zeta(U, F, G, a);
    const OperatorMatrix ep{g, SpMat(Zd.m * Z.m)};
    const auto [E, Ed] = build_eta_minus(U, F, G, a, false);
    const auto two = S("2", g);
    CHECK(factorization_residual(ep, E, Ed, U, two).relative < 1e-12);
    CHECK(decomposition_residual(ep, E, Ed, U, two).relative < 1e-12);
    CHECK(similarity_residual(Z, E, two).relative < 1e-12);

    const auto one = S("1", g);
    CHECK(kind_of([&] { factorization_residual(ep, E, Ed, U, one); }) == ErrorKind::SingularR);
    CHECK(kind_of([&] { decomposition_residual(ep, E, Ed, U, one); }) == ErrorKind::SingularR);
    CHECK(kind_of([&] { similarity_residual(Z, E, S("x^2", g)); }) == ErrorKind::SingularR);
}

TEST_CASE("tau residual vanishes without a gauge term")
{
    const auto b = build_bundle(m1(), make_grid(-4, 4, 401));
    CHECK(tau_residual(b.H, b.alpha).relative < 1e-14);
}

TEST_CASE("refinement helpers")
{
    const auto o = observed_orders({4.0, 1.0, 0.25});
    REQUIRE(o.size() == 2);
    CHECK(o[0] == doctest::Approx(2.0));
    CHECK(o[1] == doctest::Approx(2.0));
    CHECK(refinement_levels(101, 3) == std::vector<std::size_t>{101, 201, 401});

    Refinement r;
    r.relative = {1e-17, 1e-17};
    r.floor = {1e-15, 1e-15};
    CHECK(r.roundoff_limited());
    r.relative = {1e-5, 1e-17};
    CHECK_FALSE(r.roundoff_limited());
}

TEST_CASE("probes are deterministic and vanish at the ends")
{
    auto g = make_grid(-1, 1, 101);
    const CMat a = probe_set(*g), b = probe_set(*g);
    CHECK((a - b).norm() == 0.0);
    CHECK(a.cols() == static_cast<Eigen::Index>(kProbeCount));
    CHECK(a.row(0).norm() < 1e-12);
    CHECK(a.row(100).norm() < 1e-12);
    CHECK((probe_set(*g, kProbeCount, 2) - a).norm() > 0.0);
}
