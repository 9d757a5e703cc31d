#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>

#include "pdm/coordmap.hpp"
#include "pdm/error.hpp"
#include "pdm/model.hpp"

using namespace pdm;

namespace {

SampledFunction S(const char* e, const GridPtr& g) { return sample_expr(parse_expr(e), g); }

double max_gap(const SampledFunction& f, const std::function<double(double)>& want, std::size_t band = 0)
{
    double worst = 0.0;
    for (std::size_t i = band; i + band < f.size(); ++i)
        worst = std::max(worst, std::abs(f[i] - cplx(want(f.grid->points[i]))));
    return worst;
}

// Central-difference derivative on interior nodes; ends are left at zero.
RVec central(const SampledFunction& f)
{
    const auto n = static_cast<Eigen::Index>(f.size());
    RVec d = RVec::Zero(n);
    for (Eigen::Index i = 1; i + 1 < n; ++i)
        d[i] = (f.values[i + 1].real() - f.values[i - 1].real()) / (2 * f.grid->h);
    return d;
}

std::size_t index_of(const GridPtr& g, double x)
{
    return static_cast<std::size_t>(std::lround((x - g->x_min) / g->h));
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

}  // namespace

TEST_CASE("R from F")
{
    auto g = make_grid(-4, 4, 2001);
    const auto one = S("1", g);
    CHECK(max_gap(R_from_F(S("0", g), one, 0.5), [](double) { return 1.5; }) < 1e-15);
    CHECK(max_gap(R_from_F(S("x", g), one, 1.0), [](double x) { return 1 + std::exp(-x * x); }) < 1e-6);
    CHECK(kind_of([&] { R_from_F(S("x", g), one, 0.0); }) == ErrorKind::SingularR);
}

TEST_CASE("F is recovered from R at second order")
{
    std::vector<double> err;
    for (std::size_t n : {601u, 1201u}) {
        auto g = make_grid(-3, 3, n);
        const auto R = R_from_F(S("x", g), S("1", g), 1.0);
        const RVec Rp = central(R);
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double r = R[i].real();
            const double F = r / (1 - r) * Rp[static_cast<Eigen::Index>(i)] / (2 * r);
            worst = std::max(worst, std::abs(F - g->points[i]));
        }
        err.push_back(worst);
    }
    CHECK(std::log2(err[0] / err[1]) > 1.8);
}

TEST_CASE("map_f")
{
    auto g = make_grid(-4, 4, 2001);
    const auto one = S("1", g), x = S("x", g);
    const auto c = map_f(x, one, S("2", g));
    CHECK(max_gap(c.f, [](double t) { return t / 2; }) < 1e-15);

    const auto R = R_from_F(x, one, 1.0);
    const auto m = map_f(x, one, R);
    CHECK(max_gap(m.f, [](double t) { return t / (1 + std::exp(-t * t)); }) < 1e-5);
    CHECK(kind_of([&] { map_f(x, one, one); }) == ErrorKind::SingularR);
}

TEST_CASE("xi from R")
{
    auto g = make_grid(-4, 4, 8001);
    CHECK(max_gap(xi_from_R(S("2", g)), [](double x) { return x / 2; }) < 1e-12);

    const auto R = S("1 + exp(-x^2)", g);
    const auto xi = xi_from_R(R);
    const RVec d = central(xi);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < g->n; ++i) {
        CHECK(xi[i + 1].real() > xi[i].real());
        worst = std::max(worst, std::abs(d[static_cast<Eigen::Index>(i)] * R[i].real() - 1.0));
    }
    CHECK(worst < 1e-6);
    CHECK(kind_of([&] { xi_from_R(S("x", g)); }) == ErrorKind::NonPositive);
}

TEST_CASE("modified mass")
{
    auto g = make_grid(-4, 4, 201);
    CHECK(max_gap(modified_mass(S("1", g), S("2", g)), [](double) { return 0.5; }) < 1e-15);
    CHECK(kind_of([&] { modified_mass(S("1", g), S("x", g)); }) == ErrorKind::NonPositive);

    auto h = make_grid(4.5, 12, 3001);
    const auto R = R_closed_form(sigma_fn(parse_expr("1"), h, 1, 0), Branch::Minus);
    const auto Um = modified_mass(S("1", h), R);
    CHECK(Um[index_of(h, 8.0)].real() == doctest::Approx(13.928).epsilon(1e-4));
}

TEST_CASE("f transform")
{
    auto g = make_grid(-4, 4, 4001);
    const auto one = S("1", g);
    const auto rep = check_f_transform(one, S("x", g), 1.0);
    CHECK(rep.residual.absolute < 1e-4);
    CHECK(check_f_transform(one, S("0", g), 1.0).residual.absolute < 1e-12);
}

TEST_CASE("monotone re-tabulation")
{
    RVec s(5), y(5);
    s << 0, 1, 2, 3, 4;
    y << 0, 1, 4, 9, 16;
    const auto t = retabulate(s, {y}, 9);
    CHECK(t.grid->h == 0.5);
    CHECK(t.columns[0][2] == doctest::Approx(1.0));
    s[2] = 0.5;
    s[1] = 0.7;
    CHECK(kind_of([&] { retabulate(s, {y}, 9); }) == ErrorKind::NotMonotone);
    CHECK(kind_of([] { MonotoneInterp({0, 2, 1, 3}, {0, 1, 2, 3}); }) == ErrorKind::NotMonotone);
    CHECK(kind_of([] { MonotoneInterp({0, 1}, {0, 1}); }) == ErrorKind::TooFewPoints);

    const MonotoneInterp f({0, 1, 2, 3, 4}, {0, 1, 1, 1, 5});
    for (double x = 1.0; x <= 2.0; x += 0.125)
        CHECK(f(x) == doctest::Approx(1.0));
}

TEST_CASE("sigma")
{
    auto g = make_grid(-4, 4, 2001);
    CHECK(max_gap(sigma_fn(S("1", g), 1, 0), [](double x) { return x; }) < 1e-14);
    CHECK(max_gap(sigma_fn(S("1", g), 0, 2.5), [](double) { return 2.5; }) == 0.0);

    // central differences of a trapezoid sum carry h²f''/4, so the grid is fine
    auto h = make_grid(-2, 2, 8001);
    const auto U = S("1 + x^2", h);
    const RVec d = central(sigma_fn(U, 1, 0));
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < h->n; ++i)
        worst = std::max(worst, std::abs(d[static_cast<Eigen::Index>(i)] * std::pow(U[i].real(), 2) - 1.0));
    CHECK(worst < 1e-6);

    // off-grid anchor: σ = x on [4.5, 12] still measures from 0
    auto b = make_grid(4.5, 12, 301);
    CHECK(max_gap(sigma_fn(parse_expr("1"), b, 1, 0), [](double x) { return x; }) < 1e-12);
    const auto s2 = sigma_fn(parse_expr("1 + x^2"), b, 1, 0);
    // ∫₀^x (1 + t²)^-2 dt = (x/(1 + x²) + atan x)/2
    CHECK(s2[0].real() == doctest::Approx((4.5 / (1 + 4.5 * 4.5) + std::atan(4.5)) / 2).epsilon(1e-10));
}

TEST_CASE("constant-mass closed form")
{
    auto g = make_grid(4.5, 12, 3001);
    const auto sigma = sigma_fn(parse_expr("1"), g, 1, 0);
    const std::size_t i8 = index_of(g, 8.0);
    REQUIRE(g->points[i8] == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(std::abs(R_closed_form(sigma, Branch::Plus)[i8].real() - (7 + 4 * std::sqrt(3.0))) < 1e-12);
    CHECK(std::abs(R_closed_form(sigma, Branch::Minus)[i8].real() - (7 - 4 * std::sqrt(3.0))) < 1e-12);

    auto z = make_grid(-8, 8, 161);
    CHECK(kind_of([&] { R_closed_form(sigma_fn(S("1", z), 1, 0), Branch::Plus); }) == ErrorKind::Domain);
}

TEST_CASE("branches multiply to one")
{
    auto g = make_grid(4.5, 12, 4001);
    const auto sigma = sigma_fn(parse_expr("1"), g, 1, 0);
    const CVec p = R_closed_form(sigma, Branch::Plus).values.cwiseProduct(R_closed_form(sigma, Branch::Minus).values);
    CHECK((p.array() - 1.0).abs().maxCoeff() < 1e-9);
}

TEST_CASE("closed form against the ODE")
{
    auto g = make_grid(4.5, 12, 4001);
    const auto sigma = sigma_fn(parse_expr("1"), g, 1, 0);
    const auto one = S("1", g);
    CHECK(ode_residual_4_18(R_closed_form(sigma, Branch::Plus), one).absolute < 1e-5);
    CHECK(ode_residual_4_18(R_closed_form(sigma, Branch::Minus), one).absolute < 1e-5);
    CHECK(ode_residual_4_18(S("2", g), one).absolute == 0.0);

    auto h = make_grid(-2, 2, 2001);
    CHECK(ode_residual_4_18(S("1 + exp(-x^2)", h), S("1", h)).absolute > 1e-2);
    CHECK(kind_of([&] { ode_residual_4_18(S("1", h), S("1", h)); }) == ErrorKind::SingularR);
}

TEST_CASE("xi closed form")
{
    auto g = make_grid(4.5, 12, 8001);
    const auto sigma = sigma_fn(parse_expr("1"), g, 1, 0);
    const auto R = R_closed_form(sigma, Branch::Plus);
    const auto xi = xi_closed_form(sigma, Branch::Plus, 0.0);
    const RVec d = central(xi);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < g->n; ++i)
        worst = std::max(worst, std::abs(d[static_cast<Eigen::Index>(i)] * R[i].real() - 1.0));
    CHECK(worst < 1e-6);

    const auto shifted = xi_closed_form(sigma, Branch::Plus, 3.0);
    CHECK((shifted.values - xi.values).array().real().maxCoeff() == doctest::Approx(3.0).epsilon(1e-14));
    CHECK((shifted.values - xi.values).array().real().minCoeff() == doctest::Approx(3.0).epsilon(1e-14));

    const RVec dm = central(xi_closed_form(sigma, Branch::Minus, 0.0));
    CHECK(dm.segment(1, static_cast<Eigen::Index>(g->n) - 2).minCoeff() > 1.0);
}

TEST_CASE("coordinate map invariants")
{
    auto g = make_grid(-4, 4, 2001);
    const auto map = build_coordinate_map(S("1", g), S("x", g), 1.0);
    CHECK((map.R.values.cwiseProduct(map.S.values).array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(xi_roundtrip_error(map.xi) < 1e-5);
    for (std::size_t i = 0; i + 1 < g->n; ++i)
        REQUIRE(map.xi[i + 1].real() > map.xi[i].real());
    CHECK(max_gap(map.U_modified, [](double x) { return 1 / (1 + std::exp(-x * x)); }) < 1e-6);
}
