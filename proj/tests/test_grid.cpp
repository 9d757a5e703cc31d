#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>

#include "pdm/error.hpp"
#include "pdm/grid.hpp"

using namespace pdm;

namespace {

SampledFunction fn(const GridPtr& g, double (*f)(double))
{
    RVec v(static_cast<Eigen::Index>(g->n));
    for (std::size_t i = 0; i < g->n; ++i)
        v[static_cast<Eigen::Index>(i)] = f(g->points[i]);
    return sample_real(g, v);
}

double interior_max(const CVec& v, Eigen::Index band = 2)
{
    return v.segment(band, v.size() - 2 * band).cwiseAbs().maxCoeff();
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

TEST_CASE("make_grid")
{
    auto g = make_grid(-1, 1, 5);
    CHECK(g->h == 0.5);
    CHECK(g->symmetric);
    const double want[] = {-1, -0.5, 0, 0.5, 1};
    for (int i = 0; i < 5; ++i)
        CHECK(g->points[i] == want[i]);
    auto h = make_grid(0, 1, 3);
    CHECK_FALSE(h->symmetric);
    CHECK(h->points[1] == 0.5);
    CHECK(kind_of([] { make_grid(1, 1, 5); }) == ErrorKind::InvalidRange);
    CHECK(kind_of([] { make_grid(0, 1, 2); }) == ErrorKind::TooFewPoints);
}

TEST_CASE("symmetric grids mirror exactly")
{
    auto g = make_grid(-4, 4, 2001);
    for (std::size_t i = 0; i < g->n; ++i)
        REQUIRE(g->points[i] == -g->points[g->n - 1 - i]);
}

TEST_CASE("diff_matrix on constants and quadratics")
{
    auto g = make_grid(-2, 2, 401);
    const auto one = fn(g, [](double) { return 1.0; });
    CHECK((diff_matrix(g, 1).m * one.values).cwiseAbs().maxCoeff() < 1e-12);
    const auto sq = fn(g, [](double x) { return x * x; });
    const auto twox = fn(g, [](double x) { return 2 * x; });
    CHECK(interior_max(diff_matrix(g, 1).m * sq.values - twox.values) < 1e-3);
    // central and one-sided second-order stencils are exact on quadratics
    const CVec d2 = diff_matrix(g, 2).m * sq.values;
    CHECK((d2.array() - 2.0).abs().maxCoeff() < 1e-6);
    CHECK(kind_of([&] { diff_matrix(g, 3); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("D1 twice agrees with D2 to second order")
{
    double prev = 0.0;
    for (std::size_t n : {201u, 401u, 801u}) {
        auto g = make_grid(-2, 2, n);
        const auto s = fn(g, [](double x) { return std::sin(x) * std::exp(-x * x / 4); });
        const auto D1 = diff_matrix(g, 1).m;
        const CVec gap = D1 * (D1 * s.values) - diff_matrix(g, 2).m * s.values;
        const double e = interior_max(gap, 3);
        if (prev > 0.0)
            CHECK(std::log2(prev / e) > 1.8);
        prev = e;
    }
}

TEST_CASE("integrate")
{
    auto g = make_grid(-1, 1, 101);
    CHECK(std::abs(integrate(fn(g, [](double x) { return x; }))) < 1e-15);
    CHECK(std::abs(integrate(fn(make_grid(0, 1, 11), [](double) { return 1.0; })) - 1.0) < 1e-15);
    CHECK(std::abs(integrate(fn(make_grid(0, 1, 1001), [](double x) { return x; })) - 0.5) < 1e-6);
}

TEST_CASE("integrate is linear")
{
    auto g = make_grid(-3, 2, 301);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> d;
    for (int k = 0; k < 20; ++k) {
        CVec a = CVec::Random(static_cast<Eigen::Index>(g->n));
        CVec b = CVec::Random(static_cast<Eigen::Index>(g->n));
        const cplx al(d(rng), d(rng)), be(d(rng), d(rng));
        const cplx lhs = integrate(sample(g, al * a + be * b));
        const cplx rhs = al * integrate(sample(g, a)) + be * integrate(sample(g, b));
        CHECK(std::abs(lhs - rhs) < 1e-12 * (1 + std::abs(lhs)));
    }
}

TEST_CASE("cumulative_integral")
{
    auto g = make_grid(-2, 3, 51);
    const auto F = cumulative_integral(fn(g, [](double) { return 1.0; }), g->x_min);
    for (std::size_t i = 0; i < g->n; ++i)
        CHECK(F[i].real() == doctest::Approx(g->points[i] - g->x_min).epsilon(1e-13));

    auto s = make_grid(-4, 4, 2001);
    const auto X = cumulative_integral(fn(s, [](double x) { return x; }), 0.0);
    double err = 0.0;
    for (std::size_t i = 0; i < s->n; ++i)
        err = std::max(err, std::abs(X[i] - s->points[i] * s->points[i] / 2));
    CHECK(err < 1e-6);
    CHECK(X[1000] == cplx(0.0));
    CHECK(kind_of([&] { cumulative_integral(fn(s, [](double x) { return x; }), 0.0021); }) == ErrorKind::NotOnGrid);
    CHECK(kind_of([&] { cumulative_integral(fn(s, [](double x) { return x; }), 9.0); }) == ErrorKind::NotOnGrid);
}

TEST_CASE("default anchor")
{
    CHECK(default_anchor(*make_grid(-4, 4, 11)) == 0.0);
    CHECK(default_anchor(*make_grid(4.5, 12, 11)) == 4.5);
}

TEST_CASE("parity matrix")
{
    auto g = make_grid(-1, 1, 21);
    const CMat P(parity_matrix(g).m);
    CHECK((P * P - CMat::Identity(21, 21)).norm() == 0.0);
    CHECK((P - P.transpose()).norm() == 0.0);
    CHECK(P.imag().norm() == 0.0);
    const auto x = fn(g, [](double t) { return t; });
    CHECK((P * x.values + x.values).norm() == 0.0);
    CHECK(kind_of([] { parity_matrix(make_grid(0, 1, 5)); }) == ErrorKind::GridNotSymmetric);
}

TEST_CASE("samples must match their grid")
{
    auto g = make_grid(0, 1, 5);
    CHECK(kind_of([&] { sample(g, CVec::Zero(4)); }) == ErrorKind::GridMismatch);
    auto a = sample(g, CVec::Zero(5));
    auto b = sample(make_grid(0, 2, 5), CVec::Zero(5));
    CHECK(kind_of([&] { require_same_grid(a, b); }) == ErrorKind::GridMismatch);
}
