#include "pdm/grid.hpp"

#include <cmath>
#include <vector>

#include "pdm/error.hpp"

namespace pdm {

using Trip = Eigen::Triplet<cplx>;

GridPtr make_grid(double x_min, double x_max, std::size_t n)
{
    if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max))
        throw Error(ErrorKind::InvalidRange, "grid requires x_min < x_max");
    if (n < 3)
        throw Error(ErrorKind::TooFewPoints, "grid requires at least 3 points");
    auto g = std::make_shared<Grid>();
    g->x_min = x_min;
    g->x_max = x_max;
    g->n = n;
    g->h = (x_max - x_min) / static_cast<double>(n - 1);
    g->symmetric = (x_min == -x_max);
    g->points.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        g->points[i] = x_min + static_cast<double>(i) * g->h;
    g->points[n - 1] = x_max;
    if (g->symmetric) {
        // mirror exactly so that x_i == -x_{n-1-i} holds bitwise
        std::vector<double> p = g->points;
        for (std::size_t i = 0; i < n; ++i)
            g->points[i] = 0.5 * (p[i] - p[n - 1 - i]);
    }
    return g;
}

OperatorMatrix diff_matrix(const GridPtr& g, int order)
{
    if (order != 1 && order != 2)
        throw Error(ErrorKind::InvalidArgument, "diff_matrix order must be 1 or 2");
    const auto n = static_cast<Eigen::Index>(g->n);
    const double h = g->h;
    std::vector<Trip> t;
    t.reserve(static_cast<std::size_t>(3 * n + 8));
    if (order == 1) {
        const double c = 1.0 / (2.0 * h);
        t.emplace_back(0, 0, -3.0 * c);
        t.emplace_back(0, 1, 4.0 * c);
        t.emplace_back(0, 2, -1.0 * c);
        for (Eigen::Index i = 1; i < n - 1; ++i) {
            t.emplace_back(i, i - 1, -c);
            t.emplace_back(i, i + 1, c);
        }
        t.emplace_back(n - 1, n - 3, 1.0 * c);
        t.emplace_back(n - 1, n - 2, -4.0 * c);
        t.emplace_back(n - 1, n - 1, 3.0 * c);
    } else {
        const double c = 1.0 / (h * h);
        for (Eigen::Index i = 1; i < n - 1; ++i) {
            t.emplace_back(i, i - 1, c);
            t.emplace_back(i, i, -2.0 * c);
            t.emplace_back(i, i + 1, c);
        }
        if (n >= 4) {
            t.emplace_back(0, 0, 2.0 * c);
            t.emplace_back(0, 1, -5.0 * c);
            t.emplace_back(0, 2, 4.0 * c);
            t.emplace_back(0, 3, -1.0 * c);
            t.emplace_back(n - 1, n - 4, -1.0 * c);
            t.emplace_back(n - 1, n - 3, 4.0 * c);
            t.emplace_back(n - 1, n - 2, -5.0 * c);
            t.emplace_back(n - 1, n - 1, 2.0 * c);
        } else {
            // three points: reuse the single interior stencil (first order)
            for (Eigen::Index r : {Eigen::Index(0), n - 1}) {
                t.emplace_back(r, 0, c);
                t.emplace_back(r, 1, -2.0 * c);
                t.emplace_back(r, 2, c);
            }
        }
    }
    OperatorMatrix D{g, SpMat(n, n)};
    D.m.setFromTriplets(t.begin(), t.end());
    return D;
}

SpMat dirichlet_diff(const Grid& g, int order)
{
    const auto n = static_cast<Eigen::Index>(g.n);
    const double h = g.h;
    std::vector<Trip> t;
    t.reserve(static_cast<std::size_t>(3 * n));
    for (Eigen::Index i = 1; i < n - 1; ++i) {
        if (order == 1) {
            t.emplace_back(i, i - 1, -0.5 / h);
            t.emplace_back(i, i + 1, 0.5 / h);
        } else {
            t.emplace_back(i, i - 1, 1.0 / (h * h));
            t.emplace_back(i, i, -2.0 / (h * h));
            t.emplace_back(i, i + 1, 1.0 / (h * h));
        }
    }
    SpMat D(n, n);
    D.setFromTriplets(t.begin(), t.end());
    return D;
}

cplx integrate(const SampledFunction& f)
{
    const auto& v = f.values;
    const Eigen::Index n = v.size();
    cplx s = 0.5 * (v[0] + v[n - 1]);
    for (Eigen::Index i = 1; i < n - 1; ++i)
        s += v[i];
    return s * f.grid->h;
}

std::size_t grid_index(const Grid& g, double x0)
{
    double r = (x0 - g.x_min) / g.h;
    double k = std::round(r);
    if (k < 0 || k > static_cast<double>(g.n - 1))
        throw Error(ErrorKind::NotOnGrid, "base point outside the grid");
    auto i = static_cast<std::size_t>(k);
    if (std::fabs(g.points[i] - x0) > 1e-9 * std::max(1.0, std::fabs(x0)) + 1e-12 * g.h)
        throw Error(ErrorKind::NotOnGrid, "base point " + std::to_string(x0) + " is not a grid point");
    return i;
}

double default_anchor(const Grid& g)
{
    try {
        grid_index(g, 0.0);
        return 0.0;
    } catch (const Error&) {
        return g.x_min;
    }
}

SampledFunction cumulative_integral(const SampledFunction& f, double x0)
{
    const Grid& g = *f.grid;
    const std::size_t k = grid_index(g, x0);
    const double hh = 0.5 * g.h;
    CVec F(f.values.size());
    const auto ki = static_cast<Eigen::Index>(k);
    F[ki] = 0.0;
    // accumulate outward from the base point in both directions
    for (Eigen::Index i = ki; i + 1 < F.size(); ++i)
        F[i + 1] = F[i] + hh * (f.values[i] + f.values[i + 1]);
    for (Eigen::Index i = ki; i > 0; --i)
        F[i - 1] = F[i] - hh * (f.values[i] + f.values[i - 1]);
    return SampledFunction{f.grid, F};
}

OperatorMatrix parity_matrix(const GridPtr& g)
{
    if (!g->symmetric)
        throw Error(ErrorKind::GridNotSymmetric, "parity requires a symmetric grid");
    const auto n = static_cast<Eigen::Index>(g->n);
    std::vector<Trip> t;
    t.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        t.emplace_back(i, n - 1 - i, 1.0);
    OperatorMatrix P{g, SpMat(n, n)};
    P.m.setFromTriplets(t.begin(), t.end());
    return P;
}

SampledFunction sample(const GridPtr& g, const CVec& v)
{
    if (static_cast<std::size_t>(v.size()) != g->n)
        throw Error(ErrorKind::GridMismatch, "sample length does not match the grid");
    return SampledFunction{g, v};
}

SampledFunction sample_real(const GridPtr& g, const RVec& v)
{
    return sample(g, v.cast<cplx>());
}

SampledFunction derivative(const SampledFunction& f, int order)
{
    OperatorMatrix D = diff_matrix(f.grid, order);
    return SampledFunction{f.grid, D.m * f.values};
}

bool same_grid(const GridPtr& a, const GridPtr& b)
{
    if (a == b)
        return true;
    if (!a || !b)
        return false;
    return a->n == b->n && a->x_min == b->x_min && a->x_max == b->x_max;
}

void require_same_grid(const SampledFunction& a, const SampledFunction& b)
{
    if (!same_grid(a.grid, b.grid) || a.values.size() != b.values.size())
        throw Error(ErrorKind::GridMismatch, "sampled functions live on different grids");
}

}  // namespace pdm
