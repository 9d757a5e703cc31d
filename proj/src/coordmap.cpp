#include "pdm/coordmap.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

// boost 1.74 pchip calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pdm/error.hpp"
#include "pdm/model.hpp"

namespace pdm {

namespace {

using boost::math::interpolators::pchip;

void check_nonsingular_R(const SampledFunction& R)
{
    for (std::size_t i = 0; i < R.size(); ++i) {
        const double r = R[i].real();
        if (!std::isfinite(r))
            throw Error(ErrorKind::Overflow, "R is not finite at x = " + std::to_string(R.grid->points[i]));
        if (r <= 1e-9)
            throw Error(ErrorKind::SingularR, "R reaches 0 near x = " + std::to_string(R.grid->points[i]));
        if (std::fabs(r - 1.0) < 1e-9)
            throw Error(ErrorKind::SingularR, "R reaches 1 near x = " + std::to_string(R.grid->points[i]));
    }
}

void check_positive_R(const SampledFunction& R)
{
    for (std::size_t i = 0; i < R.size(); ++i)
        if (!(R[i].real() > 0.0))
            throw Error(ErrorKind::NonPositive, "R must be positive; R(" + std::to_string(R.grid->points[i])
                                                    + ") = " + std::to_string(R[i].real()));
}

RVec rderiv(const GridPtr& g, const RVec& v, int order = 1) { return derivative(sample_real(g, v), order).real(); }

double interior_max_abs(const RVec& v, std::size_t band)
{
    double m = 0.0;
    for (Eigen::Index i = static_cast<Eigen::Index>(band); i + static_cast<Eigen::Index>(band) < v.size(); ++i)
        m = std::max(m, std::fabs(v[i]));
    return m;
}

}  // namespace

const char* branch_name(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }

MonotoneInterp::MonotoneInterp(std::vector<double> x, std::vector<double> y)
{
    if (x.size() != y.size())
        throw Error(ErrorKind::InvalidArgument, "interpolation needs matching abscissae and ordinates");
    if (x.size() < 4)
        throw Error(ErrorKind::TooFewPoints, "monotone interpolation needs at least four points");
    if (x.front() > x.back()) {
        std::reverse(x.begin(), x.end());
        std::reverse(y.begin(), y.end());
    }
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i] < x[i + 1]))
            throw Error(ErrorKind::NotMonotone, "abscissae are not strictly monotone");
    lo_ = x.front();
    hi_ = x.back();
    auto p = std::make_shared<pchip<std::vector<double>>>(std::move(x), std::move(y));
    f_ = [p](double t) { return (*p)(t); };
}

double MonotoneInterp::operator()(double x) const { return f_(std::clamp(x, lo_, hi_)); }

SampledFunction R_from_F(const SampledFunction& F, const SampledFunction& U, double delta)
{
    require_same_grid(F, U);
    if (delta == 0.0)
        throw Error(ErrorKind::SingularR, "delta = 0 gives R = 1 identically");
    const GridPtr& g = F.grid;
    const RVec ratio = F.real().cwiseQuotient(U.real());
    const RVec I = cumulative_integral(sample_real(g, ratio), default_anchor(*g)).real();
    RVec R(I.size());
    for (Eigen::Index i = 0; i < R.size(); ++i)
        R[i] = 1.0 + delta * std::exp(-2.0 * I[i]);
    SampledFunction out = sample_real(g, R);
    check_nonsingular_R(out);
    return out;
}

MappedF map_f(const SampledFunction& F, const SampledFunction& U, const SampledFunction& R)
{
    require_same_grid(F, U);
    require_same_grid(F, R);
    check_nonsingular_R(R);
    const GridPtr& g = F.grid;
    const RVec r = R.real();
    const RVec f = F.real().cwiseQuotient(r);
    const RVec rp = rderiv(g, r);
    const RVec flog = F.real().array() + U.real().array() * rp.array() / (2.0 * r.array());
    MappedF out;
    out.f = sample_real(g, f);
    out.f_log = sample_real(g, flog);
    out.gap = interior_max_abs(f - flog, kInteriorBand);
    return out;
}

SampledFunction xi_from_R(const SampledFunction& R)
{
    check_positive_R(R);
    const RVec inv = R.real().cwiseInverse();
    SampledFunction xi = cumulative_integral(sample_real(R.grid, inv), default_anchor(*R.grid));
    xi.values = xi.values.real().cast<cplx>();
    return xi;
}

SampledFunction modified_mass(const SampledFunction& U, const SampledFunction& R)
{
    require_same_grid(U, R);
    check_positive_R(R);
    return sample_real(U.grid, U.real().cwiseQuotient(R.real()));
}

Retabulated retabulate(const RVec& s, const std::vector<RVec>& ys, std::size_t n)
{
    const Eigen::Index m = s.size();
    for (Eigen::Index i = 0; i + 1 < m; ++i)
        if (!(s[i] < s[i + 1]))
            throw Error(ErrorKind::NotMonotone, "coordinate is not strictly increasing");
    Retabulated out;
    out.grid = make_grid(s[0], s[m - 1], n);
    std::vector<double> sv(s.data(), s.data() + m);
    for (const RVec& y : ys) {
        if (y.size() != m)
            throw Error(ErrorKind::GridMismatch, "column length does not match the coordinate");
        MonotoneInterp f(sv, std::vector<double>(y.data(), y.data() + m));
        RVec col(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            col[static_cast<Eigen::Index>(i)] = f(out.grid->points[i]);
        out.columns.push_back(col);
    }
    return out;
}

FTransformReport check_f_transform(const SampledFunction& U, const SampledFunction& F, double delta)
{
    require_same_grid(U, F);
    const GridPtr& g = U.grid;
    const SampledFunction R = R_from_F(F, U, delta);
    const RVec r = R.real();
    const RVec u = U.real();

    // G := R, then F from G by (G/2)(U/G)'
    const RVec Fhat = 0.5 * r.array() * rderiv(g, u.cwiseQuotient(r)).array();
    const RVec f = Fhat.cwiseQuotient(r);
    const RVec Umod = modified_mass(U, R).real();
    const RVec xi = xi_from_R(R).real();

    const Retabulated t = retabulate(xi, {f, Umod, r, F.real()}, g->n);
    const RVec& f_xi = t.columns[0];
    const RVec dU_xi = rderiv(t.grid, t.columns[1]);
    const RVec S_xi = t.columns[2].cwiseInverse();
    // dx/dξ = R turns the ξ-derivative back into (1/2) d𝓤/dx
    const RVec target = 0.5 * S_xi.cwiseProduct(dU_xi);
    const RVec literal = S_xi.cwiseProduct(t.columns[3]) - 0.5 * dU_xi;

    FTransformReport rep;
    rep.f_scale = interior_max_abs(f_xi, kInteriorBand);
    rep.residual.name = "f_transform";
    rep.residual.grid_n = g->n;
    rep.residual.absolute = interior_max_abs(f_xi - target, kInteriorBand);
    rep.residual.relative = rep.f_scale > 0.0 ? rep.residual.absolute / rep.f_scale : rep.residual.absolute;
    rep.literal_gap = interior_max_abs(literal, kInteriorBand);
    return rep;
}

double xi_roundtrip_error(const SampledFunction& xi)
{
    const GridPtr& g = xi.grid;
    const RVec s = xi.real();
    const std::vector<double> xs = g->points;
    const std::vector<double> ss(s.data(), s.data() + s.size());
    const MonotoneInterp x_to_xi(xs, ss);
    const MonotoneInterp xi_to_x(ss, xs);
    const double lo = std::min(ss.front(), ss.back());
    const double hi = std::max(ss.front(), ss.back());
    const std::size_t m = g->n;
    const double step = (hi - lo) / static_cast<double>(m - 1);
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double q = lo + (static_cast<double>(i) + 0.5) * step;
        worst = std::max(worst, std::fabs(x_to_xi(xi_to_x(q)) - q));
    }
    return worst;
}

SampledFunction sigma_fn(const SampledFunction& U, double lambda1, double lambda2)
{
    const GridPtr& g = U.grid;
    for (std::size_t i = 0; i < U.size(); ++i)
        if (!(U[i].real() > 0.0))
            throw Error(ErrorKind::NonPositive, "U must be positive");
    const RVec w = U.real().array().square().inverse();
    const RVec I = cumulative_integral(sample_real(g, w), default_anchor(*g)).real();
    return sample_real(g, (lambda1 * I.array() + lambda2).matrix());
}

SampledFunction sigma_fn(const Expression& U_expr, const GridPtr& g, double lambda1, double lambda2, double x0)
{
    const SampledFunction U = sample_expr(U_expr, g);
    for (std::size_t i = 0; i < U.size(); ++i)
        if (!(U[i].real() > 0.0))
            throw Error(ErrorKind::NonPositive, "U must be positive");
    const RVec w = U.real().array().square().inverse();
    double base = x0;
    double offset = 0.0;
    try {
        grid_index(*g, x0);
    } catch (const Error&) {
        // integrate the gap from x0 to the left end directly from the expression
        base = g->x_min;
        auto integrand = [&](double t) {
            const double u = eval_expr(U_expr, t);
            if (!(u > 0.0))
                throw Error(ErrorKind::NonPositive, "U must be positive between the anchor and the grid");
            return 1.0 / (u * u);
        };
        offset = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, x0, g->x_min, 15, 1e-14);
    }
    const RVec I = cumulative_integral(sample_real(g, w), base).real();
    return sample_real(g, (lambda1 * (I.array() + offset) + lambda2).matrix());
}

SampledFunction R_closed_form(const SampledFunction& sigma, Branch branch, double margin)
{
    const double sgn = branch == Branch::Plus ? 1.0 : -1.0;
    RVec R(static_cast<Eigen::Index>(sigma.size()));
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const double s = sigma[i].real();
        if (std::fabs(s) < 4.0 + margin)
            throw Error(ErrorKind::Domain, "|sigma| < 4 + margin at x = " + std::to_string(sigma.grid->points[i])
                                               + " (sigma = " + std::to_string(s) + ")");
        R[static_cast<Eigen::Index>(i)] = s * s / 8.0 - 1.0 + sgn * (s / 2.0) * std::sqrt(s * s / 16.0 - 1.0);
    }
    return sample_real(sigma.grid, R);
}

double chi_of_R(double R)
{
    if (R == 0.0 || R == 1.0)
        throw Error(ErrorKind::SingularR, "chi has poles at R = 0 and R = 1");
    return (R - 3.0) / (2.0 * R * (R - 1.0));
}

ResidualReport ode_residual_4_18(const SampledFunction& R, const SampledFunction& U, std::size_t band)
{
    require_same_grid(R, U);
    check_nonsingular_R(R);
    const GridPtr& g = R.grid;
    const RVec r = R.real();
    const RVec rp = rderiv(g, r);
    const RVec rpp = rderiv(g, r, 2);
    const RVec u = U.real();
    const RVec theta = 2.0 * rderiv(g, u).cwiseQuotient(u);
    RVec chi(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i)
        chi[i] = chi_of_R(r[i]);
    const RVec t1 = theta.cwiseProduct(rp);
    const RVec t2 = chi.cwiseProduct(rp).cwiseProduct(rp);
    const RVec res = rpp + t1 - t2;
    const double scale = std::max({interior_max_abs(rpp, band), interior_max_abs(t1, band),
                                   interior_max_abs(t2, band)});
    ResidualReport rep;
    rep.name = "ode_4_18";
    rep.grid_n = g->n;
    rep.interior_band = band;
    rep.absolute = interior_max_abs(res, band);
    rep.relative = scale > 0.0 ? rep.absolute / scale : rep.absolute;
    return rep;
}

SampledFunction xi_closed_form(const SampledFunction& sigma, Branch branch, double c, double margin)
{
    const SampledFunction R = R_closed_form(sigma, branch, margin);
    SampledFunction xi = xi_from_R(R);
    xi.values.array() += c;
    return xi;
}

CoordinateMap build_coordinate_map(const SampledFunction& U, const SampledFunction& F, double delta)
{
    CoordinateMap m;
    m.grid_x = U.grid;
    m.R = R_from_F(F, U, delta);
    m.S = sample_real(U.grid, m.R.real().cwiseInverse());
    m.xi = xi_from_R(m.R);
    m.U_modified = modified_mass(U, m.R);
    // G is identified with R, so Z = U/G coincides with the modified mass
    m.Z = m.U_modified;
    m.sigma = sigma_fn(U, 1.0, 0.0);
    return m;
}

}  // namespace pdm
