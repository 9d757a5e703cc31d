#include "pdm/backlund.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "pdm/coordmap.hpp"
#include "pdm/error.hpp"

namespace pdm {

namespace {

RVec fd(const GridPtr& g, const RVec& v) { return derivative(sample_real(g, v)).real(); }

double interior_max(const RVec& v, std::size_t band = kInteriorBand)
{
    double m = 0.0;
    const auto b = static_cast<Eigen::Index>(band);
    for (Eigen::Index i = b; i + b < v.size(); ++i)
        m = std::max(m, std::fabs(v[i]));
    return m;
}

std::vector<double> as_vector(const RVec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::function<double(double)> tabulate(const RVec& x, const RVec& y)
{
    auto f = std::make_shared<MonotoneInterp>(as_vector(x), as_vector(y));
    return [f](double t) { return (*f)(t); };
}

RVec apply(const std::function<double(double)>& f, const RVec& v)
{
    RVec out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out[i] = f(v[i]);
    return out;
}

// Max residual of y ≈ c0 + c1·x by least squares.
double affine_fit_defect(const RVec& x, const RVec& y)
{
    Eigen::MatrixXd A(x.size(), 2);
    A.col(0) = x;
    A.col(1).setOnes();
    const Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
    return interior_max(A * c - y, 0);
}

}  // namespace

double chi_cm(double R)
{
    if (R == 0.0 || R == 1.0)
        throw Error(ErrorKind::SingularR, "chi has poles at R = 0 and R = 1");
    return (R - 3.0) / (2.0 * R * (R - 1.0));
}

double chi_cm_prime(double R)
{
    if (R == 0.0 || R == 1.0)
        throw Error(ErrorKind::SingularR, "chi has poles at R = 0 and R = 1");
    const double d = 2.0 * R * (R - 1.0);
    return -2.0 * (R * R - 6.0 * R + 3.0) / (d * d);
}

OdeFamily constant_mass_family()
{
    OdeFamily f;
    f.chi = chi_cm;
    f.chi_prime = std::function<double(double)>(chi_cm_prime);
    f.phi = [](double p) { return p * p; };
    f.label = "{chi,phi}";
    return f;
}

PivotSolution make_pivot(const SampledFunction& R)
{
    PivotSolution p;
    p.x = R.grid;
    p.R = sample_real(R.grid, R.real());
    p.Rp = derivative(p.R, 1);
    p.Rpp = derivative(p.R, 2);
    return p;
}

BacklundStage initial_stage(const OdeFamily& fam, const PivotSolution& pivot)
{
    BacklundStage st;
    st.family = fam;
    st.X = RVec::Map(pivot.x->points.data(), static_cast<Eigen::Index>(pivot.x->n));
    st.Y = pivot.R.real();
    st.P = pivot.Rp.real();
    st.lambda = 1.0;
    return st;
}

OdeFamily s_transform(const OdeFamily& fam)
{
    OdeFamily out;
    out.chi = fam.chi;
    out.chi_prime = fam.chi_prime;
    const auto phi = fam.phi;
    out.phi = [phi](double q) {
        if (q == 0.0)
            throw Error(ErrorKind::Domain, "phi# needs q != 0");
        return -q * q * q * phi(1.0 / q);
    };
    out.label = fam.label + "S";
    return out;
}

BacklundStage s_transform(const BacklundStage& st, const PivotSolution& pivot)
{
    (void)pivot;
    for (Eigen::Index i = 0; i < st.P.size(); ++i)
        if (st.P[i] == 0.0)
            throw Error(ErrorKind::Domain, "slope vanishes on the pivot; the roles cannot be exchanged");
    BacklundStage out;
    out.family = s_transform(st.family);
    // χ keeps its values but is now read as a function of the new dependent variable
    out.family.chi = tabulate(st.X, apply(st.family.chi, st.Y));
    out.family.chi_prime.reset();
    out.X = st.Y;
    out.Y = st.X;
    out.P = st.P.cwiseInverse();
    out.lambda = st.lambda;
    return out;
}

BacklundStage b_transform(const BacklundStage& st, const PivotSolution& pivot, double lambda)
{
    const GridPtr& g = pivot.x;
    const Eigen::Index n = st.Y.size();
    const RVec chi = apply(st.family.chi, st.Y);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (chi[i] == 0.0 || !std::isfinite(chi[i]) || (chi[i] > 0.0) != (chi[0] > 0.0))
            throw Error(ErrorKind::Domain, "chi vanishes along the pivot at x = " + std::to_string(g->points[i]));
        if (st.P[i] == 0.0)
            throw Error(ErrorKind::Domain, "slope vanishes along the pivot at x = " + std::to_string(g->points[i]));
        const double ph = st.family.phi(st.P[i]);
        if (ph == 0.0 || !std::isfinite(ph))
            throw Error(ErrorKind::Domain, "phi vanishes along the pivot at x = " + std::to_string(g->points[i]));
    }

    const RVec dX = fd(g, st.X);
    // dX̄ = dP/φ(P) = χ(Y) dX along a solution
    const RVec Xbar = cumulative_integral(sample_real(g, chi.cwiseProduct(dX)), g->x_min).real();
    const RVec Ybar = lambda * (st.X.array() - st.X[0]).matrix();
    const RVec Pbar = lambda * chi.cwiseInverse();

    RVec chi_p(n);
    if (st.family.chi_prime) {
        chi_p = apply(*st.family.chi_prime, st.Y);
    } else {
        chi_p = fd(g, chi).cwiseQuotient(fd(g, st.Y));
    }
    const RVec phibar = (-lambda * chi_p.array() / chi.array().cube()).matrix();

    BacklundStage out;
    out.family.chi = tabulate(Ybar, st.P);
    out.family.phi = tabulate(Pbar, phibar);
    out.family.label = st.family.label + "B";
    out.X = Xbar;
    out.Y = Ybar;
    out.P = Pbar;
    out.lambda = lambda;

    const RVec Pnum = fd(g, Ybar).cwiseQuotient(fd(g, Xbar));
    out.lambda_defect = interior_max((Pnum.cwiseProduct(chi).array() - lambda).matrix());
    return out;
}

ResidualReport stage_residual(const BacklundStage& st, const PivotSolution& pivot, std::size_t band)
{
    const GridPtr& g = pivot.x;
    const RVec dPdX = fd(g, st.P).cwiseQuotient(fd(g, st.X));
    RVec rhs(st.P.size()), theta(st.P.size());
    for (Eigen::Index i = 0; i < rhs.size(); ++i) {
        rhs[i] = st.family.chi(st.Y[i]) * st.family.phi(st.P[i]);
        theta[i] = st.family.theta(st.X[i]) * st.P[i];
    }
    ResidualReport r;
    r.name = "stage " + st.family.label;
    r.grid_n = g->n;
    r.interior_band = band;
    r.absolute = interior_max(dPdX + theta - rhs, band);
    const double scale = std::max(interior_max(dPdX, band), interior_max(rhs, band));
    r.relative = scale > 0.0 ? r.absolute / scale : r.absolute;
    return r;
}

BacklundChain build_chain(const OdeFamily& fam, const PivotSolution& pivot, const std::vector<double>& lambdas)
{
    BacklundChain c;
    c.pivot = pivot;
    c.lambdas = lambdas;
    c.stages.push_back(initial_stage(fam, pivot));
    for (double l : lambdas)
        c.stages.push_back(b_transform(c.stages.back(), pivot, l));
    return c;
}

ClosureReport closure_check(const BacklundChain& chain)
{
    if (chain.stages.size() < 4)
        throw Error(ErrorKind::IncompleteChain, "closure needs three applications of B; chain has "
                                                    + std::to_string(chain.stages.size() - 1));
    const PivotSolution& pv = chain.pivot;
    const RVec x = RVec::Map(pv.x->points.data(), static_cast<Eigen::Index>(pv.x->n));
    const RVec R = pv.R.real();
    const RVec Rp = pv.Rp.real();
    const RVec chi = apply(chain.stages[0].family.chi, R);
    const RVec& p2 = chain.stages[2].P;
    const RVec& p3 = chain.stages[3].P;
    const double lambda2 = chain.stages[2].lambda;

    ClosureReport rep;
    rep.product_defect = interior_max((p2.cwiseProduct(Rp).cwiseProduct(chi).array() - 1.0).matrix());
    rep.slope_defect = interior_max(lambda2 * p3.cwiseProduct(chi) - Rp);
    rep.pbb_defect = interior_max(p2 - Rp.cwiseProduct(chi).cwiseInverse());
    rep.x_defect = interior_max(chain.stages[3].X - x, 0);
    rep.R_defect = interior_max(chain.stages[3].Y - R, 0);
    rep.x_affine_defect = affine_fit_defect(x, chain.stages[3].X);
    rep.R_affine_defect = affine_fit_defect(R, chain.stages[3].Y);
    rep.summary.name = "backlund_closure";
    rep.summary.grid_n = pv.x->n;
    rep.summary.absolute = std::max(rep.product_defect, rep.slope_defect);
    rep.summary.relative = rep.summary.absolute;
    return rep;
}

std::vector<std::size_t> probe_nodes(std::size_t n, std::size_t count, std::size_t band)
{
    if (n < 2 * band + 2)
        throw Error(ErrorKind::TooFewPoints, "pivot too short for probing");
    const std::size_t lo = band;
    const std::size_t hi = n - 1 - band;
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < count; ++k) {
        const double t = count == 1 ? 0.5 : static_cast<double>(k) / static_cast<double>(count - 1);
        const auto i = static_cast<std::size_t>(std::lround(static_cast<double>(lo) + t * static_cast<double>(hi - lo)));
        if (out.empty() || out.back() != i)
            out.push_back(i);
    }
    return out;
}

double family_defect(const BacklundStage& a, const BacklundStage& b, const std::vector<std::size_t>& nodes)
{
    double dchi = 0.0, dphi = 0.0, schi = 0.0, sphi = 0.0;
    for (std::size_t i : nodes) {
        const auto k = static_cast<Eigen::Index>(i);
        const double ca = a.family.chi(a.Y[k]), cb = b.family.chi(b.Y[k]);
        const double pa = a.family.phi(a.P[k]), pb = b.family.phi(b.P[k]);
        dchi = std::max(dchi, std::fabs(ca - cb));
        dphi = std::max(dphi, std::fabs(pa - pb));
        schi = std::max({schi, std::fabs(ca), std::fabs(cb)});
        sphi = std::max({sphi, std::fabs(pa), std::fabs(pb)});
    }
    const double rc = schi > 0.0 ? dchi / schi : dchi;
    const double rp = sphi > 0.0 ? dphi / sphi : dphi;
    return std::max(rc, rp);
}

double s_involution_defect(const OdeFamily& fam, const PivotSolution& pivot)
{
    const OdeFamily twice = s_transform(s_transform(fam));
    const RVec p = pivot.Rp.real();
    double d = 0.0, s = 0.0;
    for (std::size_t i : probe_nodes(pivot.x->n)) {
        const double q = p[static_cast<Eigen::Index>(i)];
        const double a = fam.phi(q), b = twice.phi(q);
        d = std::max(d, std::fabs(a - b));
        s = std::max(s, std::fabs(a));
    }
    return s > 0.0 ? d / s : d;
}

ResidualReport commute_check(const OdeFamily& fam, const PivotSolution& pivot, double lambda)
{
    const BacklundStage st0 = initial_stage(fam, pivot);
    const BacklundStage direct = b_transform(st0, pivot, lambda);
    const BacklundStage conj = s_transform(b_transform(s_transform(st0, pivot), pivot, lambda), pivot);
    ResidualReport r;
    r.name = "commute";
    r.grid_n = pivot.x->n;
    r.absolute = family_defect(conj, direct, probe_nodes(pivot.x->n));
    r.relative = r.absolute;
    return r;
}

FamilyCount count_distinct_families(const OdeFamily& fam, const PivotSolution& pivot, double lambda,
                                    std::size_t max_families, double tol)
{
    const std::vector<std::size_t> nodes = probe_nodes(pivot.x->n);
    std::vector<BacklundStage> found{initial_stage(fam, pivot)};
    std::deque<std::size_t> queue{0};
    FamilyCount out;
    while (!queue.empty() && found.size() < max_families) {
        const BacklundStage cur = found[queue.front()];
        queue.pop_front();
        for (int op = 0; op < 2 && found.size() < max_families; ++op) {
            BacklundStage next;
            try {
                next = op == 0 ? b_transform(cur, pivot, lambda) : s_transform(cur, pivot);
            } catch (const Error&) {
                continue;
            }
            bool seen = false;
            for (const BacklundStage& f : found)
                if (family_defect(next, f, nodes) < tol) {
                    seen = true;
                    break;
                }
            if (seen) {
                out.repeated = true;
                continue;
            }
            found.push_back(next);
            queue.push_back(found.size() - 1);
        }
    }
    out.distinct = found.size();
    for (const BacklundStage& f : found)
        out.labels.push_back(f.family.label);
    return out;
}

}  // namespace pdm
