#include "pdm/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>

#include "pdm/backlund.hpp"
#include "pdm/coordmap.hpp"
#include "pdm/error.hpp"
#include "pdm/operators.hpp"
#include "pdm/verify.hpp"

namespace pdm {

namespace {

const cplx I(0.0, 1.0);

Metric check(const std::string& key, double value, const std::string& cmp, double threshold)
{
    Metric m{key, value, threshold, cmp, true};
    if (cmp == "<")
        m.pass = value < threshold;
    else if (cmp == "<=")
        m.pass = value <= threshold;
    else if (cmp == ">=")
        m.pass = value >= threshold;
    else if (cmp == "==")
        m.pass = value == threshold;
    // NaN fails every comparison above, which is the verdict we want
    return m;
}

Metric info(const std::string& key, double value) { return Metric{key, value, 0.0, "info", true}; }

class Runner {
public:
    explicit Runner(const RunConfig& cfg) : cfg_(cfg) {}

    SuiteResult run(const std::string& name)
    {
        SuiteResult r;
        r.name = name;
        try {
            dispatch(name, r);
        } catch (const Error& e) {
            r.error = std::string(kind_name(e.kind())) + ": " + e.what();
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        r.pass = r.error.empty() &&
                 std::all_of(r.metrics.begin(), r.metrics.end(), [](const Metric& m) { return m.pass; });
        return r;
    }

private:
    const RunConfig& cfg_;
    std::map<std::size_t, std::shared_ptr<OperatorBundle>> bundles_;
    std::map<std::size_t, std::shared_ptr<SimilarityPipeline>> pipelines_;

    GridPtr grid(std::size_t n) const { return make_grid(cfg_.grid.x_min, cfg_.grid.x_max, n); }

    const OperatorBundle& bundle(std::size_t n)
    {
        auto& slot = bundles_[n];
        if (!slot)
            slot = std::make_shared<OperatorBundle>(build_bundle(cfg_.model, grid(n)));
        return *slot;
    }

    const SimilarityPipeline& pipeline(std::size_t n)
    {
        auto& slot = pipelines_[n];
        if (!slot)
            slot = std::make_shared<SimilarityPipeline>(build_similarity_pipeline(cfg_.model, grid(n)));
        return *slot;
    }

    void dispatch(const std::string& name, SuiteResult& r)
    {
        if (name == "hermiticity")
            hermiticity(r);
        else if (name == "intertwine_plus")
            refined(r, "intertwine", [this](std::size_t n) {
                const auto& b = bundle(n);
                return intertwining_residual(b.eta_plus, b.H);
            });
        else if (name == "intertwine_minus")
            refined(r, "intertwine", [this](std::size_t n) {
                const auto& b = bundle(n);
                return intertwining_residual(b.eta_minus, b.H_minus);
            });
        else if (name == "tau_check")
            tau(r);
        else if (name == "spectrum")
            spectral(r);
        else if (name == "orthogonality")
            orthogonality(r);
        else if (name == "conservation")
            conservation(r);
        else if (name == "factorization")
            refined(r, "identity_4", [this](std::size_t n) {
                const auto& p = pipeline(n);
                return factorization_residual(p.eta_plus, p.eta_minus, p.eta_minus_dag, p.U, p.R);
            });
        else if (name == "decomposition")
            refined(r, "identity_4", [this](std::size_t n) {
                const auto& p = pipeline(n);
                return decomposition_residual(p.eta_plus, p.eta_minus, p.eta_minus_dag, p.U, p.R);
            });
        else if (name == "similarity")
            refined(r, "identity_4", [this](std::size_t n) {
                const auto& p = pipeline(n);
                return similarity_residual(p.zeta, p.eta_minus, p.R);
            });
        else if (name == "coordmap")
            coordmap(r);
        else if (name == "backlund_closure")
            backlund(r);
        else
            throw Error(ErrorKind::Config, "suites: unknown suite '" + name + "'");
    }

    // Residual at the configured n below tolerance, and order of decay over
    // the trio unless every level already sits at rounding level.
    void refined(SuiteResult& r, const std::string& tol_key, const std::function<ResidualReport(std::size_t)>& at)
    {
        Refinement ref;
        for (std::size_t n : refinement_trio(cfg_.grid.n)) {
            const ResidualReport rep = at(n);
            ref.n.push_back(n);
            ref.relative.push_back(rep.relative);
            ref.floor.push_back(rep.roundoff_floor);
            if (n == cfg_.grid.n)
                r.metrics.push_back(info("absolute", rep.absolute));
        }
        ref.orders = observed_orders(ref.relative);
        r.metrics.push_back(check("relative", ref.relative[1], "<", cfg_.tol(tol_key)));
        r.metrics.push_back(info("roundoff_floor", ref.floor[1]));
        if (ref.roundoff_limited())
            r.metrics.push_back(info("order_min", ref.min_order()));
        else
            r.metrics.push_back(check("order_min", ref.min_order(), ">=", cfg_.tol("order_min")));
        r.metrics.push_back(info("roundoff_limited", ref.roundoff_limited() ? 1.0 : 0.0));
        std::vector<double> ns(ref.n.begin(), ref.n.end());
        r.series["n"] = ns;
        r.series["relative"] = ref.relative;
        r.series["orders"] = ref.orders;
    }

    void hermiticity(SuiteResult& r)
    {
        const double tol = cfg_.tol("hermiticity");
        const auto& b = bundle(cfg_.grid.n);
        const HermiticityReport ep = hermiticity_class(b.eta_plus, tol);
        const HermiticityReport em = hermiticity_class(b.eta_minus, tol);
        const HermiticityReport h = hermiticity_class(b.H, tol);
        const HermiticityReport hh = hermiticity_class(b.h_her, tol);
        r.metrics.push_back(check("eta_plus_hermitian_defect", ep.hermitian_defect, "<", tol));
        r.metrics.push_back(check("eta_minus_anti_hermitian_defect", em.anti_hermitian_defect, "<", tol));
        r.metrics.push_back(info("H_hermitian_defect", h.hermitian_defect));
        r.metrics.push_back(info("h_her_hermitian_defect", hh.hermitian_defect));
        r.metrics.push_back(info("identity_intertwining", intertwining_residual(identity_operator(b.H.grid), b.H).relative));
        r.series["class_codes"] = {static_cast<double>(ep.cls), static_cast<double>(em.cls), static_cast<double>(h.cls),
                                   static_cast<double>(hh.cls)};
    }

    void tau(SuiteResult& r)
    {
        const auto& b = bundle(cfg_.grid.n);
        const ResidualReport t = tau_residual(b.H, b.alpha);
        r.metrics.push_back(check("relative", t.relative, "<", cfg_.tol("tau")));
        r.metrics.push_back(info("absolute", t.absolute));
    }

    void spectral(SuiteResult& r)
    {
        const auto& b = bundle(cfg_.grid.n);
        const SpectralReport sp = spectrum(b.H);
        const auto& ex = cfg_.spectrum.expected;
        if (ex.size() > sp.eigenvalues.size())
            throw Error(ErrorKind::InvalidArgument, "spectrum.expected: more values than eigenvalues");
        double worst = 0.0;
        for (std::size_t i = 0; i < ex.size(); ++i)
            worst = std::max(worst, std::abs(sp.eigenvalues[i] - cplx(ex[i], 0.0)));
        if (!ex.empty())
            r.metrics.push_back(check("max_deviation", worst, "<", cfg_.tol("spectrum")));
        if (cfg_.spectrum.pairing)
            r.metrics.push_back(check("conjugate_pair_defect", sp.conjugate_pair_defect, "<", cfg_.tol("pairing")));
        else
            r.metrics.push_back(info("conjugate_pair_defect", sp.conjugate_pair_defect));
        r.metrics.push_back(info("max_imag", sp.reality_max_imag));
        const std::size_t k = std::min<std::size_t>(std::max<std::size_t>(ex.size(), 10), sp.eigenvalues.size());
        std::vector<double> re, im;
        for (std::size_t i = 0; i < k; ++i) {
            re.push_back(sp.eigenvalues[i].real());
            im.push_back(sp.eigenvalues[i].imag());
        }
        r.series["lowest_re"] = re;
        r.series["lowest_im"] = im;
    }

    void orthogonality(SuiteResult& r)
    {
        const auto& b = bundle(cfg_.grid.n);
        if (b.eta_exp_parity.dim() == 0)
            throw Error(ErrorKind::ParityViolation, "exp-parity metric unavailable: the gauge phase is not odd");
        const std::size_t count = cfg_.orthogonality.count;
        const SpectralReport sp = lowest_eigenpairs(b.H, count);
        const GridPtr& g = b.H.grid;
        std::vector<SampledFunction> psi;
        for (std::size_t j = 0; j < count; ++j) {
            SampledFunction p{g, sp.vectors.col(static_cast<Eigen::Index>(j))};
            p.values /= l2_norm(p);
            psi.push_back(p);
        }
        double worst = 0.0;
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t j = 0; j < count; ++j) {
                if (i == j || std::abs(sp.eigenvalues[i] - std::conj(sp.eigenvalues[j])) <= 1e-6)
                    continue;
                const cplx v = eta_orthogonality(psi[i], psi[j], b.eta_exp_parity, sp.eigenvalues[i],
                                                 sp.eigenvalues[j], cfg_.orthogonality.parity_flip);
                worst = std::max(worst, std::abs(v));
                ++pairs;
            }
        r.metrics.push_back(check("max_pair_value", worst, "<", cfg_.tol("orthogonality")));
        r.metrics.push_back(info("pairs", static_cast<double>(pairs)));
        std::vector<double> re, im;
        for (const cplx& e : sp.eigenvalues) {
            re.push_back(e.real());
            im.push_back(e.imag());
        }
        r.series["eigen_re"] = re;
        r.series["eigen_im"] = im;
    }

    void conservation(SuiteResult& r)
    {
        const ConservationConfig& cc = cfg_.conservation;
        const GridConfig gc = cc.grid.value_or(cfg_.grid);
        const GridPtr g = make_grid(gc.x_min, gc.x_max, gc.n);
        const OperatorBundle b = build_bundle(cfg_.model, g);
        OperatorMatrix eta;
        switch (cc.eta) {
        case EtaChoice::Plus:
            eta = b.eta_plus;
            break;
        case EtaChoice::Identity:
            eta = identity_operator(g);
            break;
        case EtaChoice::ExpParity:
            if (b.eta_exp_parity.dim() == 0)
                throw Error(ErrorKind::ParityViolation, "exp-parity metric unavailable: the gauge phase is not odd");
            eta = b.eta_exp_parity;
            break;
        }
        auto field = [&](const std::string& re, const std::string& im) {
            const SampledFunction a = sample_expr(parse_expr(re), g);
            const SampledFunction c = sample_expr(parse_expr(im), g);
            return SampledFunction{g, a.values + I * c.values};
        };
        const ContinuityRecord rec =
            evolve_conservation(b.H, eta, field(cc.psi1_re, cc.psi1_im), field(cc.psi2_re, cc.psi2_im), cc.dt, cc.steps);
        r.metrics.push_back(check("relative_drift", rec.relative_drift(), "<", cfg_.tol("conservation")));
        r.metrics.push_back(info("intertwining", intertwining_residual(eta, b.H).relative));
        if (!rec.rho_eta_integral.empty()) {
            r.metrics.push_back(info("initial_re", rec.rho_eta_integral.front().real()));
            r.metrics.push_back(info("initial_im", rec.rho_eta_integral.front().imag()));
        }
    }

    void coordmap(SuiteResult& r)
    {
        const CoordmapConfig& c = cfg_.coordmap;
        const GridPtr g = make_grid(cfg_.grid.x_min, cfg_.grid.x_max, c.n);
        const SampledFunction U = sample_U(cfg_.model, g);
        const SampledFunction F = sample_expr(parse_expr(c.F), g);
        const FTransformReport ft = check_f_transform(U, F, c.delta);
        r.metrics.push_back(check("f_transform", ft.residual.absolute, "<", cfg_.tol("f_transform")));
        r.metrics.push_back(info("f_transform_literal_gap", ft.literal_gap));

        const CoordinateMap map = build_coordinate_map(U, F, c.delta);
        const double rs = (map.R.values.cwiseProduct(map.S.values).array() - 1.0).abs().maxCoeff();
        r.metrics.push_back(check("rs_product", rs, "<", cfg_.tol("rs_product")));
        r.metrics.push_back(check("roundtrip", xi_roundtrip_error(map.xi), "<", cfg_.tol("roundtrip")));

        // closed forms live on the Bäcklund domain, where |σ| stays clear of 4
        if (!cfg_.backlund.configured)
            return;
        const GridConfig& bg = cfg_.backlund.grid;
        const GridPtr gb = make_grid(bg.x_min, bg.x_max, bg.n);
        const SampledFunction sigma = sigma_fn(cfg_.model.U, gb, cfg_.model.lambda1, cfg_.model.lambda2);
        const SampledFunction Ub = sample_U(cfg_.model, gb);
        const SampledFunction Rp = R_closed_form(sigma, Branch::Plus);
        const SampledFunction Rm = R_closed_form(sigma, Branch::Minus);
        const double ode = std::max(ode_residual_4_18(Rp, Ub).absolute, ode_residual_4_18(Rm, Ub).absolute);
        r.metrics.push_back(check("ode_4_18", ode, "<", cfg_.tol("ode_4_18")));
        const double prod = (Rp.values.cwiseProduct(Rm.values).array() - 1.0).abs().maxCoeff();
        r.metrics.push_back(check("branch_product", prod, "<", cfg_.tol("branch_product")));
    }

    void backlund(SuiteResult& r)
    {
        const BacklundConfig& bc = cfg_.backlund;
        const GridPtr g = make_grid(bc.grid.x_min, bc.grid.x_max, bc.grid.n);
        const SampledFunction sigma = sigma_fn(cfg_.model.U, g, cfg_.model.lambda1, cfg_.model.lambda2);
        const SampledFunction R = R_closed_form(sigma, bc.branch);
        const PivotSolution pivot = make_pivot(R);
        const OdeFamily fam = constant_mass_family();
        const BacklundChain chain = build_chain(fam, pivot, bc.lambdas);

        const ResidualReport base = stage_residual(chain.stages.front(), pivot);
        r.metrics.push_back(check("pivot_residual", base.relative, "<", cfg_.tol("pivot")));
        double worst_stage = 0.0, worst_lambda = 0.0;
        for (std::size_t i = 1; i < chain.stages.size(); ++i) {
            worst_stage = std::max(worst_stage, stage_residual(chain.stages[i], pivot).relative);
            worst_lambda = std::max(worst_lambda, chain.stages[i].lambda_defect);
        }
        r.metrics.push_back(info("stage_residual_max", worst_stage));
        r.metrics.push_back(info("lambda_defect_max", worst_lambda));

        const ClosureReport cl = closure_check(chain);
        r.metrics.push_back(check("product_defect", cl.product_defect, "<", cfg_.tol("closure")));
        r.metrics.push_back(check("slope_defect", cl.slope_defect, "<", cfg_.tol("closure")));
        r.metrics.push_back(info("x_defect", cl.x_defect));
        r.metrics.push_back(info("R_defect", cl.R_defect));
        r.metrics.push_back(info("x_affine_defect", cl.x_affine_defect));
        r.metrics.push_back(info("R_affine_defect", cl.R_affine_defect));
        r.metrics.push_back(check("s_involution", s_involution_defect(fam, pivot), "<", cfg_.tol("involution")));
        r.metrics.push_back(check("commute", commute_check(fam, pivot).relative, "<", cfg_.tol("commute")));
        const FamilyCount fc = count_distinct_families(fam, pivot);
        r.metrics.push_back(check("distinct_families", static_cast<double>(fc.distinct), "==", 6.0));
        r.series["lambdas"] = chain.lambdas;
    }
};

}  // namespace

std::vector<std::size_t> refinement_trio(std::size_t n)
{
    if (n < 9 || n % 2 == 0)
        throw Error(ErrorKind::InvalidArgument, "refinement needs an odd n of at least 9");
    return {(n + 1) / 2, n, 2 * n - 1};
}

SuiteResult run_suite(const RunConfig& cfg, const std::string& name)
{
    Runner runner(cfg);
    return runner.run(name);
}

std::vector<SuiteResult> run_suites(const RunConfig& cfg)
{
    Runner runner(cfg);
    std::vector<std::string> names = cfg.suites;
    std::sort(names.begin(), names.end());
    std::vector<SuiteResult> out;
    for (const auto& s : names)
        out.push_back(runner.run(s));
    return out;
}

bool all_pass(const std::vector<SuiteResult>& results)
{
    return std::all_of(results.begin(), results.end(), [](const SuiteResult& r) { return r.pass; });
}

}  // namespace pdm
