#include "pdm/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pdm/error.hpp"
#include "pdm/operators.hpp"
#include "pdm/verify.hpp"

namespace pdm {

namespace {

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> to_std(const RVec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::ofstream open_out(const std::string& path, bool binary = false)
{
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os)
        throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    return os;
}

void finish(std::ofstream& os, const std::string& path)
{
    os.flush();
    if (!os)
        throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

GridPtr model_grid(const RunConfig& cfg) { return make_grid(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.n); }

}  // namespace

ojson report_json(const RunConfig& cfg, const std::vector<SuiteResult>& results)
{
    ojson suites = ojson::array();
    for (const auto& r : results) {
        ojson s;
        s["name"] = r.name;
        s["pass"] = r.pass;
        if (!r.error.empty())
            s["error"] = r.error;
        ojson metrics = ojson::array();
        for (const auto& m : r.metrics) {
            ojson j;
            j["key"] = m.key;
            j["value"] = m.value;
            j["comparison"] = m.comparison;
            if (m.comparison != "info")
                j["threshold"] = m.threshold;
            j["pass"] = m.pass;
            metrics.push_back(j);
        }
        s["metrics"] = metrics;
        if (!r.series.empty()) {
            ojson series = ojson::object();
            for (const auto& [k, v] : r.series)
                series[k] = v;
            s["series"] = series;
        }
        suites.push_back(s);
    }
    ojson tol = ojson::object();
    for (const auto& [k, v] : default_tolerances())
        tol[k] = cfg.tol(k);

    ojson out;
    out["report"]["name"] = cfg.name;
    out["report"]["grid"] = {{"x_min", cfg.grid.x_min}, {"x_max", cfg.grid.x_max}, {"n", cfg.grid.n}};
    out["report"]["tolerances"] = tol;
    out["report"]["pass"] = all_pass(results);
    out["report"]["suites"] = suites;
    out["metadata"] = {{"tool", "pdmcheck"}, {"format_version", 1}};
    return out;
}

std::string report_csv(const std::vector<SuiteResult>& results)
{
    std::ostringstream os;
    os << "suite,key,value,comparison,threshold,pass\n";
    for (const auto& r : results) {
        if (!r.error.empty())
            os << r.name << ",error,nan,info,,0\n";
        for (const auto& m : r.metrics)
            os << r.name << ',' << m.key << ',' << num(m.value) << ',' << m.comparison << ','
               << (m.comparison == "info" ? "" : num(m.threshold)) << ',' << (m.pass ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string report_table(const RunConfig& cfg, const std::vector<SuiteResult>& results)
{
    std::ostringstream os;
    if (!cfg.name.empty())
        os << cfg.name << '\n';
    for (const auto& r : results) {
        os << (r.pass ? "PASS " : "FAIL ") << r.name << '\n';
        if (!r.error.empty())
            os << "    error: " << r.error << '\n';
        for (const auto& m : r.metrics) {
            os << "    " << std::left << std::setw(34) << m.key << std::right << std::setw(14) << std::setprecision(4)
               << std::scientific << m.value;
            if (m.comparison != "info")
                os << "  " << m.comparison << ' ' << std::setprecision(2) << m.threshold << (m.pass ? "" : "  <-- fail");
            os << '\n';
        }
        os << std::defaultfloat;
    }
    os << (all_pass(results) ? "all suites passed" : "some suites failed") << '\n';
    return os.str();
}

void write_csv(std::ostream& os, const SampledFunction& f, const std::string& re_name, const std::string& im_name)
{
    os << "x," << re_name << ',' << im_name << '\n';
    for (std::size_t i = 0; i < f.size(); ++i)
        os << num(f.grid->points[i]) << ',' << num(f[i].real()) << ',' << num(f[i].imag()) << '\n';
}

ojson to_json(const SampledFunction& f)
{
    ojson j;
    j["x"] = f.grid->points;
    j["re"] = to_std(f.real());
    j["im"] = to_std(f.imag());
    return j;
}

ojson to_json(const CoordinateMap& m)
{
    ojson j;
    j["branch"] = branch_name(m.branch);
    j["x"] = m.grid_x->points;
    j["R"] = to_std(m.R.real());
    j["S"] = to_std(m.S.real());
    j["xi"] = to_std(m.xi.real());
    j["U_modified"] = to_std(m.U_modified.real());
    return j;
}

ojson to_json(const BacklundChain& chain, const ClosureReport& closure)
{
    ojson stages = ojson::array();
    for (const auto& st : chain.stages) {
        ojson s;
        s["label"] = st.family.label;
        s["lambda"] = st.lambda;
        s["lambda_defect"] = st.lambda_defect;
        s["residual"] = stage_residual(st, chain.pivot).relative;
        s["X_range"] = {st.X.minCoeff(), st.X.maxCoeff()};
        s["Y_range"] = {st.Y.minCoeff(), st.Y.maxCoeff()};
        s["P_range"] = {st.P.minCoeff(), st.P.maxCoeff()};
        stages.push_back(s);
    }
    ojson j;
    j["domain"] = {chain.pivot.x->x_min, chain.pivot.x->x_max};
    j["n"] = chain.pivot.x->n;
    j["lambdas"] = chain.lambdas;
    j["stages"] = stages;
    j["closure"] = {{"product_defect", closure.product_defect}, {"slope_defect", closure.slope_defect},
                    {"pbb_defect", closure.pbb_defect},         {"x_defect", closure.x_defect},
                    {"R_defect", closure.R_defect},             {"x_affine_defect", closure.x_affine_defect},
                    {"R_affine_defect", closure.R_affine_defect}};
    return j;
}

void write_matrix_binary(std::ostream& os, const OperatorMatrix& m)
{
    const auto n = static_cast<std::uint64_t>(m.dim());
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    std::vector<double> row(2 * n);
    for (Eigen::Index r = 0; r < m.m.outerSize(); ++r) {
        std::fill(row.begin(), row.end(), 0.0);
        for (SpMat::InnerIterator it(m.m, r); it; ++it) {
            row[2 * static_cast<std::size_t>(it.col())] = it.value().real();
            row[2 * static_cast<std::size_t>(it.col()) + 1] = it.value().imag();
        }
        os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
}

OperatorMatrix read_matrix_binary(std::istream& is, const GridPtr& g)
{
    std::uint64_t n = 0;
    if (!is.read(reinterpret_cast<char*>(&n), sizeof n))
        throw Error(ErrorKind::Io, "matrix file truncated");
    if (g && g->n != n)
        throw Error(ErrorKind::GridMismatch, "matrix dimension does not match the grid");
    std::vector<Eigen::Triplet<cplx>> trips;
    std::vector<double> row(2 * n);
    for (std::uint64_t r = 0; r < n; ++r) {
        if (!is.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double))))
            throw Error(ErrorKind::Io, "matrix file truncated");
        for (std::uint64_t c = 0; c < n; ++c) {
            const cplx v(row[2 * c], row[2 * c + 1]);
            if (v != cplx(0.0))
                trips.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c), v);
        }
    }
    OperatorMatrix out;
    out.grid = g;
    out.m = SpMat(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    out.m.setFromTriplets(trips.begin(), trips.end());
    return out;
}

void write_matrix_csv(std::ostream& os, const OperatorMatrix& m, std::size_t max_n)
{
    const auto n = static_cast<std::size_t>(m.dim());
    if (n > max_n)
        throw Error(ErrorKind::InvalidArgument, "matrix too large for CSV (n = " + std::to_string(n) + ")");
    const CMat d(m.m);
    for (std::size_t c = 0; c < n; ++c)
        os << (c ? "," : "") << "re_" << c << ",im_" << c;
    os << '\n';
    for (Eigen::Index r = 0; r < d.rows(); ++r) {
        for (Eigen::Index c = 0; c < d.cols(); ++c)
            os << (c ? "," : "") << num(d(r, c).real()) << ',' << num(d(r, c).imag());
        os << '\n';
    }
}

const std::vector<std::string>& export_kinds()
{
    static const std::vector<std::string> kinds{"potential", "eigenfunctions", "coordmap", "conservation", "matrix"};
    return kinds;
}

std::vector<std::string> export_plotdata(const RunConfig& cfg, const std::string& what, const std::string& out_dir)
{
    const auto& kinds = export_kinds();
    if (std::find(kinds.begin(), kinds.end(), what) == kinds.end())
        throw Error(ErrorKind::Config, "what: unknown export kind '" + what + "'");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw Error(ErrorKind::Io, "cannot create '" + out_dir + "': " + ec.message());
    auto path = [&](const std::string& file) { return (std::filesystem::path(out_dir) / file).string(); };
    std::vector<std::string> written;

    if (what == "potential") {
        const PotentialPair pp = potentials(cfg.model, model_grid(cfg));
        const std::string p = path("potential.csv");
        auto os = open_out(p);
        write_csv(os, pp.V_plus, "ReV", "ImV");
        finish(os, p);
        written.push_back(p);
        const std::string pj = path("potential.json");
        auto js = open_out(pj);
        js << to_json(pp.V_plus).dump(1) << '\n';
        finish(js, pj);
        written.push_back(pj);
    } else if (what == "eigenfunctions") {
        const GridPtr g = model_grid(cfg);
        const OperatorBundle b = build_bundle(cfg.model, g);
        const std::size_t k = std::max<std::size_t>(cfg.spectrum.expected.size(), 5);
        const SpectralReport sp = lowest_eigenpairs(b.H, k);
        const std::string pv = path("eigenvalues.csv");
        auto ev = open_out(pv);
        ev << "index,re,im\n";
        for (std::size_t j = 0; j < k; ++j)
            ev << j << ',' << num(sp.eigenvalues[j].real()) << ',' << num(sp.eigenvalues[j].imag()) << '\n';
        finish(ev, pv);
        written.push_back(pv);
        const std::string pf = path("eigenfunctions.csv");
        auto ef = open_out(pf);
        ef << 'x';
        for (std::size_t j = 0; j < k; ++j)
            ef << ",re_" << j << ",im_" << j;
        ef << '\n';
        std::vector<CVec> cols;
        for (std::size_t j = 0; j < k; ++j) {
            SampledFunction p{g, sp.vectors.col(static_cast<Eigen::Index>(j))};
            cols.push_back(p.values / l2_norm(p));
        }
        for (std::size_t i = 0; i < g->n; ++i) {
            ef << num(g->points[i]);
            for (const auto& c : cols)
                ef << ',' << num(c[static_cast<Eigen::Index>(i)].real()) << ',' << num(c[static_cast<Eigen::Index>(i)].imag());
            ef << '\n';
        }
        finish(ef, pf);
        written.push_back(pf);
    } else if (what == "coordmap") {
        const GridPtr g = make_grid(cfg.grid.x_min, cfg.grid.x_max, cfg.coordmap.n);
        const CoordinateMap m = build_coordinate_map(sample_U(cfg.model, g), sample_expr(parse_expr(cfg.coordmap.F), g),
                                                     cfg.coordmap.delta);
        const std::string p = path("coordmap.csv");
        auto os = open_out(p);
        os << "x,R,xi,U_modified\n";
        for (std::size_t i = 0; i < g->n; ++i)
            os << num(g->points[i]) << ',' << num(m.R[i].real()) << ',' << num(m.xi[i].real()) << ','
               << num(m.U_modified[i].real()) << '\n';
        finish(os, p);
        written.push_back(p);
        const std::string pj = path("coordmap.json");
        auto js = open_out(pj);
        js << to_json(m).dump(1) << '\n';
        finish(js, pj);
        written.push_back(pj);
    } else if (what == "conservation") {
        const ConservationConfig& cc = cfg.conservation;
        const GridConfig gc = cc.grid.value_or(cfg.grid);
        const GridPtr g = make_grid(gc.x_min, gc.x_max, gc.n);
        const OperatorBundle b = build_bundle(cfg.model, g);
        OperatorMatrix eta = cc.eta == EtaChoice::Plus       ? b.eta_plus
                             : cc.eta == EtaChoice::Identity ? identity_operator(g)
                                                             : b.eta_exp_parity;
        if (eta.dim() == 0)
            throw Error(ErrorKind::ParityViolation, "exp-parity metric unavailable: the gauge phase is not odd");
        auto field = [&](const std::string& re, const std::string& im) {
            return SampledFunction{g, sample_expr(parse_expr(re), g).values +
                                          cplx(0.0, 1.0) * sample_expr(parse_expr(im), g).values};
        };
        const ContinuityRecord rec =
            evolve_conservation(b.H, eta, field(cc.psi1_re, cc.psi1_im), field(cc.psi2_re, cc.psi2_im), cc.dt, cc.steps);
        const std::string p = path("conservation.csv");
        auto os = open_out(p);
        os << "t,Re,Im\n";
        for (std::size_t i = 0; i < rec.times.size(); ++i)
            os << num(rec.times[i]) << ',' << num(rec.rho_eta_integral[i].real()) << ','
               << num(rec.rho_eta_integral[i].imag()) << '\n';
        finish(os, p);
        written.push_back(p);
    } else {
        const OperatorBundle b = build_bundle(cfg.model, model_grid(cfg));
        const std::string p = path("H.bin");
        auto os = open_out(p, true);
        write_matrix_binary(os, b.H);
        finish(os, p);
        written.push_back(p);
        if (static_cast<std::size_t>(b.H.dim()) <= 201) {
            const std::string pc = path("H.csv");
            auto cs = open_out(pc);
            write_matrix_csv(cs, b.H);
            finish(cs, pc);
            written.push_back(pc);
        }
    }
    return written;
}

}  // namespace pdm
