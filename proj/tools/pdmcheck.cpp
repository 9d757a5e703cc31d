// pdmcheck: run verification suites from a JSON config, or export plot data.
//
// exit status: 0 all requested suites passed, 1 a suite failed,
// 2 configuration, usage or I/O error.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pdm/config.hpp"
#include "pdm/error.hpp"
#include "pdm/io.hpp"
#include "pdm/suites.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

int verify(const std::string& config_path, const std::vector<std::string>& suites, const std::vector<std::string>& tols,
           const std::string& out, const std::string& format)
{
    pdm::RunConfig cfg = pdm::load_config(config_path);
    if (!suites.empty())
        pdm::select_suites(cfg, suites);
    for (const auto& t : tols)
        pdm::apply_tolerance_override(cfg, t);
    if (!format.empty())
        cfg.output.format = format;
    if (!out.empty())
        cfg.output.path = out;

    const auto results = pdm::run_suites(cfg);

    std::string body;
    if (cfg.output.format == "json")
        body = pdm::report_json(cfg, results).dump(2) + "\n";
    else if (cfg.output.format == "csv")
        body = pdm::report_csv(results);
    else
        body = pdm::report_table(cfg, results);

    if (cfg.output.path.empty()) {
        std::cout << body;
    } else {
        std::ofstream os(cfg.output.path);
        if (!(os << body))
            throw pdm::Error(pdm::ErrorKind::Io, "cannot write '" + cfg.output.path + "'");
        // the table always reaches the terminal
        if (cfg.output.format != "table")
            std::cout << pdm::report_table(cfg, results);
    }
    for (const auto& r : results)
        if (!r.pass)
            std::cerr << "suite " << r.name << " failed" << (r.error.empty() ? "" : ": " + r.error) << '\n';
    return pdm::all_pass(results) ? kExitPass : kExitFail;
}

int export_data(const std::string& config_path, const std::string& what, const std::string& out)
{
    const pdm::RunConfig cfg = pdm::load_config(config_path);
    for (const auto& p : pdm::export_plotdata(cfg, what, out.empty() ? "." : out))
        std::cout << p << '\n';
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Verification toolkit for pseudo-Hermitian position-dependent-mass Hamiltonians"};
    app.require_subcommand(1);

    std::string config_path, out, format, what;
    std::vector<std::string> suites, tols;

    auto* v = app.add_subcommand("verify", "run verification suites");
    v->add_option("--config", config_path, "JSON config file")->required();
    v->add_option("--suite", suites, "suite to run (repeatable); replaces the config list");
    v->add_option("--tol", tols, "tolerance override key=value (repeatable)");
    v->add_option("--out", out, "report path; standard output when absent");
    v->add_option("--format", format, "json, csv or table")->check(CLI::IsMember({"json", "csv", "table"}));

    auto* e = app.add_subcommand("export", "write CSV plot data");
    e->add_option("--config", config_path, "JSON config file")->required();
    e->add_option("--what", what, "potential, eigenfunctions, coordmap, conservation or matrix")->required();
    e->add_option("--out", out, "output directory (default: current directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (v->parsed())
            return verify(config_path, suites, tols, out, format);
        return export_data(config_path, what, out);
    } catch (const pdm::Error& err) {
        std::cerr << "error (" << pdm::kind_name(err.kind()) << "): " << err.what() << '\n';
        // numerical failures outside a suite count as configuration errors: the run never started
        return kExitConfig;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitConfig;
    }
}
