#include "pdm/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "pdm/error.hpp"

namespace pdm {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg)
{
    throw Error(ErrorKind::Config, path + ": " + msg);
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed)
{
    if (!obj.is_object())
        fail(path.empty() ? "<root>" : path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
        if (!ok)
            fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
    }
}

double get_number(const json& obj, const char* key, const std::string& path, double fallback)
{
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_number())
        fail(path + "." + key, "expected a number");
    return v.get<double>();
}

std::size_t get_count(const json& obj, const char* key, const std::string& path, std::size_t fallback)
{
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        fail(path + "." + key, "expected a non-negative integer");
    return v.get<std::size_t>();
}

bool get_bool(const json& obj, const char* key, const std::string& path, bool fallback)
{
    if (!obj.contains(key))
        return fallback;
    if (!obj.at(key).is_boolean())
        fail(path + "." + key, "expected true or false");
    return obj.at(key).get<bool>();
}

// Strings and plain numbers are both accepted where an expression is expected.
std::optional<std::string> get_expr_text(const json& obj, const char* key, const std::string& path)
{
    if (!obj.contains(key))
        return std::nullopt;
    const json& v = obj.at(key);
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_number()) {
        std::ostringstream os;
        os.precision(17);
        os << v.get<double>();
        return os.str();
    }
    fail(path + "." + key, "expected an expression string");
}

Expression checked_parse(const std::string& text, const std::string& path)
{
    try {
        return parse_expr(text);
    } catch (const Error& e) {
        fail(path, std::string(kind_name(e.kind())) + ": " + e.what());
    }
}

std::vector<double> get_numbers(const json& obj, const char* key, const std::string& path,
                                std::vector<double> fallback)
{
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_array())
        fail(path + "." + key, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            fail(path + "." + key + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

GridConfig parse_grid(const json& obj, const std::string& path, GridConfig g)
{
    reject_unknown(obj, path, {"x_min", "x_max", "n"});
    g.x_min = get_number(obj, "x_min", path, g.x_min);
    g.x_max = get_number(obj, "x_max", path, g.x_max);
    g.n = get_count(obj, "n", path, g.n);
    if (!(g.x_max > g.x_min))
        fail(path, "x_max must exceed x_min");
    if (g.n < 5)
        fail(path + ".n", "at least 5 points required");
    return g;
}

void parse_model(const json& obj, RunConfig& cfg)
{
    reject_unknown(obj, "model", {"U", "a", "G", "g", "F", "epsilon", "gamma", "delta", "lambda1", "lambda2"});
    ModelSpec& m = cfg.model;
    for (const char* key : {"U", "a", "G", "g", "F"}) {
        auto text = get_expr_text(obj, key, "model");
        if (!text)
            continue;
        cfg.model_text[key] = *text;
        Expression e = checked_parse(*text, std::string("model.") + key);
        const std::string k = key;
        if (k == "U")
            m.U = e;
        else if (k == "a")
            m.a = e;
        else if (k == "G")
            m.G = e;
        else if (k == "g")
            m.g = e;
        else
            m.F = e;
    }
    m.epsilon = get_number(obj, "epsilon", "model", m.epsilon);
    m.gamma = get_number(obj, "gamma", "model", m.gamma);
    m.delta = get_number(obj, "delta", "model", m.delta);
    m.lambda1 = get_number(obj, "lambda1", "model", m.lambda1);
    m.lambda2 = get_number(obj, "lambda2", "model", m.lambda2);
}

void parse_field(const json& obj, const char* key, const std::string& path, std::string& re, std::string& im)
{
    if (!obj.contains(key))
        return;
    const std::string p = path + "." + key;
    const json& f = obj.at(key);
    reject_unknown(f, p, {"re", "im"});
    if (auto t = get_expr_text(f, "re", p))
        re = *t;
    if (auto t = get_expr_text(f, "im", p))
        im = *t;
    checked_parse(re, p + ".re");
    checked_parse(im, p + ".im");
}

bool touches_parity(const RunConfig& cfg, const std::string& suite)
{
    if (suite == "orthogonality")
        return true;
    if (suite == "conservation")
        return cfg.conservation.eta == EtaChoice::ExpParity;
    return false;
}

void check_tol_key(const std::string& key, const std::string& path)
{
    if (!default_tolerances().count(key))
        fail(path, "unknown tolerance key '" + key + "'");
}

}  // namespace

const std::vector<std::string>& known_suites()
{
    static const std::vector<std::string> names{
        "backlund_closure", "conservation", "coordmap",    "decomposition",    "factorization", "hermiticity",
        "intertwine_minus", "intertwine_plus", "orthogonality", "similarity", "spectrum",      "tau_check",
    };
    return names;
}

const std::map<std::string, double>& default_tolerances()
{
    static const std::map<std::string, double> tol{
        {"intertwine", 1e-4},   {"order_min", 1.5},     {"hermiticity", 1e-3}, {"tau", 1e-3},
        {"pairing", 1e-6},      {"spectrum", 2e-3},     {"orthogonality", 1e-6}, {"conservation", 1e-6},
        {"identity_4", 1e-3},   {"f_transform", 1e-4},  {"rs_product", 1e-12}, {"roundtrip", 1e-5},
        {"ode_4_18", 1e-5},     {"closure", 1e-5},      {"involution", 1e-10}, {"commute", 1e-4},
        {"branch_product", 1e-9}, {"pivot", 1e-4},
    };
    return tol;
}

double RunConfig::tol(const std::string& key) const
{
    auto it = tolerances.find(key);
    if (it != tolerances.end())
        return it->second;
    auto d = default_tolerances().find(key);
    if (d == default_tolerances().end())
        throw Error(ErrorKind::Config, "tolerances." + key + ": unknown tolerance key");
    return d->second;
}

RunConfig parse_config(const std::string& json_text)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Config, std::string("<root>: invalid JSON: ") + e.what());
    }
    reject_unknown(root, "", {"name", "model", "grid", "suites", "tolerances", "output", "spectrum", "conservation",
                              "orthogonality", "coordmap", "backlund"});
    RunConfig cfg;
    if (root.contains("name")) {
        if (!root["name"].is_string())
            fail("name", "expected a string");
        cfg.name = root["name"].get<std::string>();
    }
    if (!root.contains("model"))
        fail("model", "missing");
    parse_model(root["model"], cfg);
    if (root.contains("grid"))
        cfg.grid = parse_grid(root["grid"], "grid", cfg.grid);

    if (!root.contains("suites") || !root["suites"].is_array())
        fail("suites", "expected an array of suite names");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < root["suites"].size(); ++i) {
        const json& s = root["suites"][i];
        if (!s.is_string())
            fail("suites[" + std::to_string(i) + "]", "expected a string");
        names.push_back(s.get<std::string>());
    }

    if (root.contains("tolerances")) {
        const json& t = root["tolerances"];
        if (!t.is_object())
            fail("tolerances", "expected an object");
        for (auto it = t.begin(); it != t.end(); ++it) {
            const std::string p = "tolerances." + it.key();
            check_tol_key(it.key(), p);
            if (!it.value().is_number() || !(it.value().get<double>() > 0.0))
                fail(p, "expected a positive number");
            cfg.tolerances[it.key()] = it.value().get<double>();
        }
    }

    if (root.contains("output")) {
        const json& o = root["output"];
        reject_unknown(o, "output", {"format", "path"});
        if (o.contains("format")) {
            if (!o["format"].is_string())
                fail("output.format", "expected a string");
            cfg.output.format = o["format"].get<std::string>();
        }
        if (o.contains("path")) {
            if (!o["path"].is_string())
                fail("output.path", "expected a string");
            cfg.output.path = o["path"].get<std::string>();
        }
        if (cfg.output.format != "json" && cfg.output.format != "csv" && cfg.output.format != "table")
            fail("output.format", "expected json, csv or table");
    }

    if (root.contains("spectrum")) {
        const json& s = root["spectrum"];
        reject_unknown(s, "spectrum", {"expected", "pairing"});
        cfg.spectrum.expected = get_numbers(s, "expected", "spectrum", {});
        cfg.spectrum.pairing = get_bool(s, "pairing", "spectrum", true);
    }

    if (root.contains("conservation")) {
        const json& c = root["conservation"];
        const std::string p = "conservation";
        reject_unknown(c, p, {"grid", "psi1", "psi2", "dt", "steps", "eta"});
        ConservationConfig& cc = cfg.conservation;
        if (c.contains("grid"))
            cc.grid = parse_grid(c["grid"], p + ".grid", cfg.grid);
        parse_field(c, "psi1", p, cc.psi1_re, cc.psi1_im);
        parse_field(c, "psi2", p, cc.psi2_re, cc.psi2_im);
        cc.dt = get_number(c, "dt", p, cc.dt);
        if (!(cc.dt > 0.0))
            fail(p + ".dt", "must be positive");
        cc.steps = get_count(c, "steps", p, cc.steps);
        if (c.contains("eta")) {
            const std::string e = c["eta"].is_string() ? c["eta"].get<std::string>() : "";
            if (e == "plus")
                cc.eta = EtaChoice::Plus;
            else if (e == "identity")
                cc.eta = EtaChoice::Identity;
            else if (e == "exp_parity")
                cc.eta = EtaChoice::ExpParity;
            else
                fail(p + ".eta", "expected plus, identity or exp_parity");
        }
    }

    if (root.contains("orthogonality")) {
        const json& o = root["orthogonality"];
        reject_unknown(o, "orthogonality", {"count", "parity_flip"});
        cfg.orthogonality.count = get_count(o, "count", "orthogonality", cfg.orthogonality.count);
        if (cfg.orthogonality.count < 2)
            fail("orthogonality.count", "at least 2 eigenpairs required");
        cfg.orthogonality.parity_flip = get_bool(o, "parity_flip", "orthogonality", false);
    }

    if (root.contains("coordmap")) {
        const json& c = root["coordmap"];
        reject_unknown(c, "coordmap", {"F", "delta", "n"});
        if (auto t = get_expr_text(c, "F", "coordmap"))
            cfg.coordmap.F = *t;
        checked_parse(cfg.coordmap.F, "coordmap.F");
        cfg.coordmap.delta = get_number(c, "delta", "coordmap", cfg.coordmap.delta);
        cfg.coordmap.n = get_count(c, "n", "coordmap", cfg.coordmap.n);
        if (cfg.coordmap.n < 5)
            fail("coordmap.n", "at least 5 points required");
    }

    if (root.contains("backlund")) {
        const json& b = root["backlund"];
        reject_unknown(b, "backlund", {"x_min", "x_max", "n", "branch", "lambdas"});
        cfg.backlund.configured = true;
        json g = json::object();
        for (const char* k : {"x_min", "x_max", "n"})
            if (b.contains(k))
                g[k] = b[k];
        cfg.backlund.grid = parse_grid(g, "backlund", cfg.backlund.grid);
        if (b.contains("branch")) {
            const std::string s = b["branch"].is_string() ? b["branch"].get<std::string>() : "";
            if (s == "plus")
                cfg.backlund.branch = Branch::Plus;
            else if (s == "minus")
                cfg.backlund.branch = Branch::Minus;
            else
                fail("backlund.branch", "expected plus or minus");
        }
        cfg.backlund.lambdas = get_numbers(b, "lambdas", "backlund", cfg.backlund.lambdas);
        if (cfg.backlund.lambdas.size() != 3)
            fail("backlund.lambdas", "expected three values");
        for (double l : cfg.backlund.lambdas)
            if (l == 0.0)
                fail("backlund.lambdas", "values must be non-zero");
    }

    select_suites(cfg, names);
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::Io, "cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void apply_tolerance_override(RunConfig& cfg, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw Error(ErrorKind::Config, "--tol " + assignment + ": expected key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string path = "tolerances." + key;
    check_tol_key(key, path);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(assignment.substr(eq + 1), &used);
    } catch (const std::exception&) {
        fail(path, "expected a number");
    }
    if (used != assignment.size() - eq - 1 || !(v > 0.0))
        fail(path, "expected a positive number");
    cfg.tolerances[key] = v;
}

void select_suites(RunConfig& cfg, const std::vector<std::string>& names)
{
    const auto& known = known_suites();
    std::set<std::string> seen;
    std::vector<std::string> out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (std::find(known.begin(), known.end(), names[i]) == known.end())
            fail("suites[" + std::to_string(i) + "]", "unknown suite '" + names[i] + "'");
        if (seen.insert(names[i]).second)
            out.push_back(names[i]);
    }
    if (out.empty())
        fail("suites", "no suites selected");
    std::sort(out.begin(), out.end());
    const double mid = 0.5 * (cfg.grid.x_min + cfg.grid.x_max);
    const double span = cfg.grid.x_max - cfg.grid.x_min;
    for (const auto& s : out)
        if (touches_parity(cfg, s) && std::fabs(mid) > 1e-12 * span)
            fail("grid", "suite '" + s + "' uses parity and needs a symmetric grid");
    cfg.suites = std::move(out);
}

}  // namespace pdm
