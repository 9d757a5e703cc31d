#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "pdm/error.hpp"
#include "pdm/expr.hpp"

using namespace pdm;

namespace {

nlohmann::json load_corpus()
{
    std::ifstream in(std::string(PDM_SOURCE_DIR) + "/tests/data/expr_corpus.json");
    REQUIRE(in.good());
    return nlohmann::json::parse(in);
}

// Parser literals are never negative; negation is a separate node.
NodePtr random_tree(std::mt19937_64& rng, int depth)
{
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
    std::uniform_real_distribution<double> lit(0.0, 50.0);
    switch (pick(rng)) {
    case 0: {
        double v = lit(rng);
        if (rng() % 3 == 0)
            v = std::floor(v);
        if (rng() % 7 == 0)
            v *= 1e-7;  // exercises exponent notation in the printer
        return make_number(v);
    }
    case 1: return make_var();
    case 2: return make_unary(random_tree(rng, depth - 1));
    case 3: return make_binary(NodeType::Add, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 4: return make_binary(NodeType::Sub, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 5: return make_binary(NodeType::Mul, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 6: return make_binary(NodeType::Div, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 7: return make_binary(NodeType::Pow, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    default: {
        const Func fs[] = {Func::Exp, Func::Ln, Func::Sin, Func::Cos, Func::Sinh,
                           Func::Cosh, Func::Sqrt, Func::Abs, Func::Atan};
        return make_call(fs[rng() % 9], random_tree(rng, depth - 1));
    }
    }
}

}  // namespace

TEST_CASE("basic evaluation and errors")
{
    CHECK(eval_expr(parse_expr("x^2 + 1"), 2.0) == 5.0);
    CHECK(eval_expr(parse_expr("exp(0)"), 12.5) == 1.0);
    CHECK(eval_expr(parse_expr("sqrt(x)"), 4.0) == 2.0);
    CHECK(eval_expr(parse_expr("cosh(x)"), 0.0) == 1.0);
    try {
        parse_expr("2 *");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ErrorKind::Syntax);
        CHECK(e.offset() == 3);
    }
    CHECK_THROWS_AS(eval_expr(parse_expr("1/(x-1)"), 1.0), Error);
}

TEST_CASE("golden corpus")
{
    const auto corpus = load_corpus();
    const auto& cases = corpus.at("cases");
    REQUIRE(cases.size() >= 40);
    std::size_t values = 0, parse_errors = 0, eval_errors = 0;
    for (const auto& c : cases) {
        const std::string src = c.at("source");
        CAPTURE(src);
        if (c.contains("error")) {
            ++parse_errors;
            bool thrown = false;
            try {
                parse_expr(src);
            } catch (const ParseError& e) {
                thrown = true;
                CHECK(std::string(kind_name(e.kind())) == c.at("error").get<std::string>());
                CHECK(e.offset() == c.at("offset").get<std::size_t>());
            }
            CHECK(thrown);
        } else if (c.contains("eval_error")) {
            ++eval_errors;
            const Expression e = parse_expr(src);
            bool thrown = false;
            try {
                eval_expr(e, c.at("x").get<double>());
            } catch (const Error& err) {
                thrown = true;
                CHECK(std::string(kind_name(err.kind())) == c.at("eval_error").get<std::string>());
            }
            CHECK(thrown);
        } else {
            ++values;
            const double want = c.at("value");
            const double got = eval_expr(parse_expr(src), c.at("x").get<double>());
            CHECK(got == doctest::Approx(want).epsilon(1e-14));
        }
    }
    CHECK(values > 0);
    CHECK(parse_errors > 0);
    CHECK(eval_errors > 0);
}

TEST_CASE("precedence and associativity")
{
    CHECK(eval_expr(parse_expr("2^3^2"), 0) == 512.0);
    CHECK(eval_expr(parse_expr("-x^2"), 3.0) == -9.0);
    CHECK(eval_expr(parse_expr("10 - 4 - 3"), 0) == 3.0);
    CHECK(eval_expr(parse_expr("64/4/2"), 0) == 8.0);
    CHECK(print_expr(parse_expr("1 + 2 * x")) == "(1 + (2 * x))");
}

TEST_CASE("print then parse gives the same tree on 1000 random trees")
{
    std::mt19937_64 rng(20261016);
    for (int i = 0; i < 1000; ++i) {
        const Expression e(random_tree(rng, 5));
        const std::string text = print_expr(e);
        CAPTURE(text);
        const Expression back = parse_expr(text);
        REQUIRE(structurally_equal(e, back));
        CHECK(print_expr(back) == text);
    }
}

TEST_CASE("binary operators evaluate like the host arithmetic")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(0.01, 100.0);
    for (int i = 0; i < 500; ++i) {
        const double a = d(rng), b = d(rng);
        auto lit = [](double v) {
            std::ostringstream os;
            os.precision(17);
            os << v;
            return os.str();
        };
        const std::string A = lit(a), B = lit(b);
        const double ap = std::stod(A), bp = std::stod(B);
        CHECK(eval_expr(parse_expr(A + " + " + B), 0) == ap + bp);
        CHECK(eval_expr(parse_expr(A + " - " + B), 0) == ap - bp);
        CHECK(eval_expr(parse_expr(A + " * " + B), 0) == ap * bp);
        CHECK(eval_expr(parse_expr(A + " / " + B), 0) == ap / bp);
        CHECK(eval_expr(parse_expr(A + " ^ " + B), 0) == std::pow(ap, bp));
    }
}

TEST_CASE("evaluation is deterministic and surfaces domain errors")
{
    const Expression e = parse_expr("ln(x) + sqrt(x) * atan(x)");
    CHECK(eval_expr(e, 2.0) == eval_expr(e, 2.0));
    CHECK_THROWS_AS(eval_expr(parse_expr("ln(x)"), -1.0), Error);
    CHECK_THROWS_AS(eval_expr(parse_expr("sqrt(x)"), -1e-300), Error);
    CHECK_THROWS_AS(eval_expr(Expression(), 0.0), Error);
}
