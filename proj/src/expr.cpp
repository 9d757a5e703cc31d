#include "pdm/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstring>

#include "pdm/error.hpp"

namespace pdm {

namespace {

struct FuncEntry {
    const char* name;
    Func f;
};

constexpr std::array<FuncEntry, 9> kFuncs{{
    {"exp", Func::Exp},
    {"ln", Func::Ln},
    {"sin", Func::Sin},
    {"cos", Func::Cos},
    {"sinh", Func::Sinh},
    {"cosh", Func::Cosh},
    {"sqrt", Func::Sqrt},
    {"abs", Func::Abs},
    {"atan", Func::Atan},
}};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

// Recursive descent, one function per precedence level:
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := primary ('^' unary)?
class Parser {
public:
    explicit Parser(std::string_view s) : src_(s) {}

    NodePtr parse()
    {
        skip_ws();
        if (pos_ == src_.size())
            throw ParseError(ErrorKind::Syntax, pos_, "empty expression");
        NodePtr e = expr();
        skip_ws();
        if (pos_ != src_.size())
            throw ParseError(ErrorKind::Syntax, pos_, std::string("unexpected '") + src_[pos_] + "'");
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    void skip_ws()
    {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
            ++pos_;
    }

    char peek()
    {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    NodePtr expr()
    {
        NodePtr lhs = term();
        for (;;) {
            char c = peek();
            if (c != '+' && c != '-')
                return lhs;
            ++pos_;
            NodePtr rhs = term();
            lhs = make_binary(c == '+' ? NodeType::Add : NodeType::Sub, lhs, rhs);
        }
    }

    NodePtr term()
    {
        NodePtr lhs = unary();
        for (;;) {
            char c = peek();
            if (c != '*' && c != '/')
                return lhs;
            ++pos_;
            NodePtr rhs = unary();
            lhs = make_binary(c == '*' ? NodeType::Mul : NodeType::Div, lhs, rhs);
        }
    }

    NodePtr unary()
    {
        if (peek() == '-') {
            ++pos_;
            return make_unary(unary());
        }
        return power();
    }

    NodePtr power()
    {
        NodePtr base = primary();
        if (peek() == '^') {
            ++pos_;
            return make_binary(NodeType::Pow, base, unary());
        }
        return base;
    }

    NodePtr primary()
    {
        char c = peek();
        if (c == '\0')
            throw ParseError(ErrorKind::Syntax, pos_, "unexpected end of input");
        if (is_digit(c) || c == '.')
            return number();
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (peek() != ')')
                throw ParseError(ErrorKind::Syntax, pos_, "expected ')'");
            ++pos_;
            return e;
        }
        if (is_alpha(c))
            return identifier();
        throw ParseError(ErrorKind::Syntax, pos_, std::string("unexpected '") + c + "'");
    }

    NodePtr number()
    {
        std::size_t start = pos_;
        std::size_t i = pos_;
        bool digits = false;
        while (i < src_.size() && is_digit(src_[i])) {
            ++i;
            digits = true;
        }
        if (i < src_.size() && src_[i] == '.') {
            ++i;
            while (i < src_.size() && is_digit(src_[i])) {
                ++i;
                digits = true;
            }
        }
        if (!digits)
            throw ParseError(ErrorKind::Syntax, start, "malformed number");
        if (i < src_.size() && (src_[i] == 'e' || src_[i] == 'E')) {
            std::size_t j = i + 1;
            if (j < src_.size() && (src_[j] == '+' || src_[j] == '-'))
                ++j;
            if (j < src_.size() && is_digit(src_[j])) {
                while (j < src_.size() && is_digit(src_[j]))
                    ++j;
                i = j;
            }
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + i, v);
        if (ec != std::errc() || ptr != src_.data() + i || !std::isfinite(v))
            throw ParseError(ErrorKind::Syntax, start, "malformed number");
        pos_ = i;
        return make_number(v);
    }

    NodePtr identifier()
    {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (is_alpha(src_[pos_]) || is_digit(src_[pos_])))
            ++pos_;
        std::string_view id = src_.substr(start, pos_ - start);
        if (id == "x")
            return make_var();
        for (const auto& fe : kFuncs) {
            if (id == fe.name) {
                if (peek() != '(')
                    throw ParseError(ErrorKind::Syntax, pos_, std::string("expected '(' after ") + fe.name);
                ++pos_;
                NodePtr arg = expr();
                if (peek() != ')')
                    throw ParseError(ErrorKind::Syntax, pos_, "expected ')'");
                ++pos_;
                return make_call(fe.f, arg);
            }
        }
        throw ParseError(ErrorKind::UnknownIdentifier, start, "unknown identifier '" + std::string(id) + "'");
    }
};

[[noreturn]] void domain(const std::string& msg, double x)
{
    throw Error(ErrorKind::Domain, msg + " at x = " + std::to_string(x));
}

double eval_node(const Node& n, double x)
{
    switch (n.type) {
    case NodeType::Number: return n.value;
    case NodeType::Var: return x;
    case NodeType::Neg: return -eval_node(*n.kids[0], x);
    case NodeType::Add: return eval_node(*n.kids[0], x) + eval_node(*n.kids[1], x);
    case NodeType::Sub: return eval_node(*n.kids[0], x) - eval_node(*n.kids[1], x);
    case NodeType::Mul: return eval_node(*n.kids[0], x) * eval_node(*n.kids[1], x);
    case NodeType::Div: {
        double a = eval_node(*n.kids[0], x);
        double b = eval_node(*n.kids[1], x);
        if (b == 0.0)
            domain("division by zero", x);
        return a / b;
    }
    case NodeType::Pow: {
        double a = eval_node(*n.kids[0], x);
        double b = eval_node(*n.kids[1], x);
        if (a == 0.0 && b < 0.0)
            domain("division by zero in power", x);
        if (a < 0.0 && b != std::floor(b))
            domain("negative base with non-integer exponent", x);
        return std::pow(a, b);
    }
    case NodeType::Call: {
        double a = eval_node(*n.kids[0], x);
        switch (n.func) {
        case Func::Exp: return std::exp(a);
        case Func::Ln:
            if (a <= 0.0)
                domain("ln of non-positive value", x);
            return std::log(a);
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Sinh: return std::sinh(a);
        case Func::Cosh: return std::cosh(a);
        case Func::Sqrt:
            if (a < 0.0)
                domain("sqrt of negative value", x);
            return std::sqrt(a);
        case Func::Abs: return std::fabs(a);
        case Func::Atan: return std::atan(a);
        }
    }
    }
    return 0.0;
}

void print_node(const Node& n, std::string& out)
{
    switch (n.type) {
    case NodeType::Number: {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, n.value);
        (void)ec;
        out.append(buf, ptr);
        return;
    }
    case NodeType::Var: out += 'x'; return;
    case NodeType::Neg:
        out += "(-";
        print_node(*n.kids[0], out);
        out += ')';
        return;
    case NodeType::Call:
        out += func_name(n.func);
        out += '(';
        print_node(*n.kids[0], out);
        out += ')';
        return;
    default: break;
    }
    const char* op = " + ";
    switch (n.type) {
    case NodeType::Sub: op = " - "; break;
    case NodeType::Mul: op = " * "; break;
    case NodeType::Div: op = " / "; break;
    case NodeType::Pow: op = " ^ "; break;
    default: break;
    }
    out += '(';
    print_node(*n.kids[0], out);
    out += op;
    print_node(*n.kids[1], out);
    out += ')';
}

bool equal_node(const Node& a, const Node& b)
{
    if (a.type != b.type || a.kids.size() != b.kids.size())
        return false;
    if (a.type == NodeType::Number && std::memcmp(&a.value, &b.value, sizeof(double)) != 0)
        return false;
    if (a.type == NodeType::Call && a.func != b.func)
        return false;
    for (std::size_t i = 0; i < a.kids.size(); ++i)
        if (!equal_node(*a.kids[i], *b.kids[i]))
            return false;
    return true;
}

}  // namespace

const char* func_name(Func f)
{
    for (const auto& fe : kFuncs)
        if (fe.f == f)
            return fe.name;
    return "?";
}

NodePtr make_number(double v)
{
    auto n = std::make_shared<Node>();
    n->type = NodeType::Number;
    n->value = v;
    return n;
}

NodePtr make_var()
{
    auto n = std::make_shared<Node>();
    n->type = NodeType::Var;
    return n;
}

NodePtr make_unary(NodePtr a)
{
    auto n = std::make_shared<Node>();
    n->type = NodeType::Neg;
    n->kids = {std::move(a)};
    return n;
}

NodePtr make_binary(NodeType t, NodePtr a, NodePtr b)
{
    auto n = std::make_shared<Node>();
    n->type = t;
    n->kids = {std::move(a), std::move(b)};
    return n;
}

NodePtr make_call(Func f, NodePtr a)
{
    auto n = std::make_shared<Node>();
    n->type = NodeType::Call;
    n->func = f;
    n->kids = {std::move(a)};
    return n;
}

Expression parse_expr(std::string_view source)
{
    return Expression(Parser(source).parse());
}

double eval_expr(const Expression& e, double x)
{
    if (e.empty())
        throw Error(ErrorKind::InvalidArgument, "evaluating an empty expression");
    double v = eval_node(*e.root(), x);
    if (!std::isfinite(v))
        domain("non-finite result", x);
    return v;
}

double Expression::operator()(double x) const { return eval_expr(*this, x); }

std::string Expression::str() const { return print_expr(*this); }

std::string print_expr(const Expression& e)
{
    std::string out;
    if (!e.empty())
        print_node(*e.root(), out);
    return out;
}

bool structurally_equal(const Expression& a, const Expression& b)
{
    if (a.empty() || b.empty())
        return a.empty() == b.empty();
    return equal_node(*a.root(), *b.root());
}

}  // namespace pdm
