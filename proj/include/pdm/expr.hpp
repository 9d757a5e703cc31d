#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace pdm {

enum class NodeType { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Func { Exp, Ln, Sin, Cos, Sinh, Cosh, Sqrt, Abs, Atan };

struct Node {
    NodeType type;
    double value = 0.0;  // Number only
    Func func = Func::Exp;  // Call only
    std::vector<std::shared_ptr<const Node>> kids;
};

using NodePtr = std::shared_ptr<const Node>;

// Immutable real-valued expression in the single variable x.
class Expression {
public:
    Expression() = default;
    explicit Expression(NodePtr root) : root_(std::move(root)) {}

    const NodePtr& root() const { return root_; }
    bool empty() const { return !root_; }

    double operator()(double x) const;
    std::string str() const;

private:
    NodePtr root_;
};

Expression parse_expr(std::string_view source);
double eval_expr(const Expression& e, double x);

// Fully parenthesised form; reparses to a structurally equal tree.
std::string print_expr(const Expression& e);
bool structurally_equal(const Expression& a, const Expression& b);

const char* func_name(Func f);

NodePtr make_number(double v);
NodePtr make_var();
NodePtr make_unary(NodePtr a);
NodePtr make_binary(NodeType t, NodePtr a, NodePtr b);
NodePtr make_call(Func f, NodePtr a);

}  // namespace pdm
