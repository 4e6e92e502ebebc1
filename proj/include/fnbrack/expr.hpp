#pragma once

// A small smooth-function expression language: reals, variables,
// + - * / ^, unary minus and the elementary functions
// {sin, cos, tan, exp, log, sqrt, atan}. Coefficient functions and
// groupoid structure maps are declared in this language and evaluated
// generically over nested dual numbers, so every derivative the library
// needs comes out of the same tree.
//
// Grammar (documented in docs/expressions.md):
//   function  = expr { ";" expr }
//   expr      = term { ("+" | "-") term }
//   term      = unary { ("*" | "/") unary }
//   unary     = ("-" | "+") unary | power
//   power     = atom [ "^" unary ]            ; right-associative
//   atom      = number | ident | ident "(" expr ")" | "(" expr ")"
//
// "^" binds tightest and unary minus sits below it: -x^2 == -(x^2).
// Variables are x1..xn unless an explicit name list is supplied.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fnbrack/errors.hpp"
#include "fnbrack/jet.hpp"

namespace fnbrack::expr {

enum class BinOp { Add, Sub, Mul, Div, Pow };
enum class FnId { Sin, Cos, Tan, Exp, Log, Sqrt, Atan };

struct Node {
    enum class Kind { Literal, Var, Neg, Binary, Call };
    Kind kind = Kind::Literal;
    double lit = 0.0;  // Literal payload (parser emits non-negative values;
                       // a leading minus becomes a Neg node)
    int var = -1;      // Var payload
    BinOp op = BinOp::Add;
    FnId fn = FnId::Sin;
    int lhs = -1;  // child slots (Neg and Call use lhs only)
    int rhs = -1;
    int line = 1;
    int col = 1;
};

class ExprAst {
public:
    ExprAst() = default;
    ExprAst(std::vector<Node> nodes, int root, int arity, std::vector<std::string> var_names)
        : nodes_(std::move(nodes)), root_(root), arity_(arity), var_names_(std::move(var_names)) {}

    const std::vector<Node>& nodes() const { return nodes_; }
    int root() const { return root_; }
    int arity() const { return arity_; }
    const std::vector<std::string>& var_names() const { return var_names_; }

private:
    std::vector<Node> nodes_;
    int root_ = -1;
    int arity_ = 0;
    std::vector<std::string> var_names_;
};

struct ExprFn {
    int arity_in = 0;
    int arity_out = 0;
    std::vector<ExprAst> components;
};

// Components separated by ';'. Variables are x1..x<arity_in>.
ExprFn parse(std::string_view source, int arity_in);

// Variables named explicitly; arity is var_names.size().
ExprFn parse(std::string_view source, const std::vector<std::string>& var_names);

std::string print(const ExprAst& ast);
std::string print(const ExprFn& fn);

bool structurally_equal(const ExprAst& a, const ExprAst& b);

void evaluate(const ExprFn& fn, std::span<const double> in, std::span<double> out);
void evaluate(const ExprFn& fn, std::span<const Jet1> in, std::span<Jet1> out);
void evaluate(const ExprFn& fn, std::span<const Jet2> in, std::span<Jet2> out);
void evaluate(const ExprFn& fn, std::span<const Jet3> in, std::span<Jet3> out);

}  // namespace fnbrack::expr
