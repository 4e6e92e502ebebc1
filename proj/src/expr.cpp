#include "fnbrack/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace fnbrack::expr {

namespace {

struct Token {
    enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Semi, End };
    Kind kind = Kind::End;
    double num = 0.0;
    std::string ident;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next()
    {
        skip_ws();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) {
            t.kind = Token::Kind::End;
            return t;
        }
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = src_.data() + pos_;
            char* end = nullptr;
            t.num = std::strtod(begin, &end);
            if (end == begin) throw ParseError("malformed number", line_, col_);
            advance(static_cast<size_t>(end - begin));
            t.kind = Token::Kind::Number;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t n = 0;
            while (pos_ + n < src_.size()) {
                const char d = src_[pos_ + n];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_') ++n;
                else break;
            }
            t.ident = std::string(src_.substr(pos_, n));
            advance(n);
            t.kind = Token::Kind::Ident;
            return t;
        }
        advance(1);
        switch (c) {
        case '+': t.kind = Token::Kind::Plus; return t;
        case '-': t.kind = Token::Kind::Minus; return t;
        case '*': t.kind = Token::Kind::Star; return t;
        case '/': t.kind = Token::Kind::Slash; return t;
        case '^': t.kind = Token::Kind::Caret; return t;
        case '(': t.kind = Token::Kind::LParen; return t;
        case ')': t.kind = Token::Kind::RParen; return t;
        case ';': t.kind = Token::Kind::Semi; return t;
        default: throw ParseError(std::string("unexpected character '") + c + "'", t.line, t.col);
        }
    }

private:
    void skip_ws()
    {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                ++col_;
                ++pos_;
            } else {
                break;
            }
        }
    }

    void advance(size_t n)
    {
        col_ += static_cast<int>(n);
        pos_ += n;
    }

    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

bool lookup_fn(const std::string& name, FnId& out)
{
    if (name == "sin") { out = FnId::Sin; return true; }
    if (name == "cos") { out = FnId::Cos; return true; }
    if (name == "tan") { out = FnId::Tan; return true; }
    if (name == "exp") { out = FnId::Exp; return true; }
    if (name == "log") { out = FnId::Log; return true; }
    if (name == "sqrt") { out = FnId::Sqrt; return true; }
    if (name == "atan") { out = FnId::Atan; return true; }
    return false;
}

class Parser {
public:
    Parser(std::string_view src, int arity, const std::vector<std::string>* names)
        : lex_(src), arity_(arity), names_(names)
    {
        cur_ = lex_.next();
    }

    ExprFn parse_function()
    {
        ExprFn fn;
        fn.arity_in = arity_;
        while (true) {
            nodes_.clear();
            const int root = parse_expr();
            std::vector<std::string> names;
            if (names_) names = *names_;
            fn.components.emplace_back(nodes_, root, arity_, std::move(names));
            if (cur_.kind == Token::Kind::Semi) {
                consume();
                continue;
            }
            if (cur_.kind == Token::Kind::End) break;
            throw ParseError("expected ';' or end of input", cur_.line, cur_.col);
        }
        fn.arity_out = static_cast<int>(fn.components.size());
        return fn;
    }

private:
    void consume() { cur_ = lex_.next(); }

    int push(Node n)
    {
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size()) - 1;
    }

    int parse_expr()
    {
        int lhs = parse_term();
        while (cur_.kind == Token::Kind::Plus || cur_.kind == Token::Kind::Minus) {
            Node n;
            n.kind = Node::Kind::Binary;
            n.op = cur_.kind == Token::Kind::Plus ? BinOp::Add : BinOp::Sub;
            n.line = cur_.line;
            n.col = cur_.col;
            consume();
            n.lhs = lhs;
            n.rhs = parse_term();
            lhs = push(n);
        }
        return lhs;
    }

    int parse_term()
    {
        int lhs = parse_unary();
        while (cur_.kind == Token::Kind::Star || cur_.kind == Token::Kind::Slash) {
            Node n;
            n.kind = Node::Kind::Binary;
            n.op = cur_.kind == Token::Kind::Star ? BinOp::Mul : BinOp::Div;
            n.line = cur_.line;
            n.col = cur_.col;
            consume();
            n.lhs = lhs;
            n.rhs = parse_unary();
            lhs = push(n);
        }
        return lhs;
    }

    int parse_unary()
    {
        if (cur_.kind == Token::Kind::Minus) {
            Node n;
            n.kind = Node::Kind::Neg;
            n.line = cur_.line;
            n.col = cur_.col;
            consume();
            n.lhs = parse_unary();
            return push(n);
        }
        if (cur_.kind == Token::Kind::Plus) {
            consume();
            return parse_unary();
        }
        return parse_power();
    }

    int parse_power()
    {
        int base = parse_atom();
        if (cur_.kind == Token::Kind::Caret) {
            Node n;
            n.kind = Node::Kind::Binary;
            n.op = BinOp::Pow;
            n.line = cur_.line;
            n.col = cur_.col;
            consume();
            n.lhs = base;
            n.rhs = parse_unary();  // right-associative, exponent may carry unary minus
            return push(n);
        }
        return base;
    }

    int parse_atom()
    {
        if (cur_.kind == Token::Kind::Number) {
            Node n;
            n.kind = Node::Kind::Literal;
            n.lit = cur_.num;
            n.line = cur_.line;
            n.col = cur_.col;
            consume();
            return push(n);
        }
        if (cur_.kind == Token::Kind::LParen) {
            consume();
            const int inner = parse_expr();
            if (cur_.kind != Token::Kind::RParen)
                throw ParseError("expected ')'", cur_.line, cur_.col);
            consume();
            return inner;
        }
        if (cur_.kind == Token::Kind::Ident) {
            const Token id = cur_;
            consume();
            FnId fn;
            if (cur_.kind == Token::Kind::LParen) {
                if (!lookup_fn(id.ident, fn))
                    throw ParseError("unknown function '" + id.ident + "'", id.line, id.col);
                consume();
                Node n;
                n.kind = Node::Kind::Call;
                n.fn = fn;
                n.line = id.line;
                n.col = id.col;
                n.lhs = parse_expr();
                if (cur_.kind != Token::Kind::RParen)
                    throw ParseError("expected ')'", cur_.line, cur_.col);
                consume();
                return push(n);
            }
            return push(make_var(id));
        }
        throw ParseError("expected a number, variable or '('", cur_.line, cur_.col);
    }

    Node make_var(const Token& id)
    {
        Node n;
        n.kind = Node::Kind::Var;
        n.line = id.line;
        n.col = id.col;
        if (names_) {
            for (size_t i = 0; i < names_->size(); ++i) {
                if ((*names_)[i] == id.ident) {
                    n.var = static_cast<int>(i);
                    return n;
                }
            }
            throw ParseError("unknown identifier '" + id.ident + "'", id.line, id.col);
        }
        if (id.ident.size() < 2 || id.ident[0] != 'x')
            throw ParseError("unknown identifier '" + id.ident + "'", id.line, id.col);
        for (size_t i = 1; i < id.ident.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(id.ident[i])))
                throw ParseError("unknown identifier '" + id.ident + "'", id.line, id.col);
        const long k = std::strtol(id.ident.c_str() + 1, nullptr, 10);
        if (k < 1 || k > arity_)
            throw ParseError("variable " + id.ident + " out of range for arity " +
                                 std::to_string(arity_),
                             id.line, id.col);
        n.var = static_cast<int>(k - 1);
        return n;
    }

    Lexer lex_;
    Token cur_;
    int arity_;
    const std::vector<std::string>* names_;
    std::vector<Node> nodes_;
};

// ----- evaluation -----

template <class S>
S eval_node(const std::vector<Node>& nodes, int idx, std::span<const S> in)
{
    using std::sin; using std::cos; using std::tan; using std::exp;
    using std::log; using std::sqrt; using std::atan;
    const Node& n = nodes[idx];
    switch (n.kind) {
    case Node::Kind::Literal:
        return from_real<S>(n.lit);
    case Node::Kind::Var:
        return in[n.var];
    case Node::Kind::Neg:
        return -eval_node(nodes, n.lhs, in);
    case Node::Kind::Binary: {
        S a = eval_node(nodes, n.lhs, in);
        if (n.op == BinOp::Pow) {
            // literal exponents keep negative bases legal and the AD exact
            const Node* e = &nodes[n.rhs];
            double sign = 1.0;
            if (e->kind == Node::Kind::Neg) {
                const Node& inner = nodes[e->lhs];
                if (inner.kind == Node::Kind::Literal) {
                    sign = -1.0;
                    e = &inner;
                }
            }
            if (e->kind == Node::Kind::Literal) {
                const double p = sign * e->lit;
                const double rounded = std::nearbyint(p);
                if (p == rounded)
                    return pow_int(a, static_cast<long>(rounded));
                if (value_of(a) <= 0.0)
                    throw EvalDomainError("non-integer power of non-positive base", n.line, n.col);
                return pow_real(a, p);
            }
            S b = eval_node(nodes, n.rhs, in);
            if (value_of(a) <= 0.0)
                throw EvalDomainError("power of non-positive base", n.line, n.col);
            return pow_general(a, b);
        }
        S b = eval_node(nodes, n.rhs, in);
        switch (n.op) {
        case BinOp::Add: return a + b;
        case BinOp::Sub: return a - b;
        case BinOp::Mul: return a * b;
        case BinOp::Div:
            if (value_of(b) == 0.0) throw EvalDomainError("division by zero", n.line, n.col);
            return a / b;
        default: break;
        }
        throw Error("unreachable binary op");
    }
    case Node::Kind::Call: {
        S a = eval_node(nodes, n.lhs, in);
        switch (n.fn) {
        case FnId::Sin: return sin(a);
        case FnId::Cos: return cos(a);
        case FnId::Tan: return tan(a);
        case FnId::Exp: return exp(a);
        case FnId::Atan: return atan(a);
        case FnId::Log:
            if (value_of(a) <= 0.0)
                throw EvalDomainError("log of non-positive value", n.line, n.col);
            return log(a);
        case FnId::Sqrt:
            if (value_of(a) < 0.0)
                throw EvalDomainError("sqrt of negative value", n.line, n.col);
            return sqrt(a);
        }
        throw Error("unreachable call");
    }
    }
    throw Error("unreachable node kind");
}

template <class S>
void evaluate_impl(const ExprFn& fn, std::span<const S> in, std::span<S> out)
{
    if (static_cast<int>(in.size()) != fn.arity_in)
        throw DimensionError("evaluate: wrong input arity");
    if (static_cast<int>(out.size()) != fn.arity_out)
        throw DimensionError("evaluate: wrong output arity");
    for (int i = 0; i < fn.arity_out; ++i)
        out[i] = eval_node(fn.components[i].nodes(), fn.components[i].root(), in);
}

// ----- printing -----

// precedence: + - (1), * / (2), unary - (3), ^ (4), atoms (5)
void print_node(const ExprAst& ast, int idx, int min_prec, std::string& out)
{
    const Node& n = ast.nodes()[idx];
    switch (n.kind) {
    case Node::Kind::Literal: {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", n.lit);
        out += buf;
        return;
    }
    case Node::Kind::Var:
        if (!ast.var_names().empty()) out += ast.var_names()[n.var];
        else out += "x" + std::to_string(n.var + 1);
        return;
    case Node::Kind::Neg: {
        const bool paren = min_prec > 3;
        if (paren) out += '(';
        out += '-';
        print_node(ast, n.lhs, 3, out);
        if (paren) out += ')';
        return;
    }
    case Node::Kind::Binary: {
        int prec = 0;
        const char* sym = "";
        switch (n.op) {
        case BinOp::Add: prec = 1; sym = " + "; break;
        case BinOp::Sub: prec = 1; sym = " - "; break;
        case BinOp::Mul: prec = 2; sym = "*"; break;
        case BinOp::Div: prec = 2; sym = "/"; break;
        case BinOp::Pow: prec = 4; sym = "^"; break;
        }
        const bool paren = min_prec > prec;
        if (paren) out += '(';
        if (n.op == BinOp::Pow) {
            print_node(ast, n.lhs, 5, out);
            out += sym;
            print_node(ast, n.rhs, 3, out);
        } else {
            print_node(ast, n.lhs, prec, out);
            out += sym;
            print_node(ast, n.rhs, prec + 1, out);
        }
        if (paren) out += ')';
        return;
    }
    case Node::Kind::Call: {
        switch (n.fn) {
        case FnId::Sin: out += "sin"; break;
        case FnId::Cos: out += "cos"; break;
        case FnId::Tan: out += "tan"; break;
        case FnId::Exp: out += "exp"; break;
        case FnId::Log: out += "log"; break;
        case FnId::Sqrt: out += "sqrt"; break;
        case FnId::Atan: out += "atan"; break;
        }
        out += '(';
        print_node(ast, n.lhs, 0, out);
        out += ')';
        return;
    }
    }
}

bool equal_node(const ExprAst& a, int ia, const ExprAst& b, int ib)
{
    const Node& x = a.nodes()[ia];
    const Node& y = b.nodes()[ib];
    if (x.kind != y.kind) return false;
    switch (x.kind) {
    case Node::Kind::Literal: return x.lit == y.lit;
    case Node::Kind::Var: return x.var == y.var;
    case Node::Kind::Neg: return equal_node(a, x.lhs, b, y.lhs);
    case Node::Kind::Binary:
        return x.op == y.op && equal_node(a, x.lhs, b, y.lhs) && equal_node(a, x.rhs, b, y.rhs);
    case Node::Kind::Call: return x.fn == y.fn && equal_node(a, x.lhs, b, y.lhs);
    }
    return false;
}

}  // namespace

ExprFn parse(std::string_view source, int arity_in)
{
    if (arity_in < 0) throw DimensionError("parse: negative arity");
    const std::string owned(source);  // strtod needs a terminated buffer
    return Parser(owned, arity_in, nullptr).parse_function();
}

ExprFn parse(std::string_view source, const std::vector<std::string>& var_names)
{
    const std::string owned(source);
    return Parser(owned, static_cast<int>(var_names.size()), &var_names).parse_function();
}

std::string print(const ExprAst& ast)
{
    std::string out;
    print_node(ast, ast.root(), 0, out);
    return out;
}

std::string print(const ExprFn& fn)
{
    std::string out;
    for (size_t i = 0; i < fn.components.size(); ++i) {
        if (i) out += "; ";
        out += print(fn.components[i]);
    }
    return out;
}

bool structurally_equal(const ExprAst& a, const ExprAst& b)
{
    if (a.arity() != b.arity()) return false;
    return equal_node(a, a.root(), b, b.root());
}

void evaluate(const ExprFn& fn, std::span<const double> in, std::span<double> out) { evaluate_impl(fn, in, out); }
void evaluate(const ExprFn& fn, std::span<const Jet1> in, std::span<Jet1> out) { evaluate_impl(fn, in, out); }
void evaluate(const ExprFn& fn, std::span<const Jet2> in, std::span<Jet2> out) { evaluate_impl(fn, in, out); }
void evaluate(const ExprFn& fn, std::span<const Jet3> in, std::span<Jet3> out) { evaluate_impl(fn, in, out); }

}  // namespace fnbrack::expr
