#include "tlsurf/expr.hpp"

#include "tlsurf/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace tlsurf {

namespace {

using Op = Expr::Op;
using Node = Expr::Node;
using NodePtr = Expr::NodePtr;

struct FunctionName
{
    std::string_view name;
    Op op;
};

constexpr FunctionName kFunctions[] = {
    {"sin", Op::sin}, {"cos", Op::cos}, {"sinh", Op::sinh}, {"cosh", Op::cosh},
    {"exp", Op::exp}, {"ln", Op::ln},   {"sqrt", Op::sqrt},
};

const FunctionName* find_function(std::string_view name)
{
    for (const auto& f : kFunctions)
        if (f.name == name) return &f;
    return nullptr;
}

std::string_view function_name(Op op)
{
    for (const auto& f : kFunctions)
        if (f.op == op) return f.name;
    return "?";
}

// ---------------------------------------------------------------------------
// node construction with literal folding

NodePtr number(double v)
{
    auto n = std::make_shared<Node>();
    n->op = Op::number;
    n->value = v;
    return n;
}

NodePtr variable_node(int index)
{
    auto n = std::make_shared<Node>();
    n->op = Op::variable;
    n->var = index;
    return n;
}

bool is_number(const NodePtr& n, double v) { return n->op == Op::number && n->value == v; }
bool is_number(const NodePtr& n) { return n->op == Op::number; }

NodePtr raw(Op op, NodePtr lhs, NodePtr rhs = nullptr, double value = 0.0)
{
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    n->value = value;
    return n;
}

NodePtr fold_if_finite(NodePtr folded, NodePtr fallback)
{
    return std::isfinite(folded->value) ? folded : fallback;
}

NodePtr neg(NodePtr a)
{
    if (is_number(a)) return number(-a->value);
    return raw(Op::neg, std::move(a));
}

NodePtr add(NodePtr a, NodePtr b)
{
    if (is_number(a) && is_number(b)) return fold_if_finite(number(a->value + b->value), raw(Op::add, a, b));
    if (is_number(a, 0.0)) return b;
    if (is_number(b, 0.0)) return a;
    return raw(Op::add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b)
{
    if (is_number(a) && is_number(b)) return fold_if_finite(number(a->value - b->value), raw(Op::sub, a, b));
    if (is_number(b, 0.0)) return a;
    if (is_number(a, 0.0)) return neg(std::move(b));
    return raw(Op::sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b)
{
    if (is_number(a) && is_number(b)) return fold_if_finite(number(a->value * b->value), raw(Op::mul, a, b));
    if (is_number(a, 0.0) || is_number(b, 0.0)) return number(0.0);
    if (is_number(a, 1.0)) return b;
    if (is_number(b, 1.0)) return a;
    return raw(Op::mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b)
{
    if (is_number(a) && is_number(b) && b->value != 0.0)
        return fold_if_finite(number(a->value / b->value), raw(Op::div, a, b));
    if (is_number(b, 1.0)) return a;
    if (is_number(a, 0.0) && !is_number(b, 0.0)) return number(0.0);
    return raw(Op::div, std::move(a), std::move(b));
}

NodePtr power(NodePtr base, double exponent)
{
    if (exponent == 0.0) return number(1.0);
    if (exponent == 1.0) return base;
    if (is_number(base)) {
        const double v = std::pow(base->value, exponent);
        if (std::isfinite(v)) return number(v);
    }
    return raw(Op::pow, std::move(base), nullptr, exponent);
}

NodePtr call(Op op, NodePtr arg) { return raw(op, std::move(arg)); }

// ---------------------------------------------------------------------------
// evaluation

double eval_node(const Node& n, std::span<const double> x)
{
    switch (n.op) {
        case Op::number: return n.value;
        case Op::variable: return x[static_cast<std::size_t>(n.var)];
        case Op::neg: return -eval_node(*n.lhs, x);
        case Op::add: return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
        case Op::sub: return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
        case Op::mul: return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
        case Op::div: {
            const double num = eval_node(*n.lhs, x);
            const double den = eval_node(*n.rhs, x);
            if (den == 0.0) throw DomainError("division by zero");
            return num / den;
        }
        case Op::pow: {
            const double b = eval_node(*n.lhs, x);
            const double p = n.value;
            if (p != std::floor(p) && !(b > 0.0))
                throw DomainError("non-integer power of non-positive base");
            if (b == 0.0 && p < 0.0) throw DomainError("division by zero");
            return std::pow(b, p);
        }
        case Op::sin: return std::sin(eval_node(*n.lhs, x));
        case Op::cos: return std::cos(eval_node(*n.lhs, x));
        case Op::sinh: return std::sinh(eval_node(*n.lhs, x));
        case Op::cosh: return std::cosh(eval_node(*n.lhs, x));
        case Op::exp: return std::exp(eval_node(*n.lhs, x));
        case Op::ln: {
            const double a = eval_node(*n.lhs, x);
            if (!(a > 0.0)) throw DomainError("ln of non-positive argument");
            return std::log(a);
        }
        case Op::sqrt: {
            const double a = eval_node(*n.lhs, x);
            if (a < 0.0) throw DomainError("sqrt of negative argument");
            return std::sqrt(a);
        }
    }
    return 0.0;
}

bool uses_var(const Node& n, int var)
{
    if (n.op == Op::variable) return var < 0 || n.var == var;
    return (n.lhs && uses_var(*n.lhs, var)) || (n.rhs && uses_var(*n.rhs, var));
}

// ---------------------------------------------------------------------------
// printing

int precedence(const Node& n)
{
    switch (n.op) {
        case Op::add:
        case Op::sub: return 1;
        case Op::mul:
        case Op::div: return 2;
        case Op::neg: return 3;
        case Op::pow: return 4;
        case Op::number: return n.value < 0.0 ? 0 : 5;
        default: return 5;
    }
}

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print(const Node& n, const std::vector<std::string>& vars, std::string& out);

void print_child(const Node& child, int min_prec, const std::vector<std::string>& vars, std::string& out)
{
    if (precedence(child) < min_prec) {
        out += '(';
        print(child, vars, out);
        out += ')';
    } else {
        print(child, vars, out);
    }
}

void print(const Node& n, const std::vector<std::string>& vars, std::string& out)
{
    switch (n.op) {
        case Op::number:
            out += format_number(n.value);
            return;
        case Op::variable:
            out += vars[static_cast<std::size_t>(n.var)];
            return;
        case Op::neg:
            out += '-';
            print_child(*n.lhs, 4, vars, out);
            return;
        case Op::add:
        case Op::sub:
        case Op::mul:
        case Op::div: {
            const int p = precedence(n);
            const char sym = n.op == Op::add ? '+' : n.op == Op::sub ? '-' : n.op == Op::mul ? '*' : '/';
            print_child(*n.lhs, p, vars, out);
            out += sym;
            // right operands of equal precedence keep their grouping
            print_child(*n.rhs, p + 1, vars, out);
            return;
        }
        case Op::pow:
            print_child(*n.lhs, 5, vars, out);
            out += '^';
            if (n.value < 0.0) {
                out += '(' + format_number(n.value) + ')';
            } else {
                out += format_number(n.value);
            }
            return;
        default:
            out += function_name(n.op);
            out += '(';
            print(*n.lhs, vars, out);
            out += ')';
            return;
    }
}

// ---------------------------------------------------------------------------
// parsing

class Parser
{
public:
    Parser(std::string_view text, const std::vector<std::string>& vars) : text_(text), vars_(vars) {}

    NodePtr parse()
    {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
        NodePtr e = expr();
        skip_ws();
        if (pos_ < text_.size()) throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
        return e;
    }

private:
    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr()
    {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = raw(Op::add, lhs, term());
            else if (accept('-')) lhs = raw(Op::sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term()
    {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = raw(Op::mul, lhs, unary());
            else if (accept('/')) lhs = raw(Op::div, lhs, unary());
            else return lhs;
        }
    }

    NodePtr unary()
    {
        if (accept('-')) return raw(Op::neg, unary());
        return power_expr();
    }

    NodePtr power_expr()
    {
        NodePtr base = primary();
        if (!accept('^')) return base;
        const std::size_t at = pos_;
        NodePtr exponent = unary();
        if (uses_var(*exponent, -1)) throw ParseError("exponent must be constant", at);
        double value = 0.0;
        try {
            value = eval_node(*exponent, {});
        } catch (const DomainError& e) {
            throw ParseError(std::string("invalid exponent: ") + e.what(), at);
        }
        return raw(Op::pow, base, nullptr, value);
    }

    NodePtr primary()
    {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number_literal();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    NodePtr number_literal()
    {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        };
        digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) digits();
            else pos_ = save; // "2e" is a literal followed by an identifier
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (ec != std::errc() || ptr != text_.data() + pos_) throw ParseError("malformed number", start);
        return number(v);
    }

    NodePtr identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        if (const auto* f = find_function(name)) {
            if (!accept('(')) throw ParseError("expected '(' after " + std::string(name), pos_);
            NodePtr arg = expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return call(f->op, arg);
        }
        auto it = std::find(vars_.begin(), vars_.end(), name);
        if (it == vars_.end()) throw UnknownIdentifierError(std::string(name));
        return variable_node(static_cast<int>(it - vars_.begin()));
    }

    std::string_view text_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

void check_variables(const std::vector<std::string>& vars)
{
    for (const auto& v : vars) {
        if (find_function(v)) throw Error("variable name \"" + v + "\" collides with a function name");
        if (v.empty() || !(std::isalpha(static_cast<unsigned char>(v[0])) || v[0] == '_'))
            throw Error("invalid variable name \"" + v + "\"");
    }
}

// ---------------------------------------------------------------------------
// differentiation and substitution

NodePtr derive(const NodePtr& n, int var)
{
    switch (n->op) {
        case Op::number: return number(0.0);
        case Op::variable: return number(n->var == var ? 1.0 : 0.0);
        case Op::neg: return neg(derive(n->lhs, var));
        case Op::add: return add(derive(n->lhs, var), derive(n->rhs, var));
        case Op::sub: return sub(derive(n->lhs, var), derive(n->rhs, var));
        case Op::mul:
            return add(mul(derive(n->lhs, var), n->rhs), mul(n->lhs, derive(n->rhs, var)));
        case Op::div: {
            NodePtr num = sub(mul(derive(n->lhs, var), n->rhs), mul(n->lhs, derive(n->rhs, var)));
            return div(num, power(n->rhs, 2.0));
        }
        case Op::pow:
            return mul(mul(number(n->value), power(n->lhs, n->value - 1.0)), derive(n->lhs, var));
        case Op::sin: return mul(call(Op::cos, n->lhs), derive(n->lhs, var));
        case Op::cos: return mul(neg(call(Op::sin, n->lhs)), derive(n->lhs, var));
        case Op::sinh: return mul(call(Op::cosh, n->lhs), derive(n->lhs, var));
        case Op::cosh: return mul(call(Op::sinh, n->lhs), derive(n->lhs, var));
        case Op::exp: return mul(n, derive(n->lhs, var));
        case Op::ln: return div(derive(n->lhs, var), n->lhs);
        case Op::sqrt: return div(derive(n->lhs, var), mul(number(2.0), n));
    }
    return number(0.0);
}

NodePtr replace(const NodePtr& n, const std::vector<NodePtr>& by)
{
    switch (n->op) {
        case Op::number: return n;
        case Op::variable: return by[static_cast<std::size_t>(n->var)];
        case Op::pow: return raw(Op::pow, replace(n->lhs, by), nullptr, n->value);
        default:
            return raw(n->op, replace(n->lhs, by), n->rhs ? replace(n->rhs, by) : nullptr, n->value);
    }
}

const std::vector<std::string>& common_variables(const Expr& a, const Expr& b)
{
    if (a.is_constant() && a.variables().size() <= b.variables().size()) return b.variables();
    if (b.is_constant() && b.variables().size() <= a.variables().size()) return a.variables();
    if (a.variables() != b.variables()) throw Error("expressions over different variable lists");
    return a.variables();
}

} // namespace

// ---------------------------------------------------------------------------

Expr::Expr(double value, std::vector<std::string> variables)
    : root_(number(value)), vars_(std::move(variables))
{
}

Expr::Expr(NodePtr root, std::vector<std::string> variables) : root_(std::move(root)), vars_(std::move(variables))
{
}

Expr Expr::variable(std::string_view name, std::vector<std::string> variables)
{
    auto it = std::find(variables.begin(), variables.end(), name);
    if (it == variables.end()) throw UnknownIdentifierError(std::string(name));
    const int index = static_cast<int>(it - variables.begin());
    return Expr(variable_node(index), std::move(variables));
}

double Expr::operator()(std::span<const double> values) const
{
    if (values.size() < vars_.size()) throw Error("missing variable bindings");
    const double v = eval_node(*root_, values);
    if (!std::isfinite(v)) throw DomainError("non-finite result");
    return v;
}

bool Expr::depends_on(std::string_view name) const
{
    auto it = std::find(vars_.begin(), vars_.end(), name);
    if (it == vars_.end()) return false;
    return uses_var(*root_, static_cast<int>(it - vars_.begin()));
}

bool Expr::is_constant() const { return !uses_var(*root_, -1); }

std::string Expr::str() const
{
    std::string out;
    print(*root_, vars_, out);
    return out;
}

Expr parse(std::string_view text, std::vector<std::string> variables)
{
    check_variables(variables);
    Parser p(text, variables);
    NodePtr root = p.parse();
    return Expr(std::move(root), std::move(variables));
}

double eval(const Expr& e, const std::map<std::string, double>& bindings)
{
    std::vector<double> values;
    values.reserve(e.variables().size());
    for (const auto& name : e.variables()) {
        auto it = bindings.find(name);
        if (it == bindings.end()) {
            if (e.depends_on(name)) throw Error("no binding for variable \"" + name + "\"");
            values.push_back(0.0);
        } else {
            values.push_back(it->second);
        }
    }
    return e(values);
}

Expr differentiate(const Expr& e, std::string_view var)
{
    auto it = std::find(e.variables().begin(), e.variables().end(), var);
    if (it == e.variables().end()) throw UnknownIdentifierError(std::string(var));
    return Expr(derive(e.root(), static_cast<int>(it - e.variables().begin())), e.variables());
}

Expr substitute(const Expr& e, const std::vector<Expr>& replacements)
{
    if (replacements.size() != e.variables().size()) throw Error("substitute: one replacement per variable required");
    std::vector<std::string> vars = replacements.empty() ? std::vector<std::string>{} : replacements.front().variables();
    std::vector<NodePtr> by;
    for (const auto& r : replacements) {
        if (r.variables() != vars) {
            if (!r.is_constant()) throw Error("substitute: replacements over different variable lists");
        }
        by.push_back(r.root());
    }
    return Expr(replace(e.root(), by), std::move(vars));
}

Expr rebind(const Expr& e, const std::vector<std::string>& variables)
{
    std::vector<Expr> by;
    for (const auto& name : e.variables()) {
        if (std::find(variables.begin(), variables.end(), name) == variables.end()) {
            if (e.depends_on(name)) throw UnknownIdentifierError(name);
            by.emplace_back(0.0, variables);
        } else {
            by.push_back(Expr::variable(name, variables));
        }
    }
    if (by.empty()) return Expr(e.root(), variables);
    return substitute(e, by);
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(add(a.root(), b.root()), common_variables(a, b)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(sub(a.root(), b.root()), common_variables(a, b)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(mul(a.root(), b.root()), common_variables(a, b)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(div(a.root(), b.root()), common_variables(a, b)); }
Expr operator-(const Expr& a) { return Expr(neg(a.root()), a.variables()); }
Expr operator*(double c, const Expr& a) { return Expr(mul(number(c), a.root()), a.variables()); }
Expr operator+(double c, const Expr& a) { return Expr(add(number(c), a.root()), a.variables()); }
Expr pow(const Expr& base, double exponent) { return Expr(power(base.root(), exponent), base.variables()); }
Expr sin(const Expr& a) { return Expr(call(Op::sin, a.root()), a.variables()); }
Expr cos(const Expr& a) { return Expr(call(Op::cos, a.root()), a.variables()); }
Expr sinh(const Expr& a) { return Expr(call(Op::sinh, a.root()), a.variables()); }
Expr cosh(const Expr& a) { return Expr(call(Op::cosh, a.root()), a.variables()); }
Expr exp(const Expr& a) { return Expr(call(Op::exp, a.root()), a.variables()); }
Expr ln(const Expr& a) { return Expr(call(Op::ln, a.root()), a.variables()); }
Expr sqrt(const Expr& a) { return Expr(call(Op::sqrt, a.root()), a.variables()); }

} // namespace tlsurf
