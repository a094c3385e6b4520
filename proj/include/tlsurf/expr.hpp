#ifndef TLSURF_EXPR_HPP
#define TLSURF_EXPR_HPP

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tlsurf {

/**
 * Immutable real-valued expression over a declared list of variables.
 *
 * Grammar (see docs/grammar.md):
 *   expr    = term { ("+" | "-") term }
 *   term    = unary { ("*" | "/") unary }
 *   unary   = "-" unary | power
 *   power   = primary [ "^" unary ]        exponent must be constant
 *   primary = number | name | func "(" expr ")" | "(" expr ")"
 *
 * Copies share the underlying tree.
 */
class Expr
{
public:
    enum class Op { number, variable, neg, add, sub, mul, div, pow, sin, cos, sinh, cosh, exp, ln, sqrt };

    struct Node
    {
        Op op = Op::number;
        double value = 0.0;                   // number literal / constant exponent
        int var = -1;                         // index into the variable list
        std::shared_ptr<const Node> lhs, rhs; // rhs unused for unary ops and calls
    };
    using NodePtr = std::shared_ptr<const Node>;

    Expr() : Expr(0.0, {}) {}
    Expr(double value, std::vector<std::string> variables);
    Expr(NodePtr root, std::vector<std::string> variables);

    static Expr variable(std::string_view name, std::vector<std::string> variables);

    const std::vector<std::string>& variables() const { return vars_; }
    const NodePtr& root() const { return root_; }

    /// Evaluate with values given in declared-variable order.
    double operator()(std::span<const double> values) const;
    double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }

    bool depends_on(std::string_view name) const;
    bool is_constant() const;

    /// Parseable text; literals printed with 17 significant digits.
    std::string str() const;

private:
    NodePtr root_;
    std::vector<std::string> vars_;
};

/// Throws ParseError (with byte offset) or UnknownIdentifierError.
Expr parse(std::string_view text, std::vector<std::string> variables);

/// Throws DomainError for ln/sqrt/pow domain violations, division by zero and non-finite results.
double eval(const Expr& e, const std::map<std::string, double>& bindings);

/// Exact symbolic derivative; only literal arithmetic is folded.
Expr differentiate(const Expr& e, std::string_view var);

/// Replace variable k of `e` by replacements[k]; all replacements must share one variable list,
/// which becomes the variable list of the result.
Expr substitute(const Expr& e, const std::vector<Expr>& replacements);

/// Re-declare `e` over a larger variable list (every current variable must appear in `variables`).
Expr rebind(const Expr& e, const std::vector<std::string>& variables);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(double c, const Expr& a);
Expr operator+(double c, const Expr& a);
Expr pow(const Expr& base, double exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr sinh(const Expr& a);
Expr cosh(const Expr& a);
Expr exp(const Expr& a);
Expr ln(const Expr& a);
Expr sqrt(const Expr& a);

} // namespace tlsurf

#endif // TLSURF_EXPR_HPP
