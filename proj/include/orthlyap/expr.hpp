#pragma once

// Scalar expressions over the state variables x1..xn: parsing, printing,
// evaluation, and symbolic differentiation. Expressions are immutable trees
// with shared subterms; handles are cheap to copy and safe to share across
// threads once built.

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "orthlyap/error.hpp"

namespace orthlyap {

enum class ExprKind { Constant, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Func { Sin, Cos, Exp, Log, Sqrt, Tanh, Abs };

inline const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Exp: return "exp";
        case Func::Log: return "log";
        case Func::Sqrt: return "sqrt";
        case Func::Tanh: return "tanh";
        case Func::Abs: return "abs";
    }
    return "?";
}

inline std::optional<Func> func_from_name(std::string_view name) {
    if (name == "sin") return Func::Sin;
    if (name == "cos") return Func::Cos;
    if (name == "exp") return Func::Exp;
    if (name == "log") return Func::Log;
    if (name == "sqrt") return Func::Sqrt;
    if (name == "tanh") return Func::Tanh;
    if (name == "abs") return Func::Abs;
    return std::nullopt;
}

class Expr {
    struct Node {
        ExprKind kind;
        double value = 0.0;    // Constant
        int index = 0;         // Var, 1-based
        Func func = Func::Sin; // Call
        std::shared_ptr<const Node> a, b;
    };
    using NodePtr = std::shared_ptr<const Node>;

    NodePtr n_;
    explicit Expr(NodePtr n) : n_(std::move(n)) {}

    static Expr make(ExprKind kind, Expr a, Expr b) {
        auto n = std::make_shared<Node>();
        n->kind = kind;
        n->a = a.n_;
        n->b = b.n_;
        return Expr(std::move(n));
    }

public:
    Expr() = default;  // empty handle, only valid as a placeholder
    bool valid() const { return n_ != nullptr; }

    // ---- construction (with identity/zero folding only) ----

    static Expr constant(double v) {
        auto n = std::make_shared<Node>();
        n->kind = ExprKind::Constant;
        n->value = v;
        return Expr(std::move(n));
    }

    static Expr var(int index) {
        if (index < 1) throw Error("variable index must be >= 1");
        auto n = std::make_shared<Node>();
        n->kind = ExprKind::Var;
        n->index = index;
        return Expr(std::move(n));
    }

    bool is_constant(double v) const {
        return n_->kind == ExprKind::Constant && n_->value == v;
    }

    friend Expr operator+(const Expr& a, const Expr& b) {
        if (a.is_constant(0.0)) return b;
        if (b.is_constant(0.0)) return a;
        return make(ExprKind::Add, a, b);
    }

    friend Expr operator-(const Expr& a, const Expr& b) {
        if (b.is_constant(0.0)) return a;
        return make(ExprKind::Sub, a, b);
    }

    friend Expr operator-(const Expr& a) {
        // A negated literal is folded into the constant so a printed "-2"
        // re-parses to the identical node.
        if (a.n_->kind == ExprKind::Constant) return constant(-a.n_->value);
        return make(ExprKind::Neg, a, Expr());
    }

    friend Expr operator*(const Expr& a, const Expr& b) {
        if (a.is_constant(0.0) || b.is_constant(0.0)) return constant(0.0);
        if (a.is_constant(1.0)) return b;
        if (b.is_constant(1.0)) return a;
        return make(ExprKind::Mul, a, b);
    }

    friend Expr operator/(const Expr& a, const Expr& b) {
        if (b.is_constant(1.0)) return a;
        return make(ExprKind::Div, a, b);
    }

    static Expr pow(const Expr& base, const Expr& exponent) {
        if (exponent.is_constant(1.0)) return base;
        return make(ExprKind::Pow, base, exponent);
    }

    static Expr call(Func f, const Expr& arg) {
        auto n = std::make_shared<Node>();
        n->kind = ExprKind::Call;
        n->func = f;
        n->a = arg.n_;
        return Expr(std::move(n));
    }

    // ---- accessors ----

    ExprKind kind() const { return n_->kind; }
    double constant_value() const { return n_->value; }
    int var_index() const { return n_->index; }
    Func func() const { return n_->func; }
    Expr left() const { return Expr(n_->a); }
    Expr right() const { return Expr(n_->b); }

    int max_var_index() const {
        switch (n_->kind) {
            case ExprKind::Constant: return 0;
            case ExprKind::Var: return n_->index;
            case ExprKind::Neg:
            case ExprKind::Call: return left().max_var_index();
            default:
                return std::max(left().max_var_index(), right().max_var_index());
        }
    }

    bool same_structure(const Expr& o) const {
        if (n_ == o.n_) return true;
        if (n_->kind != o.n_->kind) return false;
        switch (n_->kind) {
            case ExprKind::Constant: return n_->value == o.n_->value;
            case ExprKind::Var: return n_->index == o.n_->index;
            case ExprKind::Neg: return left().same_structure(o.left());
            case ExprKind::Call:
                return n_->func == o.n_->func && left().same_structure(o.left());
            default:
                return left().same_structure(o.left()) &&
                       right().same_structure(o.right());
        }
    }

    // ---- evaluation ----

    double evaluate(const Eigen::VectorXd& p) const {
        switch (n_->kind) {
            case ExprKind::Constant: return n_->value;
            case ExprKind::Var:
                if (n_->index > p.size())
                    throw VarOutOfRange(n_->index, static_cast<int>(p.size()));
                return p[n_->index - 1];
            case ExprKind::Neg: return -left().evaluate(p);
            case ExprKind::Add: return left().evaluate(p) + right().evaluate(p);
            case ExprKind::Sub: return left().evaluate(p) - right().evaluate(p);
            case ExprKind::Mul: return left().evaluate(p) * right().evaluate(p);
            case ExprKind::Div: {
                const double den = right().evaluate(p);
                if (den == 0.0) throw DomainError("division by zero", str());
                return left().evaluate(p) / den;
            }
            case ExprKind::Pow: {
                const double base = left().evaluate(p);
                const double e = right().evaluate(p);
                if (base == 0.0 && e < 0.0)
                    throw DomainError("zero raised to a negative power", str());
                if (base < 0.0 && e != std::floor(e))
                    throw DomainError("negative base with non-integer exponent", str());
                return std::pow(base, e);
            }
            case ExprKind::Call: {
                const double a = left().evaluate(p);
                switch (n_->func) {
                    case Func::Sin: return std::sin(a);
                    case Func::Cos: return std::cos(a);
                    case Func::Exp: return std::exp(a);
                    case Func::Log:
                        if (a <= 0.0) throw DomainError("log of a non-positive value", str());
                        return std::log(a);
                    case Func::Sqrt:
                        if (a < 0.0) throw DomainError("sqrt of a negative value", str());
                        return std::sqrt(a);
                    case Func::Tanh: return std::tanh(a);
                    case Func::Abs: return std::abs(a);
                }
            }
        }
        throw Error("corrupt expression node");
    }

    // ---- symbolic differentiation ----
    //
    // Derivatives are exact up to the light folding performed by the
    // constructors. a^b with non-constant exponent differentiates through
    // exp(b*log a), which restricts the base to a > 0 at evaluation time.

    Expr differentiate(int var) const {
        switch (n_->kind) {
            case ExprKind::Constant: return constant(0.0);
            case ExprKind::Var: return constant(n_->index == var ? 1.0 : 0.0);
            case ExprKind::Neg: return -left().differentiate(var);
            case ExprKind::Add: return left().differentiate(var) + right().differentiate(var);
            case ExprKind::Sub: return left().differentiate(var) - right().differentiate(var);
            case ExprKind::Mul:
                return left().differentiate(var) * right() +
                       left() * right().differentiate(var);
            case ExprKind::Div:
                return (left().differentiate(var) * right() -
                        left() * right().differentiate(var)) /
                       pow(right(), constant(2.0));
            case ExprKind::Pow: {
                const Expr base = left(), e = right();
                const Expr dbase = base.differentiate(var);
                if (e.kind() == ExprKind::Constant) {
                    const double c = e.constant_value();
                    return constant(c) * pow(base, constant(c - 1.0)) * dbase;
                }
                const Expr de = e.differentiate(var);
                // d(a^b) = a^b * (b' log a + b a'/a)
                return pow(base, e) *
                       (de * call(Func::Log, base) + e * dbase / base);
            }
            case ExprKind::Call: {
                const Expr a = left();
                const Expr da = a.differentiate(var);
                switch (n_->func) {
                    case Func::Sin: return call(Func::Cos, a) * da;
                    case Func::Cos: return -(call(Func::Sin, a) * da);
                    case Func::Exp: return call(Func::Exp, a) * da;
                    case Func::Log: return da / a;
                    case Func::Sqrt:
                        return da / (constant(2.0) * call(Func::Sqrt, a));
                    case Func::Tanh: {
                        const Expr t = call(Func::Tanh, a);
                        return (constant(1.0) - t * t) * da;
                    }
                    case Func::Abs:
                        // a/|a| * a'; non-differentiable at 0, surfaces as a
                        // division-by-zero DomainError there.
                        return a / call(Func::Abs, a) * da;
                }
            }
        }
        throw Error("corrupt expression node");
    }

    Expr substitute(int var, const Expr& replacement) const {
        switch (n_->kind) {
            case ExprKind::Constant: return *this;
            case ExprKind::Var: return n_->index == var ? replacement : *this;
            case ExprKind::Neg: return -left().substitute(var, replacement);
            case ExprKind::Add:
                return left().substitute(var, replacement) + right().substitute(var, replacement);
            case ExprKind::Sub:
                return left().substitute(var, replacement) - right().substitute(var, replacement);
            case ExprKind::Mul:
                return left().substitute(var, replacement) * right().substitute(var, replacement);
            case ExprKind::Div:
                return left().substitute(var, replacement) / right().substitute(var, replacement);
            case ExprKind::Pow:
                return pow(left().substitute(var, replacement),
                           right().substitute(var, replacement));
            case ExprKind::Call:
                return call(n_->func, left().substitute(var, replacement));
        }
        throw Error("corrupt expression node");
    }

    // ---- printing ----
    //
    // Minimal parenthesisation; parse(str()) rebuilds a structurally
    // identical tree. Precedence levels: add/sub 1, mul/div 2, unary 3,
    // pow 4, atoms 5. A pow base must be a syntactic atom.

    std::string str() const {
        std::string out;
        print(out, 0);
        return out;
    }

private:
    static std::string format_double(double v) {
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, res.ptr);
    }

    int precedence() const {
        switch (n_->kind) {
            case ExprKind::Add:
            case ExprKind::Sub: return 1;
            case ExprKind::Mul:
            case ExprKind::Div: return 2;
            case ExprKind::Neg: return 3;
            case ExprKind::Pow: return 4;
            case ExprKind::Constant:
                return std::signbit(n_->value) ? 3 : 5;  // "-2" parses like a unary minus
            default: return 5;
        }
    }

    void print(std::string& out, int min_prec) const {
        const bool parens = precedence() < min_prec;
        if (parens) out += '(';
        switch (n_->kind) {
            case ExprKind::Constant: out += format_double(n_->value); break;
            case ExprKind::Var: out += 'x' + std::to_string(n_->index); break;
            case ExprKind::Neg:
                out += '-';
                left().print(out, 3);
                break;
            case ExprKind::Add:
                left().print(out, 1);
                out += " + ";
                right().print(out, 2);
                break;
            case ExprKind::Sub:
                left().print(out, 1);
                out += " - ";
                right().print(out, 2);
                break;
            case ExprKind::Mul:
                left().print(out, 2);
                out += '*';
                right().print(out, 3);
                break;
            case ExprKind::Div:
                left().print(out, 2);
                out += '/';
                right().print(out, 3);
                break;
            case ExprKind::Pow:
                left().print(out, 5);  // base must be an atom
                out += '^';
                right().print(out, 3);
                break;
            case ExprKind::Call:
                out += func_name(n_->func);
                out += '(';
                left().print(out, 0);
                out += ')';
                break;
        }
        if (parens) out += ')';
    }
};

namespace detail {

// Recursive-descent parser. Grammar, loosest to tightest:
//   expr   := term (('+'|'-') term)*           left associative
//   term   := unary (('*'|'/') unary)*         left associative
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?                right associative
//   atom   := number | name | name '(' expr ')' | '(' expr ')'
class ExprParser {
public:
    ExprParser(std::string_view text, int dimension,
               const std::map<std::string, int, std::less<>>& named_vars)
        : text_(text), dim_(dimension), named_(named_vars) {}

    Expr run() {
        skip_ws();
        if (pos_ >= text_.size()) throw SyntaxError(pos_, "empty expression");
        Expr e = parse_expr();
        skip_ws();
        if (pos_ < text_.size())
            throw SyntaxError(pos_, std::string("unexpected '") + text_[pos_] + "'");
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int dim_;
    const std::map<std::string, int, std::less<>>& named_;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Expr parse_expr() {
        Expr e = parse_term();
        for (;;) {
            if (eat('+')) e = e + parse_term();
            else if (eat('-')) e = e - parse_term();
            else return e;
        }
    }

    Expr parse_term() {
        Expr e = parse_unary();
        for (;;) {
            if (eat('*')) e = e * parse_unary();
            else if (eat('/')) e = e / parse_unary();
            else return e;
        }
    }

    Expr parse_unary() {
        if (eat('-')) return -parse_unary();
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (eat('^')) return Expr::pow(base, parse_unary());
        return base;
    }

    Expr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw SyntaxError(pos_, "unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            if (!eat(')')) throw SyntaxError(pos_, "expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
        throw SyntaxError(pos_, std::string("unexpected '") + c + "'");
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            } else {
                pos_ = mark;  // the 'e' belongs to something else
            }
        }
        double value = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (res.ec != std::errc() || res.ptr != text_.data() + pos_)
            throw SyntaxError(start, "malformed number");
        return Expr::constant(value);
    }

    Expr parse_name() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);

        if (auto f = func_from_name(name)) {
            if (!eat('(')) throw SyntaxError(pos_, "expected '(' after function name");
            Expr arg = parse_expr();
            if (!eat(')')) throw SyntaxError(pos_, "expected ')'");
            return Expr::call(*f, arg);
        }
        if (name.size() >= 2 && name[0] == 'x') {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i)
                digits = digits && std::isdigit(static_cast<unsigned char>(name[i]));
            if (digits) {
                const int idx = std::stoi(std::string(name.substr(1)));
                if (idx < 1 || idx > dim_) throw VarOutOfRange(idx, dim_);
                return Expr::var(idx);
            }
        }
        if (auto it = named_.find(name); it != named_.end()) {
            if (it->second < 1 || it->second > dim_) throw VarOutOfRange(it->second, dim_);
            return Expr::var(it->second);
        }
        throw UnknownSymbol(std::string(name));
    }
};

}  // namespace detail

// Parse an expression over x1..x<dimension>.
inline Expr parse_expression(std::string_view text, int dimension) {
    static const std::map<std::string, int, std::less<>> none;
    return detail::ExprParser(text, dimension, none).run();
}

// Parse a univariate expression in the named variable `t` (mapped to x1);
// the profile functions alpha/beta of the ansatz builders live here.
inline Expr parse_in_t(std::string_view text) {
    static const std::map<std::string, int, std::less<>> tmap{{"t", 1}};
    return detail::ExprParser(text, 1, tmap).run();
}

}  // namespace orthlyap
