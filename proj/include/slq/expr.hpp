#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

#include "slq/error.hpp"

namespace slq {

/// Immutable arithmetic expression in the variable `x`.
///
/// The language covers real literals, the constant `pi`, the variable `x`,
/// unary minus, the binary operators + - * / ^ (with ^ right-associative
/// and binding tighter than unary minus) and the functions sin, cos, exp,
/// log, sqrt, abs. Nodes are shared; copies are cheap and evaluation is
/// reentrant.
class Expr {
public:
    /// Constant zero.
    Expr() : node_(make_node(Tag::Num)) {}

    /// Parses `src`. Throws ParseError carrying the byte offset of the
    /// failure.
    static Expr parse(std::string_view src);

    /// Evaluates at x. Domain violations propagate as NaN/inf in the
    /// result; the piecewise layer turns those into EvalError.
    double operator()(double x) const noexcept { return eval(*node_, x); }

    /// Prints a form that parses back to an evaluation-identical tree.
    std::string str() const {
        std::string out;
        print(*node_, out, 0);
        return out;
    }

    // Programmatic constructors, mainly for building test families.
    static Expr number(double v) {
        auto n = make_node(Tag::Num);
        n->num = v;
        return Expr(std::move(n));
    }
    static Expr variable() { return Expr(make_node(Tag::Var)); }
    static Expr pi() { return Expr(make_node(Tag::Pi)); }
    static Expr sin(Expr a) { return unary(Tag::Sin, std::move(a)); }
    static Expr cos(Expr a) { return unary(Tag::Cos, std::move(a)); }
    static Expr exp(Expr a) { return unary(Tag::Exp, std::move(a)); }
    static Expr log(Expr a) { return unary(Tag::Log, std::move(a)); }
    static Expr sqrt(Expr a) { return unary(Tag::Sqrt, std::move(a)); }
    static Expr abs(Expr a) { return unary(Tag::Abs, std::move(a)); }
    static Expr pow(Expr a, Expr b) { return binary(Tag::Pow, std::move(a), std::move(b)); }

    friend Expr operator+(Expr a, Expr b) { return binary(Tag::Add, std::move(a), std::move(b)); }
    friend Expr operator-(Expr a, Expr b) { return binary(Tag::Sub, std::move(a), std::move(b)); }
    friend Expr operator*(Expr a, Expr b) { return binary(Tag::Mul, std::move(a), std::move(b)); }
    friend Expr operator/(Expr a, Expr b) { return binary(Tag::Div, std::move(a), std::move(b)); }
    friend Expr operator-(Expr a) { return unary(Tag::Neg, std::move(a)); }

private:
    enum class Tag { Num, Pi, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Log, Sqrt, Abs };

    struct Node {
        Tag tag{Tag::Num};
        double num{0.0};
        std::shared_ptr<const Node> a{}, b{};
    };
    using NodePtr = std::shared_ptr<const Node>;

    explicit Expr(std::shared_ptr<Node> n) : node_(std::move(n)) {}

    static std::shared_ptr<Node> make_node(Tag t) {
        auto n = std::make_shared<Node>();
        n->tag = t;
        return n;
    }
    static Expr unary(Tag t, Expr a) {
        auto n = make_node(t);
        n->a = a.node_;
        return Expr(std::move(n));
    }
    static Expr binary(Tag t, Expr a, Expr b) {
        auto n = make_node(t);
        n->a = a.node_;
        n->b = b.node_;
        return Expr(std::move(n));
    }

    static double eval(const Node& n, double x) noexcept {
        switch (n.tag) {
            case Tag::Num: return n.num;
            case Tag::Pi: return std::numbers::pi;
            case Tag::Var: return x;
            case Tag::Neg: return -eval(*n.a, x);
            case Tag::Add: return eval(*n.a, x) + eval(*n.b, x);
            case Tag::Sub: return eval(*n.a, x) - eval(*n.b, x);
            case Tag::Mul: return eval(*n.a, x) * eval(*n.b, x);
            case Tag::Div: return eval(*n.a, x) / eval(*n.b, x);
            case Tag::Pow: return std::pow(eval(*n.a, x), eval(*n.b, x));
            case Tag::Sin: return std::sin(eval(*n.a, x));
            case Tag::Cos: return std::cos(eval(*n.a, x));
            case Tag::Exp: return std::exp(eval(*n.a, x));
            case Tag::Log: return std::log(eval(*n.a, x));
            case Tag::Sqrt: return std::sqrt(eval(*n.a, x));
            case Tag::Abs: return std::fabs(eval(*n.a, x));
        }
        return std::nan("");
    }

    // Precedence levels: + - (1), * / (2), unary - (3), ^ (4), atoms (5).
    static int precedence(const Node& n) {
        switch (n.tag) {
            case Tag::Add:
            case Tag::Sub: return 1;
            case Tag::Mul:
            case Tag::Div: return 2;
            case Tag::Neg: return 3;
            case Tag::Pow: return 4;
            case Tag::Num: return std::signbit(n.num) ? 3 : 5;
            default: return 5;
        }
    }

    static void print(const Node& n, std::string& out, int ctx) {
        const int prec = precedence(n);
        const bool paren = prec < ctx;
        if (paren) out += '(';
        switch (n.tag) {
            case Tag::Num: {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", n.num);
                out += buf;
                break;
            }
            case Tag::Pi: out += "pi"; break;
            case Tag::Var: out += 'x'; break;
            case Tag::Neg:
                out += '-';
                print(*n.a, out, 3);
                break;
            case Tag::Add:
                print(*n.a, out, 1);
                out += '+';
                print(*n.b, out, 2);
                break;
            case Tag::Sub:
                print(*n.a, out, 1);
                out += '-';
                print(*n.b, out, 2);
                break;
            case Tag::Mul:
                print(*n.a, out, 2);
                out += '*';
                print(*n.b, out, 3);
                break;
            case Tag::Div:
                print(*n.a, out, 2);
                out += '/';
                print(*n.b, out, 3);
                break;
            case Tag::Pow:
                print(*n.a, out, 5);
                out += '^';
                print(*n.b, out, 4);
                break;
            case Tag::Sin: out += "sin("; print(*n.a, out, 0); out += ')'; break;
            case Tag::Cos: out += "cos("; print(*n.a, out, 0); out += ')'; break;
            case Tag::Exp: out += "exp("; print(*n.a, out, 0); out += ')'; break;
            case Tag::Log: out += "log("; print(*n.a, out, 0); out += ')'; break;
            case Tag::Sqrt: out += "sqrt("; print(*n.a, out, 0); out += ')'; break;
            case Tag::Abs: out += "abs("; print(*n.a, out, 0); out += ')'; break;
        }
        if (paren) out += ')';
    }

    NodePtr node_;
};

namespace detail {

class ExprParser {
public:
    explicit ExprParser(std::string_view s) : s_(s) {}

    Expr run() {
        skip_ws();
        if (pos_ == s_.size()) fail("empty expression");
        Expr e = parse_sum();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected input");
        return e;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("expression: " + msg + " at offset " + std::to_string(pos_), pos_);
    }
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    Expr parse_sum() {
        Expr e = parse_product();
        for (;;) {
            if (eat('+')) e = std::move(e) + parse_product();
            else if (eat('-')) e = std::move(e) - parse_product();
            else return e;
        }
    }

    Expr parse_product() {
        Expr e = parse_unary();
        for (;;) {
            if (eat('*')) e = std::move(e) * parse_unary();
            else if (eat('/')) e = std::move(e) / parse_unary();
            else return e;
        }
    }

    Expr parse_unary() {
        if (eat('-')) return -parse_unary();
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (eat('^')) return Expr::pow(std::move(base), parse_unary());
        return base;
    }

    Expr parse_atom() {
        const char c = peek();
        if (c == '(') {
            eat('(');
            Expr e = parse_sum();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        fail(std::string("expected a number, identifier or '(' but found '") +
             (c ? std::string(1, c) : std::string("end of input")) + "'");
    }

    Expr parse_number() {
        const char* begin = s_.data() + pos_;
        const char* end = s_.data() + s_.size();
        double v = 0.0;
        auto res = std::from_chars(begin, end, v);
        if (res.ec != std::errc{}) fail("malformed number");
        pos_ = static_cast<std::size_t>(res.ptr - s_.data());
        return Expr::number(v);
    }

    Expr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        const std::string_view name = s_.substr(start, pos_ - start);
        if (name == "x") return Expr::variable();
        if (name == "pi") return Expr::pi();

        Expr (*fn)(Expr) = nullptr;
        if (name == "sin") fn = &Expr::sin;
        else if (name == "cos") fn = &Expr::cos;
        else if (name == "exp") fn = &Expr::exp;
        else if (name == "log") fn = &Expr::log;
        else if (name == "sqrt") fn = &Expr::sqrt;
        else if (name == "abs") fn = &Expr::abs;
        if (fn == nullptr) {
            pos_ = start;
            fail("unknown identifier '" + std::string(name) + "'");
        }
        if (!eat('(')) fail("expected '(' after function name");
        Expr arg = parse_sum();
        if (!eat(')')) fail("expected ')'");
        return fn(std::move(arg));
    }
};

} // namespace detail

inline Expr Expr::parse(std::string_view src) { return detail::ExprParser(src).run(); }

} // namespace slq
