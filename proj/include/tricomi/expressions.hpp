#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tricomi/numerics.hpp"

namespace tricomi {

// Minimal math-expression AST: numbers, slot variables, unary negation,
// + - * / ^ (right-associative), and calls of sin, cos, exp, sqrt, abs.
struct ExprAst {
    enum class Kind { number, variable, negate, add, sub, mul, div, pow, call };
    Kind kind;
    double number = 0.0;
    std::string name;          // variable or function name
    std::size_t slot = 0;      // variable: index into the slot's argument list
    std::shared_ptr<const ExprAst> lhs, rhs;
};

using ExprPtr = std::shared_ptr<const ExprAst>;

namespace detail {

inline bool is_known_function(const std::string& s) {
    return s == "sin" || s == "cos" || s == "exp" || s == "sqrt" || s == "abs";
}

class ExprParser {
public:
    ExprParser(std::string_view src, const std::vector<std::string>& vars)
        : src_(src), vars_(vars) {}

    ExprPtr run() {
        auto e = parse_sum();
        skip_ws();
        if (pos_ != src_.size())
            fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
        return e;
    }

private:
    std::string_view src_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw validation_error("expression syntax error at offset " + std::to_string(pos_) +
                               ": " + what);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    ExprPtr parse_sum() {
        auto left = parse_product();
        for (;;) {
            if (eat('+')) left = make_bin(ExprAst::Kind::add, left, parse_product());
            else if (eat('-')) left = make_bin(ExprAst::Kind::sub, left, parse_product());
            else return left;
        }
    }

    ExprPtr parse_product() {
        auto left = parse_unary();
        for (;;) {
            if (eat('*')) left = make_bin(ExprAst::Kind::mul, left, parse_unary());
            else if (eat('/')) left = make_bin(ExprAst::Kind::div, left, parse_unary());
            else return left;
        }
    }

    ExprPtr parse_unary() {
        if (eat('-')) {
            auto node = std::make_shared<ExprAst>();
            node->kind = ExprAst::Kind::negate;
            node->lhs = parse_unary();
            return node;
        }
        return parse_power();
    }

    ExprPtr parse_power() {
        auto base = parse_atom();
        if (eat('^'))
            return make_bin(ExprAst::Kind::pow, base, parse_unary());
        return base;
    }

    ExprPtr parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("expected operand");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            auto e = parse_sum();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail("expected operand");
    }

    ExprPtr parse_number() {
        const std::string buf(src_.substr(pos_));
        char* end = nullptr;
        const double v = std::strtod(buf.c_str(), &end);
        if (end == buf.c_str()) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - buf.c_str());
        auto node = std::make_shared<ExprAst>();
        node->kind = ExprAst::Kind::number;
        node->number = v;
        return node;
    }

    ExprPtr parse_ident() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name(src_.substr(start, pos_ - start));
        if (detail::is_known_function(name)) {
            if (!eat('(')) fail("function '" + name + "' needs parenthesized argument");
            auto arg = parse_sum();
            if (!eat(')')) fail("expected ')'");
            auto node = std::make_shared<ExprAst>();
            node->kind = ExprAst::Kind::call;
            node->name = name;
            node->lhs = std::move(arg);
            return node;
        }
        auto node = std::make_shared<ExprAst>();
        if (name == "pi" || name == "e") {
            node->kind = ExprAst::Kind::number;
            node->number = (name == "pi") ? pi : std::exp(1.0);
            node->name = name; // keep spelling so printing round-trips
            return node;
        }
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (vars_[i] == name) {
                node->kind = ExprAst::Kind::variable;
                node->name = name;
                node->slot = i;
                return node;
            }
        }
        pos_ = start;
        if (name == "x" || name == "y" || name == "t")
            fail("variable '" + name + "' is not allowed in this slot");
        fail("unknown identifier '" + name + "'");
    }

    static ExprPtr make_bin(ExprAst::Kind k, ExprPtr l, ExprPtr r) {
        auto node = std::make_shared<ExprAst>();
        node->kind = k;
        node->lhs = std::move(l);
        node->rhs = std::move(r);
        return node;
    }
};

inline int precedence(ExprAst::Kind k) {
    switch (k) {
        case ExprAst::Kind::add:
        case ExprAst::Kind::sub: return 1;
        case ExprAst::Kind::mul:
        case ExprAst::Kind::div: return 2;
        case ExprAst::Kind::negate: return 3;
        case ExprAst::Kind::pow: return 4;
        default: return 5;
    }
}

inline void print_node(const ExprAst& n, std::string& out) {
    auto child = [&out](const ExprAst& c, int ctx_prec, bool strict) {
        const int p = precedence(c.kind);
        const bool parens = strict ? (p <= ctx_prec) : (p < ctx_prec);
        if (parens) out += '(';
        print_node(c, out);
        if (parens) out += ')';
    };
    switch (n.kind) {
        case ExprAst::Kind::number: {
            if (!n.name.empty()) { out += n.name; break; }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n.number);
            out += buf;
            break;
        }
        case ExprAst::Kind::variable: out += n.name; break;
        case ExprAst::Kind::negate:
            out += '-';
            child(*n.lhs, precedence(n.kind), false);
            break;
        case ExprAst::Kind::add:
        case ExprAst::Kind::sub:
        case ExprAst::Kind::mul:
        case ExprAst::Kind::div: {
            const int p = precedence(n.kind);
            child(*n.lhs, p, false);
            out += (n.kind == ExprAst::Kind::add)   ? '+'
                   : (n.kind == ExprAst::Kind::sub) ? '-'
                   : (n.kind == ExprAst::Kind::mul) ? '*'
                                                    : '/';
            // same-precedence right operands stay parenthesized so the
            // reparsed tree matches node for node
            child(*n.rhs, p, true);
            break;
        }
        case ExprAst::Kind::pow:
            child(*n.lhs, precedence(n.kind), true); // right-assoc: guard the left side
            out += '^';
            child(*n.rhs, precedence(n.kind), false);
            break;
        case ExprAst::Kind::call:
            out += n.name;
            out += '(';
            print_node(*n.lhs, out);
            out += ')';
            break;
    }
}

} // namespace detail

// Parses src against the slot's allowed variable names (position = argument
// index during evaluation). Throws validation_error with a byte offset on
// syntax errors, unknown identifiers, and out-of-slot variables.
inline ExprPtr parse_expression(std::string_view src, const std::vector<std::string>& allowed_vars) {
    return detail::ExprParser(src, allowed_vars).run();
}

inline double evaluate(const ExprAst& n, const double* args) {
    switch (n.kind) {
        case ExprAst::Kind::number: return n.number;
        case ExprAst::Kind::variable: return args[n.slot];
        case ExprAst::Kind::negate: return -evaluate(*n.lhs, args);
        case ExprAst::Kind::add: return evaluate(*n.lhs, args) + evaluate(*n.rhs, args);
        case ExprAst::Kind::sub: return evaluate(*n.lhs, args) - evaluate(*n.rhs, args);
        case ExprAst::Kind::mul: return evaluate(*n.lhs, args) * evaluate(*n.rhs, args);
        case ExprAst::Kind::div: return evaluate(*n.lhs, args) / evaluate(*n.rhs, args);
        case ExprAst::Kind::pow: return std::pow(evaluate(*n.lhs, args), evaluate(*n.rhs, args));
        case ExprAst::Kind::call: {
            const double v = evaluate(*n.lhs, args);
            if (n.name == "sin") return std::sin(v);
            if (n.name == "cos") return std::cos(v);
            if (n.name == "exp") return std::exp(v);
            if (n.name == "sqrt") return std::sqrt(v);
            return std::abs(v);
        }
    }
    return 0.0; // unreachable
}

inline std::string print_expression(const ExprAst& ast) {
    std::string out;
    detail::print_node(ast, out);
    return out;
}

inline bool same_ast(const ExprAst& a, const ExprAst& b) {
    if (a.kind != b.kind || a.name != b.name || a.slot != b.slot) return false;
    if (a.kind == ExprAst::Kind::number && a.number != b.number) return false;
    if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs) ||
        static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs))
        return false;
    if (a.lhs && !same_ast(*a.lhs, *b.lhs)) return false;
    if (a.rhs && !same_ast(*a.rhs, *b.rhs)) return false;
    return true;
}

} // namespace tricomi
