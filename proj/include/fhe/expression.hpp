#pragma once

#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fhe/error.hpp"
#include "fhe/format.hpp"

namespace fhe {

/**
 * Small closed-form expression language for weights.
 *
 *   expr    := term (('+' | '-') term)*
 *   term    := unary (('*' | '/') unary)*
 *   unary   := ('-' | '+') unary | power
 *   power   := primary ('^' unary)?                  right associative
 *   primary := number | name | name '(' args ')' | '(' expr ')' | '|' expr '|'
 *
 * Names: r (= |x|), x, y (coordinates; y = 0 in 1D), pi, e, and any
 * constants bound at parse time (alpha, p, n by default for weights).
 * Functions: log exp sqrt abs sin cos step(z) = [z > 0], min(a,b), max(a,b),
 * pow(a,b). "|x|" is the Euclidean norm, not |x_1|.
 */
class Expression {
public:
    Expression() = default;

    static Expression parse(std::string_view text, const std::map<std::string, double>& constants = {}) {
        Parser ps{text, 0, constants};
        auto root = ps.parse_expr();
        ps.skip_ws();
        if (ps.pos != text.size())
            throw ValidationError("expression: unexpected '" + std::string(text.substr(ps.pos)) + "' in '" +
                                  std::string(text) + "'");
        Expression e;
        e.root_ = std::move(root);
        e.text_ = std::string(text);
        return e;
    }

    double operator()(std::span<const double> x) const {
        if (!root_) throw ValidationError("expression: evaluating an empty expression");
        Ctx c;
        c.x = x.empty() ? 0.0 : x[0];
        c.y = x.size() > 1 ? x[1] : 0.0;
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        c.r = std::sqrt(r2);
        return eval(*root_, c);
    }

    const std::string& text() const { return text_; }

private:
    enum class Op { Num, VarR, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Call };
    struct Node {
        Op op = Op::Num;
        double value = 0.0;
        std::string fn;
        std::vector<std::shared_ptr<const Node>> kids;
    };
    using NodePtr = std::shared_ptr<const Node>;
    struct Ctx {
        double x = 0.0, y = 0.0, r = 0.0;
    };

    static double eval(const Node& n, const Ctx& c) {
        switch (n.op) {
            case Op::Num: return n.value;
            case Op::VarR: return c.r;
            case Op::VarX: return c.x;
            case Op::VarY: return c.y;
            case Op::Neg: return -eval(*n.kids[0], c);
            case Op::Add: return eval(*n.kids[0], c) + eval(*n.kids[1], c);
            case Op::Sub: return eval(*n.kids[0], c) - eval(*n.kids[1], c);
            case Op::Mul: return eval(*n.kids[0], c) * eval(*n.kids[1], c);
            case Op::Div: return eval(*n.kids[0], c) / eval(*n.kids[1], c);
            case Op::Pow: return std::pow(eval(*n.kids[0], c), eval(*n.kids[1], c));
            case Op::Call: return call(n, c);
        }
        return NAN;
    }

    static double call(const Node& n, const Ctx& c) {
        const double a = eval(*n.kids[0], c);
        if (n.fn == "log") return std::log(a);
        if (n.fn == "exp") return std::exp(a);
        if (n.fn == "sqrt") return std::sqrt(a);
        if (n.fn == "abs") return std::abs(a);
        if (n.fn == "sin") return std::sin(a);
        if (n.fn == "cos") return std::cos(a);
        if (n.fn == "step") return a > 0.0 ? 1.0 : 0.0;
        const double b = eval(*n.kids[1], c);
        if (n.fn == "min") return std::min(a, b);
        if (n.fn == "max") return std::max(a, b);
        if (n.fn == "pow") return std::pow(a, b);
        return NAN;
    }

    struct Parser {
        std::string_view s;
        std::size_t pos;
        const std::map<std::string, double>& constants;
        int bar_depth = 0;

        void skip_ws() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        bool eat(char ch) {
            skip_ws();
            if (pos < s.size() && s[pos] == ch) {
                ++pos;
                return true;
            }
            return false;
        }
        [[noreturn]] void fail(const std::string& what) const {
            throw ValidationError("expression: " + what + " at offset " + std::to_string(pos) + " in '" +
                                  std::string(s) + "'");
        }
        static NodePtr make(Op op, std::vector<NodePtr> kids = {}, double v = 0.0, std::string fn = {}) {
            auto n = std::make_shared<Node>();
            n->op = op;
            n->kids = std::move(kids);
            n->value = v;
            n->fn = std::move(fn);
            return n;
        }

        NodePtr parse_expr() {
            auto lhs = parse_term();
            for (;;) {
                if (eat('+')) lhs = make(Op::Add, {lhs, parse_term()});
                else if (eat('-')) lhs = make(Op::Sub, {lhs, parse_term()});
                else return lhs;
            }
        }
        NodePtr parse_term() {
            auto lhs = parse_unary();
            for (;;) {
                if (eat('*')) lhs = make(Op::Mul, {lhs, parse_unary()});
                else if (eat('/')) lhs = make(Op::Div, {lhs, parse_unary()});
                else return lhs;
            }
        }
        NodePtr parse_unary() {
            if (eat('-')) return make(Op::Neg, {parse_unary()});
            if (eat('+')) return parse_unary();
            return parse_power();
        }
        NodePtr parse_power() {
            auto base = parse_primary();
            if (eat('^')) return make(Op::Pow, {base, parse_unary()});
            return base;
        }
        NodePtr parse_primary() {
            skip_ws();
            if (pos >= s.size()) fail("unexpected end");
            const char ch = s[pos];
            if (ch == '(') {
                ++pos;
                auto e = parse_expr();
                if (!eat(')')) fail("expected ')'");
                return e;
            }
            if (ch == '|') {
                ++pos;
                ++bar_depth;
                skip_ws();
                // |x| is the Euclidean norm of the point.
                if (pos + 1 < s.size() && s[pos] == 'x') {
                    std::size_t q = pos + 1;
                    while (q < s.size() && std::isspace(static_cast<unsigned char>(s[q]))) ++q;
                    if (q < s.size() && s[q] == '|') {
                        pos = q + 1;
                        --bar_depth;
                        return make(Op::VarR);
                    }
                }
                auto e = parse_expr();
                if (!eat('|')) fail("expected closing '|'");
                --bar_depth;
                return make(Op::Call, {e}, 0.0, "abs");
            }
            if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
                std::size_t q = pos;
                while (q < s.size() && (std::isdigit(static_cast<unsigned char>(s[q])) || s[q] == '.')) ++q;
                if (q < s.size() && (s[q] == 'e' || s[q] == 'E')) {
                    std::size_t t = q + 1;
                    if (t < s.size() && (s[t] == '+' || s[t] == '-')) ++t;
                    if (t < s.size() && std::isdigit(static_cast<unsigned char>(s[t]))) {
                        q = t;
                        while (q < s.size() && std::isdigit(static_cast<unsigned char>(s[q]))) ++q;
                    }
                }
                const double v = parse_double(s.substr(pos, q - pos));
                pos = q;
                return make(Op::Num, {}, v);
            }
            if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
                std::size_t q = pos;
                while (q < s.size() && (std::isalnum(static_cast<unsigned char>(s[q])) || s[q] == '_')) ++q;
                std::string name(s.substr(pos, q - pos));
                pos = q;
                if (eat('(')) {
                    static const std::map<std::string, int> arity = {
                        {"log", 1}, {"exp", 1}, {"sqrt", 1}, {"abs", 1}, {"sin", 1}, {"cos", 1},
                        {"step", 1}, {"min", 2}, {"max", 2}, {"pow", 2}};
                    auto it = arity.find(name);
                    if (it == arity.end()) fail("unknown function '" + name + "'");
                    std::vector<NodePtr> args{parse_expr()};
                    while (eat(',')) args.push_back(parse_expr());
                    if (!eat(')')) fail("expected ')'");
                    if (static_cast<int>(args.size()) != it->second) fail("wrong argument count for '" + name + "'");
                    return make(Op::Call, std::move(args), 0.0, name);
                }
                if (name == "r") return make(Op::VarR);
                if (name == "x") return make(Op::VarX);
                if (name == "y") return make(Op::VarY);
                if (name == "pi") return make(Op::Num, {}, std::numbers::pi);
                if (name == "e") return make(Op::Num, {}, std::numbers::e);
                if (auto c = constants.find(name); c != constants.end()) return make(Op::Num, {}, c->second);
                fail("unknown name '" + name + "'");
            }
            fail(std::string("unexpected character '") + ch + "'");
        }
    };

    NodePtr root_;
    std::string text_;
};

}  // namespace fhe
