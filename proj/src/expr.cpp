#include <nucalc/expr.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace nucalc {

namespace expr_detail {

enum class Kind { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Ln, Abs };

struct Node {
    Kind kind;
    double num = 0.0;
    std::shared_ptr<const Node> a, b;
};

using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_num(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Num;
    n->num = v;
    return n;
}

// ---- parser ----------------------------------------------------------------

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr run() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("end of input or an operator");
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& expected) {
        std::ostringstream os;
        os << "parse error at offset " << pos_ << ": expected " << expected;
        if (pos_ < text_.size())
            os << ", found '" << text_[pos_] << "'";
        else
            os << ", found end of input";
        throw ParseError(os.str(), pos_);
    }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    bool peek_is(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool consume(char c) {
        if (peek_is(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (consume('+'))
                lhs = make(Kind::Add, lhs, parse_term());
            else if (consume('-'))
                lhs = make(Kind::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_factor();
        for (;;) {
            if (consume('*'))
                lhs = make(Kind::Mul, lhs, parse_factor());
            else if (consume('/'))
                lhs = make(Kind::Div, lhs, parse_factor());
            else
                return lhs;
        }
    }

    NodePtr parse_factor() {
        NodePtr base = parse_unary();
        if (consume('^')) return make(Kind::Pow, base, parse_factor());  // right assoc
        return base;
    }

    NodePtr parse_unary() {
        if (consume('-')) return make(Kind::Neg, parse_atom());
        return parse_atom();
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("a number, 't', a function, or '('");
        const char ch = text_[pos_];
        if (consume('(')) {
            NodePtr inner = parse_expr();
            if (!consume(')')) fail("')'");
            return inner;
        }
        if (ch == 't' && !is_ident_start_ahead()) {
            ++pos_;
            return make(Kind::Var);
        }
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(ch))) return parse_call();
        fail("a number, 't', a function, or '('");
    }

    // Distinguish the variable from an identifier like "tan": after 't' the
    // next char must not continue a name.
    bool is_ident_start_ahead() {
        return pos_ + 1 < text_.size() &&
               std::isalpha(static_cast<unsigned char>(text_[pos_ + 1]));
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
        }
        if (pos_ == start || (pos_ == start + 1 && text_[start] == '.')) {
            pos_ = start;
            fail("a digit");
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            const std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;  // "2e" is the number 2 followed by junk; let the caller complain
            }
        }
        const std::string tok(text_.substr(start, pos_ - start));
        try {
            return make_num(std::stod(tok));
        } catch (const std::exception&) {
            pos_ = start;
            fail("a representable number");
        }
    }

    NodePtr parse_call() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        Kind k;
        if (name == "sin")
            k = Kind::Sin;
        else if (name == "cos")
            k = Kind::Cos;
        else if (name == "exp")
            k = Kind::Exp;
        else if (name == "ln")
            k = Kind::Ln;
        else if (name == "abs")
            k = Kind::Abs;
        else {
            pos_ = start;
            fail("one of sin, cos, exp, ln, abs");
        }
        if (!consume('(')) fail("'(' after function name");
        NodePtr arg = parse_expr();
        if (!consume(')')) fail("')'");
        return make(k, arg);
    }
};

// ---- evaluation ------------------------------------------------------------

[[noreturn]] void overflow_at(const char* what, double t) {
    std::ostringstream os;
    os << what << " left double range at t = " << t;
    throw OverflowError(os.str());
}

double check_finite(double v, double t) {
    if (!std::isfinite(v)) overflow_at("subexpression", t);
    return v;
}

bool integer_valued(double e) { return e == std::floor(e) && std::fabs(e) <= 1e9; }

double eval_node(const Node& n, double t) {
    switch (n.kind) {
        case Kind::Num: return n.num;
        case Kind::Var: return t;
        case Kind::Add: return check_finite(eval_node(*n.a, t) + eval_node(*n.b, t), t);
        case Kind::Sub: return check_finite(eval_node(*n.a, t) - eval_node(*n.b, t), t);
        case Kind::Mul: return check_finite(eval_node(*n.a, t) * eval_node(*n.b, t), t);
        case Kind::Div: {
            const double denom = eval_node(*n.b, t);
            if (denom == 0.0) {
                std::ostringstream os;
                os << "division by zero at t = " << t;
                throw DomainError(os.str());
            }
            return check_finite(eval_node(*n.a, t) / denom, t);
        }
        case Kind::Pow: {
            const double base = eval_node(*n.a, t);
            const double expo = eval_node(*n.b, t);
            if (base < 0.0 && !integer_valued(expo)) {
                std::ostringstream os;
                os << "non-integer power " << expo << " of negative base " << base;
                throw DomainError(os.str());
            }
            if (base == 0.0 && expo < 0.0) {
                std::ostringstream os;
                os << "zero raised to negative power " << expo;
                throw DomainError(os.str());
            }
            return check_finite(std::pow(base, expo), t);
        }
        case Kind::Neg: return -eval_node(*n.a, t);
        case Kind::Sin: return std::sin(eval_node(*n.a, t));
        case Kind::Cos: return std::cos(eval_node(*n.a, t));
        case Kind::Exp: return check_finite(std::exp(eval_node(*n.a, t)), t);
        case Kind::Ln: {
            const double v = eval_node(*n.a, t);
            if (!(v > 0.0)) {
                std::ostringstream os;
                os << "ln of nonpositive value " << v << " at t = " << t;
                throw DomainError(os.str());
            }
            return std::log(v);
        }
        case Kind::Abs: return std::fabs(eval_node(*n.a, t));
    }
    throw Error("corrupt expression node");
}

struct Dual {
    double v;
    double d;
};

Dual eval_dual(const Node& n, double t) {
    switch (n.kind) {
        case Kind::Num: return {n.num, 0.0};
        case Kind::Var: return {t, 1.0};
        case Kind::Add: {
            const Dual x = eval_dual(*n.a, t), y = eval_dual(*n.b, t);
            return {check_finite(x.v + y.v, t), x.d + y.d};
        }
        case Kind::Sub: {
            const Dual x = eval_dual(*n.a, t), y = eval_dual(*n.b, t);
            return {check_finite(x.v - y.v, t), x.d - y.d};
        }
        case Kind::Mul: {
            const Dual x = eval_dual(*n.a, t), y = eval_dual(*n.b, t);
            return {check_finite(x.v * y.v, t), x.d * y.v + x.v * y.d};
        }
        case Kind::Div: {
            const Dual x = eval_dual(*n.a, t), y = eval_dual(*n.b, t);
            if (y.v == 0.0) {
                std::ostringstream os;
                os << "division by zero at t = " << t;
                throw DomainError(os.str());
            }
            const double q = check_finite(x.v / y.v, t);
            return {q, (x.d - q * y.d) / y.v};
        }
        case Kind::Pow: {
            const Dual x = eval_dual(*n.a, t), y = eval_dual(*n.b, t);
            if (y.d == 0.0 && integer_valued(y.v)) {
                // Constant integer exponent: valid for any base sign.
                if (x.v == 0.0 && y.v < 0.0) {
                    std::ostringstream os;
                    os << "zero raised to negative power " << y.v;
                    throw DomainError(os.str());
                }
                const double v = check_finite(std::pow(x.v, y.v), t);
                const double dv = (y.v == 0.0) ? 0.0 : y.v * std::pow(x.v, y.v - 1.0) * x.d;
                return {v, check_finite(dv, t)};
            }
            if (!(x.v > 0.0)) {
                std::ostringstream os;
                os << "derivative of power with base " << x.v
                   << " requires a positive base (or a constant integer exponent)";
                throw NonDifferentiableError(os.str());
            }
            const double v = check_finite(std::pow(x.v, y.v), t);
            const double dv = v * (y.d * std::log(x.v) + y.v * x.d / x.v);
            return {v, check_finite(dv, t)};
        }
        case Kind::Neg: {
            const Dual x = eval_dual(*n.a, t);
            return {-x.v, -x.d};
        }
        case Kind::Sin: {
            const Dual x = eval_dual(*n.a, t);
            return {std::sin(x.v), std::cos(x.v) * x.d};
        }
        case Kind::Cos: {
            const Dual x = eval_dual(*n.a, t);
            return {std::cos(x.v), -std::sin(x.v) * x.d};
        }
        case Kind::Exp: {
            const Dual x = eval_dual(*n.a, t);
            const double v = check_finite(std::exp(x.v), t);
            return {v, check_finite(v * x.d, t)};
        }
        case Kind::Ln: {
            const Dual x = eval_dual(*n.a, t);
            if (!(x.v > 0.0)) {
                std::ostringstream os;
                os << "ln of nonpositive value " << x.v << " at t = " << t;
                throw DomainError(os.str());
            }
            return {std::log(x.v), x.d / x.v};
        }
        case Kind::Abs: {
            const Dual x = eval_dual(*n.a, t);
            if (x.v == 0.0) {
                std::ostringstream os;
                os << "abs is not differentiable at 0 (t = " << t << ")";
                throw NonDifferentiableError(os.str());
            }
            return {std::fabs(x.v), (x.v > 0.0 ? 1.0 : -1.0) * x.d};
        }
    }
    throw Error("corrupt expression node");
}

// ---- rendering -------------------------------------------------------------

// Precedence levels used to decide parenthesization; mirrors the grammar.
// 1: + -   2: * /   3: ^   4: unary minus   5: atoms
int prec_of(const Node& n) {
    switch (n.kind) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Pow: return 3;
        case Kind::Neg: return 4;
        case Kind::Num:
            // A negative literal prints with a leading minus, i.e. at
            // unary-minus level, not as a bare atom.
            return (n.num < 0.0 || std::signbit(n.num)) ? 4 : 5;
        default: return 5;
    }
}

void render_node(const Node& n, std::string& out);

void render_child(const Node& child, int min_prec, std::string& out) {
    if (prec_of(child) < min_prec) {
        out += '(';
        render_node(child, out);
        out += ')';
    } else {
        render_node(child, out);
    }
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void render_node(const Node& n, std::string& out) {
    switch (n.kind) {
        case Kind::Num:
            if (n.num < 0.0 || std::signbit(n.num)) {
                // The grammar has no negative literals; emit as unary minus.
                out += '-';
                out += format_number(-n.num);
            } else {
                out += format_number(n.num);
            }
            return;
        case Kind::Var: out += 't'; return;
        case Kind::Add:
            render_child(*n.a, 1, out);
            out += " + ";
            render_child(*n.b, 2, out);
            return;
        case Kind::Sub:
            render_child(*n.a, 1, out);
            out += " - ";
            render_child(*n.b, 2, out);
            return;
        case Kind::Mul:
            render_child(*n.a, 2, out);
            out += "*";
            render_child(*n.b, 3, out);
            return;
        case Kind::Div:
            render_child(*n.a, 2, out);
            out += "/";
            render_child(*n.b, 3, out);
            return;
        case Kind::Pow:
            // Base must be unary/atom level; exponent may be another power
            // (right associativity) but not a looser operator.
            render_child(*n.a, 4, out);
            out += "^";
            render_child(*n.b, 3, out);
            return;
        case Kind::Neg:
            out += '-';
            render_child(*n.a, 5, out);
            return;
        case Kind::Sin:
        case Kind::Cos:
        case Kind::Exp:
        case Kind::Ln:
        case Kind::Abs: {
            switch (n.kind) {
                case Kind::Sin: out += "sin("; break;
                case Kind::Cos: out += "cos("; break;
                case Kind::Exp: out += "exp("; break;
                case Kind::Ln: out += "ln("; break;
                default: out += "abs("; break;
            }
            render_node(*n.a, out);
            out += ')';
            return;
        }
    }
}

NodePtr substitute_node(const NodePtr& n, const NodePtr& replacement) {
    if (!n) return nullptr;
    if (n->kind == Kind::Var) return replacement;
    if (!n->a && !n->b) return n;  // literal: share
    auto copy = std::make_shared<Node>();
    copy->kind = n->kind;
    copy->num = n->num;
    copy->a = substitute_node(n->a, replacement);
    copy->b = substitute_node(n->b, replacement);
    return copy;
}

}  // namespace expr_detail

FnHandle parse(std::string_view text) {
    expr_detail::Parser p(text);
    return FnHandle(p.run());
}

double eval(const FnHandle& f, double t) {
    if (!f.valid()) throw ValidationError("evaluating an empty expression handle");
    return expr_detail::eval_node(*f.root_, t);
}

EvalPair eval_d(const FnHandle& f, double t) {
    if (!f.valid()) throw ValidationError("evaluating an empty expression handle");
    const expr_detail::Dual d = expr_detail::eval_dual(*f.root_, t);
    return {d.v, d.d};
}

std::string render(const FnHandle& f) {
    if (!f.valid()) throw ValidationError("rendering an empty expression handle");
    std::string out;
    expr_detail::render_node(*f.root_, out);
    return out;
}

FnHandle substitute(const FnHandle& outer, const FnHandle& inner) {
    if (!outer.valid() || !inner.valid())
        throw ValidationError("substitute requires two parsed expressions");
    return FnHandle(expr_detail::substitute_node(outer.root_, inner.root_));
}

}  // namespace nucalc
