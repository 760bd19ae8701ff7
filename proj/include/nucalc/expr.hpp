#pragma once

// Single-variable expression language over the variable `t`:
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := unary ('^' factor)?            -- right associative
//   unary  := '-'? atom
//   atom   := number | 't' | fn '(' expr ')' | '(' expr ')'
//   fn     := sin | cos | exp | ln | abs
//
// Note the grammar's binding: "-t^2" is (-t)^2.  Values come from plain
// recursive evaluation; first derivatives come from forward-mode dual
// numbers, so they are exact (no finite differencing).

#include <nucalc/errors.hpp>

#include <memory>
#include <string>
#include <string_view>

namespace nucalc {

namespace expr_detail {
struct Node;
}

struct EvalPair;

// Immutable parsed expression; cheap to copy and safe to share across
// threads (evaluation never mutates the tree).
class FnHandle {
public:
    FnHandle() = default;
    bool valid() const { return static_cast<bool>(root_); }

private:
    explicit FnHandle(std::shared_ptr<const expr_detail::Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const expr_detail::Node> root_;

    friend FnHandle parse(std::string_view text);
    friend double eval(const FnHandle& f, double t);
    friend EvalPair eval_d(const FnHandle& f, double t);
    friend std::string render(const FnHandle& f);
    friend FnHandle substitute(const FnHandle& outer, const FnHandle& inner);
};

struct EvalPair {
    double value;
    double derivative;
};

// Parse or throw ParseError carrying the byte offset of the offending token
// and what was expected there.
FnHandle parse(std::string_view text);

// Evaluate at t.  DomainError for division by zero, ln of a nonpositive
// value, or a non-integer power of a negative base; OverflowError when an
// intermediate leaves double range.
double eval(const FnHandle& f, double t);

// Value and exact first derivative at t.  Same errors as eval, plus
// NonDifferentiableError for abs at 0 and for t^e with non-constant exponent
// at nonpositive base.
EvalPair eval_d(const FnHandle& f, double t);

// Canonical text form; parsing it back yields an expression that evaluates
// identically.
std::string render(const FnHandle& f);

// outer with every occurrence of t replaced by inner (function composition
// outer(inner(t))).  Shares subtrees; no copying.
FnHandle substitute(const FnHandle& outer, const FnHandle& inner);

}  // namespace nucalc
