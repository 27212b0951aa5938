#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wit/typesys.hpp"

// Combinatory/lambda term calculus of the witnessing target theory: typed
// lambda terms over the combinator constants, Goedel recursor, conditional,
// the star (finite set) constructors with their canonical normal form, the
// numeric set-maximum and the hereditary pointwise maximum.
namespace wit {

struct term_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a rewrite exceeds its step budget (never silent).
struct budget_error : term_error {
    using term_error::term_error;
};

enum class ConstKind {
    Pi,        // {rho, sigma}        : rho -> sigma -> rho
    Sigma,     // {rho, sigma, gamma} : (rho -> sigma -> gamma) -> (rho -> sigma) -> rho -> gamma
    Zero,      //                     : N
    Succ,      //                     : N -> N
    Bool0,     //                     : B
    Bool1,     //                     : B
    Rec,       // {sigma}             : N -> sigma -> (N -> sigma -> sigma) -> sigma
    Cond,      // {sigma}             : B -> sigma -> sigma -> sigma
    Default,   // {X ground}          : X   (declared default constant)
    Singleton, // {sigma}             : sigma -> sigma*
    Union,     // {sigma}             : sigma* -> sigma* -> sigma*
    BigUnion,  // {sigma, tau}        : sigma* -> (sigma -> tau*) -> tau*
    MaxSet,    //                     : N* -> N
    MaxPair,   // {sigma arithmetical}: sigma -> sigma -> sigma
};

struct Const {
    ConstKind kind;
    std::vector<TyPtr> args; // type parameters, see catalog above
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    enum class Kind { Var, Con, App, Lam };
    Kind kind;
    std::string name; // Var name / Lam binder
    TyPtr ty;         // Var type / Lam binder type
    Const con;        // Con
    TermPtr fn, arg;  // App
    TermPtr body;     // Lam
};

TermPtr var(const std::string& name, TyPtr ty);
TermPtr con(ConstKind kind, std::vector<TyPtr> tyargs = {});
TermPtr app(TermPtr fn, TermPtr arg);
TermPtr app(TermPtr fn, const std::vector<TermPtr>& args);
TermPtr lam(const std::string& name, TyPtr ty, TermPtr body);
// Nested lambda over a parameter list.
TermPtr lam(const std::vector<std::pair<std::string, TyPtr>>& params, TermPtr body);

TermPtr numeral(std::uint64_t n);
std::optional<std::uint64_t> as_numeral(const TermPtr& t);
TermPtr bool_lit(int v); // 0 or 1

// Type of a constant instance (validates the type-parameter count/shape).
TyPtr const_ty(const Const& c);

using VarCtx = std::map<std::string, TyPtr>;
// Infers the type; free variables use their embedded type, which must agree
// with ctx when present.  Errors on any ill-typed application.
TyPtr typecheck(const TermPtr& t, const VarCtx& ctx = {});

bool equal(const TermPtr& a, const TermPtr& b);
int compare(const TermPtr& a, const TermPtr& b); // total structural order
bool free_in(const std::string& x, const TermPtr& t);
std::set<std::string> free_vars(const TermPtr& t);
bool is_closed(const TermPtr& t);
// Capture-avoiding substitution of s for the free variable x.
TermPtr subst(const TermPtr& t, const std::string& x, const TermPtr& s);

// Application spine: t = head a1 ... an.
std::pair<TermPtr, std::vector<TermPtr>> spine(const TermPtr& t);

// ---------------------------------------------------------------------------
// Normalisation.  Redexes: beta, Pi, Sigma, Rec on numerals, Cond on Boolean
// literals, big-union over singleton / over binary union, set-maximum and
// pointwise maximum on canonical arguments, and canonicalisation of binary
// unions (sorted, deduplicated, right-nested).  Default strategy is
// leftmost-outermost; `normalize_seeded` picks a uniformly random redex each
// step (for confluence testing).  Both error out when the step budget is
// exceeded.
// ---------------------------------------------------------------------------
inline constexpr std::size_t default_step_budget = 100000;

TermPtr normalize(const TermPtr& t, std::size_t step_budget = default_step_budget);
TermPtr normalize_seeded(const TermPtr& t, std::uint64_t seed,
                         std::size_t step_budget = default_step_budget);
// Innermost-first deterministic strategy (second fixed strategy).
TermPtr normalize_applicative(const TermPtr& t, std::size_t step_budget = default_step_budget);
bool is_normal(const TermPtr& t);

// ---------------------------------------------------------------------------
// Canonical finite sets.  A canonical set term is {e1} u ({e2} u (... {en}))
// with e1 < e2 < ... strictly in the structural term order, all ei normal.
// ---------------------------------------------------------------------------
struct ValueSet {
    TyPtr elem_ty;
    std::vector<TermPtr> elems; // sorted, deduplicated, non-empty
};

// Builds the canonical set term (sorts and deduplicates; errors when empty).
TermPtr set_term(const TyPtr& elem_ty, std::vector<TermPtr> elems);
// Reads any tree of singletons/binary unions; nullopt when the term is not a
// set literal.  Does not require canonical order.
std::optional<ValueSet> as_set(const TermPtr& t);
bool is_canonical_set(const TermPtr& t);

// ---------------------------------------------------------------------------
// Bracket abstraction: [x]t is Lam-free when t is, beta-adequate, with the
// eta optimisation ([x](t x) = t when x not free in t); the identity is the
// Sigma-Pi-Pi combinator.  `combinatorize` eliminates every Lam bottom-up.
// ---------------------------------------------------------------------------
TermPtr bracket_abstract(const std::string& x, const TyPtr& xty, const TermPtr& t);
TermPtr combinatorize(const TermPtr& t);

// ---------------------------------------------------------------------------
// Defaults and maxima.
// ---------------------------------------------------------------------------
// Default element: declared constant at ground types, lambda at function
// types, singleton of the element default at star types.
TermPtr default_term(const TyPtr& ty, const TypeRegistry& reg);
// Hereditary pointwise maximum (arithmetical types only).
TermPtr max_term(const TyPtr& ty);
// Maximum of a finite set, sigma* -> sigma; MaxSet at N, lifted pointwise
// through function types (arithmetical types only).
TermPtr maxset_term(const TyPtr& ty);

// Small derived-arithmetic library (all closed, all in the calculus).
TermPtr pred_term();            // N -> N
TermPtr monus_term();           // N -> N -> N  (truncated subtraction)
TermPtr add_term();             // N -> N -> N
TermPtr iszero_term();          // N -> B       (0 maps to boolean 0 = true)
TermPtr leqb_term();            // N -> N -> B  (boolean 0 = true when <=)
TermPtr interval_term();        // N -> N*      ({0..n})

// ---------------------------------------------------------------------------
// Surface syntax.  Canonical printing: numerals as (num k), Boolean literals
// as (bool 0|1), constant-headed applications inline, canonical sets as
// (set TY e1 ... en), other applications as (app f a ...), binders as
// (lam x TY body), free variables as (var x TY).  The parser additionally
// accepts (zero), (succ t), and plain atoms for variables bound by an
// enclosing binder or supplied through `env`.
// ---------------------------------------------------------------------------
sexpr::NodePtr term_to_sexpr(const TermPtr& t);
TermPtr term_from_sexpr(const sexpr::NodePtr& n, const VarCtx& env = {});
std::string show(const TermPtr& t);
TermPtr parse_term(const std::string& text, const VarCtx& env = {});

// Mathematical rendering used inside formula displays: juxtaposed
// application, decimal numerals, "{a, b}" for set literals, "\x. t" for
// lambdas, "s U t" for unions, "U{x in S} t" for big unions over a lambda.
// Not meant to be parsed back.
std::string show_pretty(const TermPtr& t);

} // namespace wit
