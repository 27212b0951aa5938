#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wit/termcalc.hpp"
#include "wit/typesys.hpp"

// Formulas of the source language (intuitionistic finite-type arithmetic with
// typed equality, membership predicates I(t) and restricted quantifiers),
// the target-side formula constructs produced by the interpretations, the
// theory registry (relations and named axioms) and the sequent-calculus
// derivation checker.
namespace wit {

struct logic_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Formulas.
//
// Source kinds may appear in derivations; target kinds arise only in
// interpreted formulas (displays, verification goals).  A single node type
// keeps interpretation output in the same algebra as its input.
// ---------------------------------------------------------------------------
enum class FKind {
    // source language
    Atom,      // registered relation:  name, terms
    TermEq,    // terms[0] == terms[1]          (typed logical equality)
    NatLeq,    // terms[0] <= terms[1]          (witness-free primitive on N)
    IntMaj,    // terms[0] <|B terms[1]         (intensional majorizability,
               //                                same arithmetical type twice)
    ITypePred, // I(terms[0])                   (membership predicate)
    Bot,
    And,       // kids[0] /\ kids[1]
    Imp,       // kids[0] -> kids[1]
    Forall,    // forall name^ty. kids[0]
    Exists,    // exists name^ty. kids[0]
    BForall,   // forall name^ty | kids[0]. kids[1]   (restricted quantifier)
    BExists,   // exists name^ty | kids[0]. kids[1]
    // target-side constructs
    Top,
    Or,        // kids[0] \/ kids[1]  (display form of the defined disjunction)
    BezemLeq,  // terms[0] <=B terms[1]         (majorizability; rhs dagger-typed)
    SetMem,    // terms[0] in terms[1]          (terms[1] of star type)
    SetForall, // forall name in terms[0]. kids[0]   (name ranges over a set)
    NumForall, // forall name <= terms[0]. kids[0]   (name : N)
    NumExists, // exists name <= terms[0]. kids[0]
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    FKind kind;
    std::string name;            // Atom: relation; binders: bound variable
    TyPtr ty;                    // binders: bound variable type
    std::vector<TermPtr> terms;  // see kind comments
    std::vector<FormulaPtr> kids;
};

FormulaPtr atom(const std::string& rel, std::vector<TermPtr> args);
FormulaPtr term_eq(TermPtr a, TermPtr b);
FormulaPtr nat_leq(TermPtr a, TermPtr b);
FormulaPtr int_maj(TermPtr a, TermPtr b);
FormulaPtr itype(TermPtr t);
FormulaPtr bot();
FormulaPtr top();
FormulaPtr conj(FormulaPtr a, FormulaPtr b);
FormulaPtr imp(FormulaPtr a, FormulaPtr b);
FormulaPtr disj(FormulaPtr a, FormulaPtr b); // target-side display disjunction
FormulaPtr neg(FormulaPtr a); // a -> bot
FormulaPtr forall(const std::string& x, TyPtr ty, FormulaPtr body);
FormulaPtr exists(const std::string& x, TyPtr ty, FormulaPtr body);
FormulaPtr bforall(const std::string& x, TyPtr ty, FormulaPtr bound, FormulaPtr body);
FormulaPtr bexists(const std::string& x, TyPtr ty, FormulaPtr bound, FormulaPtr body);
FormulaPtr bezem_leq(TermPtr a, TermPtr b);
FormulaPtr set_mem(TermPtr a, TermPtr set);
FormulaPtr set_forall(const std::string& x, TermPtr set, FormulaPtr body);
FormulaPtr num_forall(const std::string& x, TermPtr bound, FormulaPtr body);
FormulaPtr num_exists(const std::string& x, TermPtr bound, FormulaPtr body);

// Disjunction is defined, not primitive:
//   a \/ b  :=  exists i^B ((i == 0 -> a) /\ (i == 1 -> b))
// with i the first of i, i0, i1, ... not free in a or b.
FormulaPtr expand_or(const FormulaPtr& a, const FormulaPtr& b);

bool equal(const FormulaPtr& a, const FormulaPtr& b);
int compare(const FormulaPtr& a, const FormulaPtr& b);
// Free variables with their types (name-sorted by map order).
std::map<std::string, TyPtr> free_vars(const FormulaPtr& f);
bool free_in(const std::string& x, const FormulaPtr& f);
// Capture-avoiding substitution of s for the free variable x.
FormulaPtr subst(const FormulaPtr& f, const std::string& x, const TermPtr& s);

bool is_source_formula(const FormulaPtr& f);
// No quantifiers of any flavour (source kinds only otherwise).
bool is_quantifier_free(const FormulaPtr& f);

// Pretty printer.  imp binds loosest (right-assoc), then and; binders extend
// to the end of their argument and are parenthesised inside binary contexts.
std::string show(const FormulaPtr& f);

// ---------------------------------------------------------------------------
// Theories: the type registry plus registered relations and named axioms.
// Axioms flagged `universal` must be witness-free in every base
// interpretation, which is guaranteed by shape: only ==, <=, <|B, bot, top,
// /\, -> and forall may occur.  Such axioms carry no extraction content and
// are checked for truth during evaluation instead.
// ---------------------------------------------------------------------------
struct RelDecl {
    std::string name;
    std::vector<TyPtr> arg_tys;
};

struct AxiomDecl {
    std::string name;
    FormulaPtr formula; // closed
    bool universal = false;
};

struct Theory {
    TypeRegistry types;
    std::map<std::string, RelDecl> relations;
    std::map<std::string, AxiomDecl> axioms;
    bool has_intmaj = false; // intensional majorizability relations available

    void declare_relation(RelDecl r);
    void declare_axiom(AxiomDecl a);
    const RelDecl& relation(const std::string& name) const;
    const AxiomDecl& axiom(const std::string& name) const;
};

// Arithmetic over N and B: no registered relations; universal axioms
// bool-distinct, succ-nonzero, succ-inj, leq-refl, leq-zero, leq-succ,
// leq-trans, leq-succ-mono.
Theory arith_theory();
// arith_theory plus the intensional majorizability relations.
Theory bfi_theory();

// Typechecks a formula: terms well-typed, relation arities/types respected,
// bound variables consistent.  Free variables are collected into `frees`
// (error on conflicting types).  Target kinds are rejected unless
// `allow_target`.
void typecheck_formula(const Theory& th, const FormulaPtr& f,
                       std::map<std::string, TyPtr>& frees,
                       bool allow_target = false);

// Relativization: quantifiers acquire membership guards,
//   (forall x A)' = forall x (I(x) -> A'),   (exists x A)' = exists x (I(x) /\ A'),
// restricted quantifiers use their bound in place of I(x), atoms and
// connectives are untouched.  Target kinds are rejected.
FormulaPtr relativize(const FormulaPtr& f);

// ---------------------------------------------------------------------------
// Sequents and derivations.
// ---------------------------------------------------------------------------
struct Sequent {
    std::vector<FormulaPtr> ctx;
    FormulaPtr succ;
};

bool equal(const Sequent& a, const Sequent& b);
std::string show(const Sequent& s);

enum class Rule {
    // leaves
    Id,         // f                      : f |- f
    BotL,       // f                      : bot |- f
    EqRefl,     // t                      : |- t == t
    Conv,       // t, t2                  : |- t == t2   (same normal form)
    EqSubst,    // x, xty, f qf, t, t2    : f[x:=t], t == t2 |- f[x:=t2]
    Axiom,      // axiom_name             : |- registered axiom
    BoolElim,   // x(=i), f(=D)           : |- D[0] /\ D[1] -> forall i^B D
    BQDef,      // flag(forall?), lr, x, xty, f(bound), f2(body)
                //                        : |- one direction of the restricted-
                //                          quantifier defining equivalence
    IntMajAx1,  //                        : |- forall x,y^N (x<|By <-> x<=y)
    IntMajAx2,  // xty(sigma), yty(tau)   : |- monotone application axiom
    // structural / logical rules
    Weaken,     // f, i   : G |- c        =>  G+f@i |- c
    Contract,   // i      : G,A@i,A@i+1 |- c  =>  drop the copy
    Swap,       // i      : swap ctx i, i+1
    AndL,       // i      : A@i, B@i+1 become (A /\ B)@i
    AndR,       //        : G |- A ; D |- B  =>  G,D |- A /\ B
    ImpR,       //        : A,G |- B  =>  G |- A -> B
    ImpL,       //        : G |- A ; B,D |- C  =>  (A -> B),G,D |- C
    Cut,        //        : G |- B ; B,D |- C  =>  G,D |- C
    ForallR,    // x, xty : G |- A  =>  G |- forall x A       (x not free in G)
    ForallL,    // f(=forall x A), t : A[x:=t],G |- C  =>  f,G |- C
    ExistsR,    // f(=exists x A), t : G |- A[x:=t]  =>  G |- f
    ExistsL,    // x, xty : A,G |- C  =>  (exists x A),G |- C (x fresh for G, C)
    Induction,  // x, f(=A) : |- A[0] ; |- forall x (A -> A[S x])
                //          =>  |- forall x^N A     (empty contexts, FV(A)<={x})
    IntMajRule, // t, t2, x, x2(=y) : G, x<|By |- tx<|Bt2y /\ t2x<|Bt2y
                //          =>  G |- t <|B t2       (x, y fresh for conclusion)
};

struct Derivation;
using DerivPtr = std::shared_ptr<const Derivation>;

struct Derivation {
    Rule rule;
    FormulaPtr f, f2;
    TermPtr t, t2;
    std::string x, x2;
    TyPtr xty, yty;
    std::size_t i = 0;
    bool flag = false; // BQDef: universal flavour
    bool lr = true;    // BQDef: left-to-right direction
    std::string axiom_name;
    std::vector<DerivPtr> kids;
};

// Conclusion sequents, one per node, synthesised by the checker.
struct CheckedNode {
    Sequent seq;
    const Derivation* node = nullptr;
    std::vector<CheckedNode> kids;
};

// Validates the derivation bottom-up against the theory: formula typing,
// premise shapes, eigenvariable conditions, conversion equalities.  Throws
// logic_error carrying the node path (e.g. "proof/1/0") on any failure.
CheckedNode check_derivation(const Theory& th, const DerivPtr& d);

// A derivation file: stated conclusion plus proof tree.  `check_file`
// additionally requires the synthesised conclusion to equal the stated one.
struct DerivationFile {
    Theory theory;
    Sequent stated;
    DerivPtr proof;
};

CheckedNode check_file(const DerivationFile& file);

// ---------------------------------------------------------------------------
// Surface syntax (S-expressions).
//
//   F ::= (bot) | (top) | (eq S T) | (leq S T) | (intmaj S T) | (bleq S T)
//       | (mem S T) | (itype S) | (rel NAME S*)
//       | (and F F) | (imp F F) | (disj F F) | (or F F) | (not F) | (iff F F)
//       | (forall x TY F) | (exists x TY F)
//       | (bforall x TY F F) | (bexists x TY F F)
//       | (sforall x S F) | (numforall x T F) | (numexists x T F)
//
// (or ...), (not ...), (iff ...) are expanded while parsing and never
// printed.  Bound variables occur in terms as plain atoms.
// ---------------------------------------------------------------------------
sexpr::NodePtr formula_to_sexpr(const FormulaPtr& f);
FormulaPtr formula_from_sexpr(const sexpr::NodePtr& n, const VarCtx& env = {});
FormulaPtr parse_formula(const std::string& text, const VarCtx& env = {});

sexpr::NodePtr sequent_to_sexpr(const Sequent& s);
Sequent sequent_from_sexpr(const sexpr::NodePtr& n); // (seq (ctx F*) F)

// (theory arith|bfi DECL*) with DECL ::= (rel NAME (TY*))
//                                      | (axiom NAME universal|witnessed F)
Theory theory_from_sexpr(const sexpr::NodePtr& n);

sexpr::NodePtr derivation_to_sexpr(const DerivPtr& d);
DerivPtr derivation_from_sexpr(const sexpr::NodePtr& n);

// Whole check file:
//   (check (theory ...) (conclusion (seq ...)) (proof NODE))
DerivationFile check_file_from_sexpr(const sexpr::NodePtr& n);
DerivationFile parse_check_file(const std::string& text);

} // namespace wit
