#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wit/logic.hpp"

// Witness interpretations: base interpretations assigning an information
// relation to every relation symbol and membership predicate, the symbolic
// interpretation of formulas with named witness tuples, joining of bounds,
// canonical extension to function types, and the display normalizer that
// rewrites interpreted bodies into their familiar shapes.
namespace wit {

struct interp_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Information relations.
//
// A relation symbol R(x1,...,xr) is interpreted by a target formula ("schema")
// over reserved hole variables:  %0,%1,... stand for the relation arguments,
// %a0,%a1,... for the positive witnesses (types tplus) and %b0,%b1,... for the
// counter-witnesses (types tminus).  Logical equality is not registered here:
// it is fixed, witness-free, to term equality.  `joins`, when supplied, holds
// one closed binary term per positive component (of type t -> t -> t) with the
// intended reading "least upper bound for this component"; relations without
// positive witnesses support joining trivially.
// ---------------------------------------------------------------------------
TermPtr arg_hole(std::size_t i, TyPtr ty);  // %i
TermPtr wit_hole(std::size_t i, TyPtr ty);  // %ai
TermPtr cwit_hole(std::size_t i, TyPtr ty); // %bi

struct InfoRelation {
    TyTuple args;   // argument types (hole %i has type args[i])
    TyTuple tplus;  // positive witness types
    TyTuple tminus; // counter-witness types
    FormulaPtr schema;
    std::vector<TermPtr> joins; // empty = none declared; else one per tplus entry

    bool has_joins() const { return joins.size() == tplus.size(); }
};

// Validates hole usage (every free variable of the schema is a hole of this
// relation, at the recorded type) and join shapes.  Throws interp_error.
void check_info_relation(const InfoRelation& r);

// Schema instantiation with actual arguments and witness terms (sizes and
// types checked).  Argument terms may not mention reserved hole names of
// other argument positions.
FormulaPtr instantiate(const InfoRelation& r, const std::vector<TermPtr>& args,
                       const std::vector<TermPtr>& wits,
                       const std::vector<TermPtr>& cwits);

// The standard membership-relation building blocks, one per flavour:
//   precise      x == a                       (a : sigma)
//   uniform      true                         (no witnesses)
//   bounding     x <= n        at N           (n : N, join max)
//   majorant     x <=B a       at unbounded sigma (a : sigma-dagger, join max)
//   finite-set   x in F                       (F : sigma*, join union)
InfoRelation precise_itype(TyPtr sigma);
InfoRelation uniform_itype(TyPtr sigma);
InfoRelation bounding_itype_nat();
InfoRelation majorant_itype(TyPtr sigma);
InfoRelation finite_set_itype(TyPtr sigma);

// ---------------------------------------------------------------------------
// Base interpretations.  `relations` interprets the theory's named relation
// symbols; `itype_fn` interprets the membership predicate at each type and
// receives the interpretation itself so canonical extensions can recurse.
// Instances are immutable after construction; every operation is pure.
// ---------------------------------------------------------------------------
struct BaseInterpretation {
    std::string tag; // pp | cp | mb | f | cb | custom
    std::map<std::string, InfoRelation> relations;
    std::function<InfoRelation(const BaseInterpretation&, const TyPtr&)> itype_fn;

    const InfoRelation& relation(const std::string& name) const;
    InfoRelation itype_rel(const TyPtr& ty) const;
};

// The five stock bases over the arithmetic ground types N and B:
//   pp  precise at every type
//   cp  precise at N and B, canonical at function types
//   mb  bounding at N, witness-free at bounded types, majorant at unbounded ones
//   f   finite-set at every type except B (witness-free)
//   cb  bounding at N, witness-free at B, canonical at function types
BaseInterpretation preset(const std::string& tag);

// Extends a ground-type base to function types by interpreting membership at
// rho -> tau as the interpretation of  forall x^rho (I(x) -> I(h x)); joins
// are derived componentwise when the ground joins exist.
BaseInterpretation canonical_extend(BaseInterpretation ground_base);

// Base files:
//   (base TAG ENTRY*)
//   ENTRY ::= (rel NAME (tplus TY*) (tminus TY*) (schema F) [(joins T*)])
// Entries add information relations for the theory's named relation symbols
// on top of the preset selected by TAG.  Schemas are parsed with the hole
// variables %i/%ai/%bi in scope.
BaseInterpretation base_from_sexpr(const sexpr::NodePtr& n, const Theory& th);
BaseInterpretation parse_base(const std::string& text, const Theory& th);

// ---------------------------------------------------------------------------
// Interpreted formulas: a target body plus the named positive (a_vars) and
// negative (b_vars) witness variables, free in the body.  Free variables of
// the body are contained in a_vars, b_vars and the source formula's frees.
// ---------------------------------------------------------------------------
struct WitnessVar {
    std::string name;
    TyPtr ty;
};

struct InterpretedFormula {
    FormulaPtr body;
    std::vector<WitnessVar> a_vars, b_vars;
};

// "pos NAME : TY" / "neg NAME : TY" lines followed by "body FORMULA".
std::string show(const InterpretedFormula& f);

// ---------------------------------------------------------------------------
// Interpretation options.
//
// `simple_exists` lists types whose existential clause should collapse to the
// direct one (no finite-set quantification of the counter-witnesses).  This
// is sound exactly when the membership guard pins the witness down:
//   - precise membership: eligible, the clause change is applied;
//   - witness-free membership: accepted, but the simplification is the
//     identity (the guard contributes nothing to collapse);
//   - anything else: rejected unless `unchecked` is set.
// `simplified_disjunction` switches the existential clause at the Boolean
// type to the unstarred form, giving the one-line disjunction clause.  It
// requires the witness-free Boolean base and is only valid when the target
// evaluator has verified the finite-distribution implication on the budgets
// in play; callers are expected to run that check before setting the flag.
// ---------------------------------------------------------------------------
enum class CollapseEligibility { Precise, Uniform, No };

CollapseEligibility exists_collapse_eligibility(const BaseInterpretation& base,
                                                const TyPtr& sigma);

struct InterpOptions {
    std::vector<TyPtr> simple_exists;
    bool simplified_disjunction = false;
    bool unchecked = false;
};

// ---------------------------------------------------------------------------
// Interpretation proper.
// ---------------------------------------------------------------------------
// Positive/negative witness type tuples of a formula (membership predicates
// allowed; target-only constructs rejected).
std::pair<TyTuple, TyTuple> witness_sig(const FormulaPtr& f,
                                        const BaseInterpretation& base,
                                        const InterpOptions& opts = {});

// The symbolic interpretation of a formula over source kinds plus membership
// predicates.  Witness variable names are deterministic: they derive from the
// position of each subformula, so equal inputs give byte-identical output.
InterpretedFormula uinterp(const FormulaPtr& f, const BaseInterpretation& base,
                           const InterpOptions& opts = {});

// Interpretation of a plain source formula through relativization; the result
// is syntactically uinterp(relativize(f), base, opts).
InterpretedFormula iinterp(const FormulaPtr& f, const BaseInterpretation& base,
                           const InterpOptions& opts = {});

// Rewrites an interpreted body into its familiar display shape.  All rules
// are equivalences in the target theory (finite sets are non-empty):
// dropping vacuous set quantifiers, minimizing set-quantifier scope over
// conjunctions and implication conclusions, eliminating `true`, collapsing
// guards  forall x (x == u -> P)  /  exists x (x == u /\ P)  to P[x:=u],
// displaying  x <= n  guards as bounded numeric quantifiers, and folding
// exists i^B ((i == 0 -> P) /\ (i == 1 -> Q))  into the disjunction P \/ Q.
FormulaPtr display_normalize(const FormulaPtr& f);

// ---------------------------------------------------------------------------
// Joining of bounds.  `join_terms` returns one closed binary term per
// positive witness component of f (type t -> t -> t), built componentwise:
// atoms and membership predicates contribute their declared joins,
// conjunction concatenates, implication joins the function part pointwise
// and unions the set-collector part, quantifiers delegate to their matrix.
// The formula is taken as interpreted (relativize first to join membership
// guards).  Throws interp_error when an atom with positive witnesses lacks
// declared joins.
// ---------------------------------------------------------------------------
std::vector<TermPtr> join_terms(const FormulaPtr& f, const BaseInterpretation& base,
                                const InterpOptions& opts = {});

// Applies join_terms componentwise to two witness tuples (not normalized).
std::vector<TermPtr> join(const FormulaPtr& f, const BaseInterpretation& base,
                          const std::vector<TermPtr>& as,
                          const std::vector<TermPtr>& bs,
                          const InterpOptions& opts = {});

} // namespace wit
