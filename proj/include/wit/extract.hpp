#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "wit/interp.hpp"
#include "wit/logic.hpp"

// Witness extraction from checked derivations: the per-rule collector and
// witness constructions, per-base witnesses for the axiom families that are
// not witness-free, and the principles library emitting closed witness terms.
namespace wit {

struct extract_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using TermTuple = std::vector<TermPtr>;

// Plain mode witnesses the interpreted sequent as stated; relativized mode
// witnesses the membership-guarded reading, where every free variable of the
// sequent carries a membership premise I(x) and contributes its own witness
// tuple.
enum class ExtractMode { Plain, Relativized };

std::string show(ExtractMode m);
ExtractMode extract_mode_from_string(const std::string& s);

// Closed witnessing terms for a derived sequent B1, ..., Bn |- A.
//
// Writing a1..an for the witness tuples of the context formulas, c1..ck for
// the membership witness tuples of the sequent's free variables (relativized
// mode only; variables ordered by name), and d for the counter-witness tuple
// of the succedent:
//   - s[i][j] collects counter-witnesses for the j-th negative position of
//     Bi; it is applied to every component of a1..an (then c1..ck), then
//     every component of d, and returns a finite set.
//   - t[j] produces the j-th succedent witness from a1..an (then c1..ck).
//   - q[k][j] (relativized mode) collects counter-witnesses for the j-th
//     negative position of the k-th free variable's membership predicate;
//     applied like s.
// All terms are closed and typed at the signatures dictated by witness_sig.
struct Extraction {
    ExtractMode mode = ExtractMode::Plain;
    std::string base_tag;          // which base interpretation produced this
    InterpOptions opts;            // options the interpretation was taken with
    std::vector<TermTuple> s;
    TermTuple t;
    std::vector<TermTuple> q;
};

// Everything extraction needs besides the derivation: theory, base, options,
// plus witnesses for named axioms that are not witness-free and for the
// bound predicates of restricted quantifiers (keyed by bound_predicate_key).
struct ExtractionEnv {
    const Theory* theory = nullptr;
    const BaseInterpretation* base = nullptr;
    InterpOptions opts;
    std::map<std::string, Extraction> axiom_witnesses;
    std::map<std::string, Extraction> subsumption_witnesses;
};

// Canonical registry key for the bound predicate B(x, y...) of a restricted
// quantifier: the bound variable is renamed to a fixed placeholder so that
// alpha-variants share witnesses.
std::string bound_predicate_key(const std::string& x, const TyPtr& xty,
                                const FormulaPtr& bound);

// Witness extraction by induction on the derivation.  The derivation is
// checked first; extraction errors carry the node path.
Extraction extract(const ExtractionEnv& env, const DerivPtr& d, ExtractMode mode);

// Closed witnesses for the built-in axiom families under the environment's
// base interpretation, e.g. "membership-app" {sigma, tau} for the sentence
// forall x^sigma f^(sigma->tau) (I(x) /\ I(f) -> I(f x)).  Errors on
// unsupported (name, base) pairs.
Extraction axiom_witness(const std::string& name, const ExtractionEnv& env,
                         const std::vector<TyPtr>& tyargs = {});

// Serialization: named term bindings in the term S-expression syntax.
//   (extraction (mode u|i) (base TAG) (opts ...) (s (tuple T*)*) (t T*)
//               (q (tuple T*)*))
sexpr::NodePtr extraction_to_sexpr(const Extraction& ex);
Extraction extraction_from_sexpr(const sexpr::NodePtr& n);
std::string show(const Extraction& ex);

} // namespace wit
