#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wit/extract.hpp"
#include "wit/logic.hpp"
#include "wit/termcalc.hpp"

// Desk-scale evaluator over a finite fragment of the full set-theoretic
// structure: term evaluation, formula checking over configurable finite
// universes, the majorizability and monotonicity checkers, the extraction
// verification harness and the continuity-modulus search.
//
// Verification is universe-relative truth: Holds means "no counterexample
// within the configured budgets".  A FailsWith result is always a genuine,
// universe-independent refutation (enlarging a universe never turns it into
// Holds); Exhausted flags the comparisons that were budget-limited with no
// counterexample found (probe-based function equality, or an existential
// search over a truncated universe).
namespace wit {

struct modelcheck_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Values.
// ---------------------------------------------------------------------------
enum class VKind { Nat, Bool, Fun, Set };

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

struct Value {
    VKind kind;
    std::uint64_t nat = 0;          // Nat
    bool one = false;               // Bool: false = literal 0b, true = 1b
    TyPtr ty;                       // Fun: the function type; Set: element type
    TermPtr def;                    // Fun: defining closed normal term
    std::vector<ValuePtr> elems;    // Set: canonical members (sorted, deduped)
};

ValuePtr nat_value(std::uint64_t n);
ValuePtr bool_value(bool one);
// Typechecks the closed term (must be of function type) and normalizes it.
ValuePtr fun_value(const TermPtr& def);
// Canonicalizes (sorts by the structural order, deduplicates); errors when
// empty.
ValuePtr set_value(const TyPtr& elem_ty, std::vector<ValuePtr> elems);

TyPtr type_of(const ValuePtr& v);
TermPtr to_term(const ValuePtr& v);
std::string show(const ValuePtr& v);
// Total structural order (used for canonical sets; functions compare by
// their defining terms).
int compare(const ValuePtr& a, const ValuePtr& b);
bool equal(const ValuePtr& a, const ValuePtr& b);

// ---------------------------------------------------------------------------
// Universes and budgets.
// ---------------------------------------------------------------------------
struct Budgets {
    std::uint64_t max_nat = 7;          // U_N = {0..max_nat}
    std::size_t max_set_size = 3;       // star universes: subsets up to this size
    std::size_t max_probe_depth = 3;    // nesting guard for probe comparisons
    std::size_t max_fn_depth = 2;       // function term-grammar depth
    std::size_t tabulation_cap = 256;   // tabulate A->B iff |U_B|^|U_A| fits
    std::size_t max_type_universe = 128;// hard cap per generated universe
    std::size_t probe_cap = 16;         // probes per function comparison
    std::size_t step_budget = default_step_budget; // rewriter budget per eval
    std::size_t max_instances = 200000; // verification grid cap before sampling
    std::uint64_t seed = 0;             // sampling seed (echoed in reports)
};

// Per-type finite test universes.  Explicitly configured types are used as
// given; everything else is generated on demand:
//   - N: {0..max_nat};  B: {0b, 1b} (exhaustive);
//   - sigma*: nonempty subsets of U_sigma of size <= max_set_size;
//   - A -> B: every tabulation of U_A -> U_B as a literal lookup term when
//     the count fits tabulation_cap and A is N or B; otherwise a term grammar
//     (constant maps, the identity, successor compositions, max with a
//     constant, singleton maps, point evaluations at second order) closed
//     under composition up to max_fn_depth, deduplicated by probe tables.
// A universe is "exhaustive" when it provably contains every value of its
// type (B, full tabulations over exhaustive universes, explicitly flagged
// configurations); only exhaustive ranges can refute an existential.
class Universe {
  public:
    Budgets budgets;

    Universe() = default;
    explicit Universe(Budgets b) : budgets(b) {}

    void set(const TyPtr& ty, std::vector<ValuePtr> vals, bool exhaustive = false);
    const std::vector<ValuePtr>& values(const TyPtr& ty) const;
    bool exhaustive(const TyPtr& ty) const;

  private:
    struct Entry {
        std::vector<ValuePtr> vals;
        bool exhaustive = false;
    };
    const Entry& entry(const TyPtr& ty) const;
    mutable std::map<std::string, Entry> entries_; // keyed by show(ty)
};

// Budget/universe configuration:
//   (universe (max-nat 7) (max-set 3) (max-probe-depth 3) (fn-depth 2)
//             (tab-cap 256) (max-universe 128) (probe-cap 16)
//             (steps 100000) (max-instances 200000) (seed 0)
//             (type TY [exhaustive] (values T*))*)
// Every key is optional; values are closed terms, evaluated.
Universe universe_from_sexpr(const sexpr::NodePtr& n);
Universe parse_universe(const std::string& text);

// ---------------------------------------------------------------------------
// Check results.
// ---------------------------------------------------------------------------
enum class Outcome { Holds, Fails, Exhausted };

struct Binding {
    std::string var;
    ValuePtr val;
};

struct CheckResult {
    Outcome outcome = Outcome::Holds;
    bool exact = false;                  // Holds only: universe-independent?
    std::vector<Binding> counterexample; // Fails: replayable assignment
    std::string note;                    // Exhausted: the limited comparison

    bool holds() const { return outcome == Outcome::Holds; }
    bool fails() const { return outcome == Outcome::Fails; }
};

std::string show(const CheckResult& r);
std::string show(Outcome o);

// ---------------------------------------------------------------------------
// Evaluation and checking.
// ---------------------------------------------------------------------------
using ValueEnv = std::map<std::string, ValuePtr>;

// Call-by-value through normalization: free variables are replaced by their
// environment values, the closed term is normalized within the step budget
// and the normal form is read back (numeral, Boolean literal, canonical set
// literal, or a function value carrying its defining term).
ValuePtr eval(const TermPtr& t, const ValueEnv& env = {}, const Budgets& budgets = {});
// Function application of values.
ValuePtr apply(const ValuePtr& f, const ValuePtr& arg, const Budgets& budgets = {});

// Checks a target formula: forall/exists range over the type's universe,
// set-bounded and numerically bounded quantifiers range exactly, atoms are
// decided by evaluation (function equality probe-based over the domain
// universe, <=B by the majorizability checker below).  Uninterpreted
// relations and membership predicates are errors: interpret the formula
// first.
CheckResult check(const FormulaPtr& f, const Universe& u, const ValueEnv& env = {});

// Extended strong majorizability x <=B a between x of type sigma and a of
// the shadow type:
//   - at N: x <= a;
//   - at sigma*: every member of x is majorized by some member of a, and
//     every member of a majorizes itself;
//   - at an arrow with unbounded domain: arguments and their majorants range
//     over the universes, with the self-majorization conjunct on the right;
//   - at an arrow with bounded domain: the bound holds for every argument
//     and the right-hand side majorizes itself.
// sigma must be unbounded or star-typed; ground comparisons are exact,
// function clauses are universe-limited.
CheckResult bezem_leq_check(const TyPtr& sigma, const ValuePtr& x, const ValuePtr& a,
                            const Universe& u);

// monotone(v) := v <=B v; requires a self-shadowed type (built from N by
// arrows and stars).
CheckResult monotone_check(const TyPtr& sigma, const ValuePtr& v, const Universe& u);

// The shadow type against which <=B compares: ground N and star/arrow types
// built from N map to themselves, source types containing B lose their
// bounded parts, bounded types have none.
std::optional<TyPtr> shadow_type(const TyPtr& t);

// ---------------------------------------------------------------------------
// Extraction verification.
// ---------------------------------------------------------------------------
struct InstanceResult {
    std::vector<Binding> assignment;
    CheckResult result;
};

struct VerifyReport {
    std::string sequent;   // shown end-sequent
    std::string base_tag;
    std::string mode;      // "u" or "i"
    std::uint64_t seed = 0;
    bool sampled = false;  // grid exceeded max_instances; sampled instead
    std::size_t instances = 0, holds = 0, fails = 0, exhausted = 0;
    std::vector<InstanceResult> problems; // non-Holds instances (capped)
    std::string note;

    bool all_holds() const { return instances > 0 && fails == 0 && exhausted == 0; }
};

// For every assignment of the context witness tuples, the succedent
// counter-witness tuple, the sequent's free variables (and, in relativized
// mode, the membership witness tuples) from their universes, checks the
// soundness implication
//   (for all collected counter-witnesses, the interpreted premises)
//     ->  interpreted succedent at the extracted witnesses,
// and aggregates the per-instance results.
VerifyReport verify_extraction(const Theory& th, const DerivPtr& d,
                               const BaseInterpretation& base, const Extraction& ex,
                               const Universe& u);

std::string show(const VerifyReport& r);
// Line-oriented key=value summary for scripting.
std::string machine_summary(const VerifyReport& r);

// ---------------------------------------------------------------------------
// Continuity moduli.
// ---------------------------------------------------------------------------
enum class ModulusMode { Eq, Leq };

struct ModulusResult {
    std::optional<ValuePtr> modulus; // a canonical set of naturals
    std::string note;                // search parameters / absence reason
};

// Smallest (by cardinality, then lexicographically) nonempty mu subseteq
// {0..budget} such that every universe function agreeing with h on mu (Eq)
// or bounded by h on mu (Leq) satisfies phi f == phi h (Eq) or
// phi f <= phi h (Leq).  phi must be a closed term of type (N -> N) -> N and
// h a function value at N -> N.  The candidate pool is the N -> N universe
// augmented with piecewise functions (steps and identity-up-to-a-point) so
// that small candidate sets are genuinely refutable.  Absent with a note
// when no candidate works within the budget.
ModulusResult find_modulus(const TermPtr& phi, const ValuePtr& h, ModulusMode mode,
                           const Universe& u, std::uint64_t budget);

} // namespace wit
