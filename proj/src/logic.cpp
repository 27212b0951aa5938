#include "wit/logic.hpp"

#include <algorithm>
#include <sstream>

namespace wit {

namespace {

FormulaPtr mk(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

[[noreturn]] void fail(const std::string& msg) { throw logic_error(msg); }

TyPtr term_ty(const TermPtr& t) {
    try {
        return typecheck(t);
    } catch (const term_error& e) {
        fail(std::string("ill-typed term in formula: ") + e.what());
    }
}

// Typed free variables of a term (embedded types; error on clashes).
void term_frees(const TermPtr& t, std::vector<std::string>& bound,
                std::map<std::string, TyPtr>& out) {
    switch (t->kind) {
        case Term::Kind::Var: {
            if (std::find(bound.begin(), bound.end(), t->name) != bound.end()) return;
            auto it = out.find(t->name);
            if (it == out.end()) {
                out.emplace(t->name, t->ty);
            } else if (!equal(it->second, t->ty)) {
                fail("variable '" + t->name + "' used at two types: " + show(it->second) +
                     " and " + show(t->ty));
            }
            return;
        }
        case Term::Kind::Con: return;
        case Term::Kind::App:
            term_frees(t->fn, bound, out);
            term_frees(t->arg, bound, out);
            return;
        case Term::Kind::Lam:
            bound.push_back(t->name);
            term_frees(t->body, bound, out);
            bound.pop_back();
            return;
    }
}

std::map<std::string, TyPtr> term_frees(const TermPtr& t) {
    std::vector<std::string> bound;
    std::map<std::string, TyPtr> out;
    term_frees(t, bound, out);
    return out;
}

bool binds(FKind k) {
    return k == FKind::Forall || k == FKind::Exists || k == FKind::BForall ||
           k == FKind::BExists || k == FKind::SetForall || k == FKind::NumForall ||
           k == FKind::NumExists;
}

} // namespace

FormulaPtr atom(const std::string& rel, std::vector<TermPtr> args) {
    for (const auto& a : args) term_ty(a);
    return mk({FKind::Atom, rel, nullptr, std::move(args), {}});
}

FormulaPtr term_eq(TermPtr a, TermPtr b) {
    if (!equal(term_ty(a), term_ty(b)))
        fail("== between distinct types: " + show(typecheck(a)) + " vs " + show(typecheck(b)));
    return mk({FKind::TermEq, "", nullptr, {std::move(a), std::move(b)}, {}});
}

FormulaPtr nat_leq(TermPtr a, TermPtr b) {
    if (!equal(term_ty(a), nat()) || !equal(term_ty(b), nat()))
        fail("<= expects N operands");
    return mk({FKind::NatLeq, "", nullptr, {std::move(a), std::move(b)}, {}});
}

FormulaPtr int_maj(TermPtr a, TermPtr b) {
    TyPtr ta = term_ty(a);
    if (!equal(ta, term_ty(b))) fail("<|B between distinct types");
    if (!is_arithmetical(ta)) fail("<|B requires an arithmetical type, got " + show(ta));
    return mk({FKind::IntMaj, "", nullptr, {std::move(a), std::move(b)}, {}});
}

FormulaPtr itype(TermPtr t) {
    term_ty(t);
    return mk({FKind::ITypePred, "", nullptr, {std::move(t)}, {}});
}

FormulaPtr bot() { return mk({FKind::Bot, "", nullptr, {}, {}}); }
FormulaPtr top() { return mk({FKind::Top, "", nullptr, {}, {}}); }

FormulaPtr conj(FormulaPtr a, FormulaPtr b) {
    return mk({FKind::And, "", nullptr, {}, {std::move(a), std::move(b)}});
}

FormulaPtr imp(FormulaPtr a, FormulaPtr b) {
    return mk({FKind::Imp, "", nullptr, {}, {std::move(a), std::move(b)}});
}

FormulaPtr disj(FormulaPtr a, FormulaPtr b) {
    return mk({FKind::Or, "", nullptr, {}, {std::move(a), std::move(b)}});
}

FormulaPtr neg(FormulaPtr a) { return imp(std::move(a), bot()); }

FormulaPtr forall(const std::string& x, TyPtr ty, FormulaPtr body) {
    return mk({FKind::Forall, x, std::move(ty), {}, {std::move(body)}});
}

FormulaPtr exists(const std::string& x, TyPtr ty, FormulaPtr body) {
    return mk({FKind::Exists, x, std::move(ty), {}, {std::move(body)}});
}

FormulaPtr bforall(const std::string& x, TyPtr ty, FormulaPtr bound, FormulaPtr body) {
    return mk({FKind::BForall, x, std::move(ty), {}, {std::move(bound), std::move(body)}});
}

FormulaPtr bexists(const std::string& x, TyPtr ty, FormulaPtr bound, FormulaPtr body) {
    return mk({FKind::BExists, x, std::move(ty), {}, {std::move(bound), std::move(body)}});
}

FormulaPtr bezem_leq(TermPtr a, TermPtr b) {
    std::optional<TyPtr> d;
    try {
        d = dagger(term_ty(a));
    } catch (const type_error& e) {
        fail(std::string("<=B: ") + e.what());
    }
    if (!d) fail("<=B lhs has a bounded type: " + show(typecheck(a)));
    if (!equal(*d, term_ty(b)))
        fail("<=B rhs must have the dagger type " + show(*d) + ", got " + show(typecheck(b)));
    return mk({FKind::BezemLeq, "", nullptr, {std::move(a), std::move(b)}, {}});
}

FormulaPtr set_mem(TermPtr a, TermPtr set) {
    TyPtr ts = term_ty(set);
    if (ts->kind != Ty::Kind::Star || !equal(ts->elem, term_ty(a)))
        fail("'in' expects an element and a set of its type");
    return mk({FKind::SetMem, "", nullptr, {std::move(a), std::move(set)}, {}});
}

FormulaPtr set_forall(const std::string& x, TermPtr set, FormulaPtr body) {
    TyPtr ts = term_ty(set);
    if (ts->kind != Ty::Kind::Star) fail("set_forall expects a star-typed set");
    return mk({FKind::SetForall, x, ts->elem, {std::move(set)}, {std::move(body)}});
}

FormulaPtr num_forall(const std::string& x, TermPtr bound, FormulaPtr body) {
    if (!equal(term_ty(bound), nat())) fail("num_forall bound must be N");
    return mk({FKind::NumForall, x, nat(), {std::move(bound)}, {std::move(body)}});
}

FormulaPtr num_exists(const std::string& x, TermPtr bound, FormulaPtr body) {
    if (!equal(term_ty(bound), nat())) fail("num_exists bound must be N");
    return mk({FKind::NumExists, x, nat(), {std::move(bound)}, {std::move(body)}});
}

FormulaPtr expand_or(const FormulaPtr& a, const FormulaPtr& b) {
    std::string i = "i";
    for (int k = 0; free_in(i, a) || free_in(i, b); ++k) i = "i" + std::to_string(k);
    TermPtr vi = var(i, boolean());
    return exists(i, boolean(),
                  conj(imp(term_eq(vi, bool_lit(0)), a), imp(term_eq(vi, bool_lit(1)), b)));
}

int compare(const FormulaPtr& a, const FormulaPtr& b) {
    if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
    if (int c = a->name.compare(b->name)) return c < 0 ? -1 : 1;
    bool ha = a->ty != nullptr, hb = b->ty != nullptr;
    if (ha != hb) return ha < hb ? -1 : 1;
    if (ha) {
        if (int c = compare(a->ty, b->ty)) return c;
    }
    if (a->terms.size() != b->terms.size()) return a->terms.size() < b->terms.size() ? -1 : 1;
    for (std::size_t i = 0; i < a->terms.size(); ++i)
        if (int c = compare(a->terms[i], b->terms[i])) return c;
    if (a->kids.size() != b->kids.size()) return a->kids.size() < b->kids.size() ? -1 : 1;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (int c = compare(a->kids[i], b->kids[i])) return c;
    return 0;
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) { return compare(a, b) == 0; }

namespace {

void frees_impl(const FormulaPtr& f, std::vector<std::string>& bound,
                std::map<std::string, TyPtr>& out) {
    auto do_term = [&](const TermPtr& t) {
        std::map<std::string, TyPtr> tf = term_frees(t);
        for (const auto& [v, ty] : tf) {
            if (std::find(bound.begin(), bound.end(), v) != bound.end()) continue;
            auto it = out.find(v);
            if (it == out.end())
                out.emplace(v, ty);
            else if (!equal(it->second, ty))
                fail("variable '" + v + "' used at two types");
        }
    };
    // Bound terms of set/num quantifiers sit outside the binder's scope.
    if (binds(f->kind)) {
        for (const auto& t : f->terms) do_term(t);
        bound.push_back(f->name);
        for (const auto& k : f->kids) frees_impl(k, bound, out);
        bound.pop_back();
        return;
    }
    for (const auto& t : f->terms) do_term(t);
    for (const auto& k : f->kids) frees_impl(k, bound, out);
}

} // namespace

std::map<std::string, TyPtr> free_vars(const FormulaPtr& f) {
    std::vector<std::string> bound;
    std::map<std::string, TyPtr> out;
    frees_impl(f, bound, out);
    return out;
}

bool free_in(const std::string& x, const FormulaPtr& f) { return free_vars(f).count(x) > 0; }

FormulaPtr subst(const FormulaPtr& f, const std::string& x, const TermPtr& s) {
    Formula g = *f;
    if (!binds(f->kind)) {
        for (auto& t : g.terms) t = subst(t, x, s);
        for (auto& k : g.kids) k = subst(k, x, s);
        return mk(std::move(g));
    }
    // Bound terms first: they are outside the binder.
    for (auto& t : g.terms) t = subst(t, x, s);
    if (f->name == x) return mk(std::move(g)); // shadowed
    bool body_mentions_x = false;
    for (const auto& k : f->kids) body_mentions_x = body_mentions_x || free_in(x, k);
    if (body_mentions_x && free_in(f->name, s)) {
        // The binder would capture a free variable of s: rename it.
        std::string fresh = f->name;
        auto clashes = [&](const std::string& v) {
            if (v == x || free_in(v, s)) return true;
            for (const auto& k : f->kids)
                if (free_in(v, k)) return true;
            return false;
        };
        do fresh += "'"; while (clashes(fresh));
        TermPtr vf = var(fresh, f->ty);
        g.name = fresh;
        for (auto& k : g.kids) k = subst(k, f->name, vf);
    }
    for (auto& k : g.kids) k = subst(k, x, s);
    return mk(std::move(g));
}

bool is_source_formula(const FormulaPtr& f) {
    switch (f->kind) {
        case FKind::Top:
        case FKind::Or:
        case FKind::BezemLeq:
        case FKind::SetMem:
        case FKind::SetForall:
        case FKind::NumForall:
        case FKind::NumExists:
        case FKind::ITypePred:
            return false;
        default:
            break;
    }
    for (const auto& k : f->kids)
        if (!is_source_formula(k)) return false;
    return true;
}

bool is_quantifier_free(const FormulaPtr& f) {
    if (binds(f->kind)) return false;
    if (!is_source_formula(f)) return false;
    for (const auto& k : f->kids)
        if (!is_quantifier_free(k)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Printing.
// ---------------------------------------------------------------------------
namespace {

// imp 10 (right-assoc), or 15 (left-assoc), and 20 (left-assoc), binders 5, atoms 100.
std::string show_impl(const FormulaPtr& f, int ctx_prec);

std::string wrap(const std::string& s, int prec, int ctx_prec) {
    if (prec < ctx_prec) return "(" + s + ")";
    return s;
}

std::string show_bound_pred(const FormulaPtr& b) {
    std::string s = show_impl(b, 0);
    if (b->kind == FKind::And || b->kind == FKind::Imp || binds(b->kind)) return "(" + s + ")";
    return s;
}

std::string show_impl(const FormulaPtr& f, int ctx_prec) {
    switch (f->kind) {
        case FKind::Bot: return "false";
        case FKind::Top: return "true";
        case FKind::Atom: {
            if (f->terms.empty()) return f->name;
            std::string s = f->name + "(";
            for (std::size_t i = 0; i < f->terms.size(); ++i) {
                if (i) s += ", ";
                s += show_pretty(f->terms[i]);
            }
            return s + ")";
        }
        case FKind::TermEq:
            return show_pretty(f->terms[0]) + " == " + show_pretty(f->terms[1]);
        case FKind::NatLeq:
            return show_pretty(f->terms[0]) + " <= " + show_pretty(f->terms[1]);
        case FKind::IntMaj:
            return show_pretty(f->terms[0]) + " <|B " + show_pretty(f->terms[1]);
        case FKind::BezemLeq:
            return show_pretty(f->terms[0]) + " <=B " + show_pretty(f->terms[1]);
        case FKind::SetMem:
            return show_pretty(f->terms[0]) + " in " + show_pretty(f->terms[1]);
        case FKind::ITypePred: return "I(" + show_pretty(f->terms[0]) + ")";
        case FKind::And: {
            std::string s = show_impl(f->kids[0], 20) + " /\\ " + show_impl(f->kids[1], 21);
            return wrap(s, 20, ctx_prec);
        }
        case FKind::Imp: {
            std::string s = show_impl(f->kids[0], 11) + " -> " + show_impl(f->kids[1], 10);
            return wrap(s, 10, ctx_prec);
        }
        case FKind::Or: {
            std::string s = show_impl(f->kids[0], 15) + " \\/ " + show_impl(f->kids[1], 16);
            return wrap(s, 15, ctx_prec);
        }
        case FKind::Forall: {
            std::string s = "forall " + f->name + "^" + show(f->ty) + ". " +
                            show_impl(f->kids[0], 0);
            return wrap(s, 5, ctx_prec);
        }
        case FKind::Exists: {
            std::string s = "exists " + f->name + "^" + show(f->ty) + ". " +
                            show_impl(f->kids[0], 0);
            return wrap(s, 5, ctx_prec);
        }
        case FKind::BForall: {
            std::string s = "forall " + f->name + "^" + show(f->ty) + " | " +
                            show_bound_pred(f->kids[0]) + ". " + show_impl(f->kids[1], 0);
            return wrap(s, 5, ctx_prec);
        }
        case FKind::BExists: {
            std::string s = "exists " + f->name + "^" + show(f->ty) + " | " +
                            show_bound_pred(f->kids[0]) + ". " + show_impl(f->kids[1], 0);
            return wrap(s, 5, ctx_prec);
        }
        case FKind::SetForall: {
            std::string s = "forall " + f->name + " in " + show_pretty(f->terms[0]) + ". " +
                            show_impl(f->kids[0], 0);
            return wrap(s, 5, ctx_prec);
        }
        case FKind::NumForall: {
            std::string s = "forall " + f->name + " <= " + show_pretty(f->terms[0]) + ". " +
                            show_impl(f->kids[0], 0);
            return wrap(s, 5, ctx_prec);
        }
        case FKind::NumExists: {
            std::string s = "exists " + f->name + " <= " + show_pretty(f->terms[0]) + ". " +
                            show_impl(f->kids[0], 0);
            return wrap(s, 5, ctx_prec);
        }
    }
    fail("show: bad formula");
}

} // namespace

std::string show(const FormulaPtr& f) { return show_impl(f, 0); }

// ---------------------------------------------------------------------------
// Theories.
// ---------------------------------------------------------------------------
void Theory::declare_relation(RelDecl r) {
    if (relations.count(r.name)) fail("relation '" + r.name + "' already declared");
    for (const auto& ty : r.arg_tys) types.validate(ty);
    relations.emplace(r.name, std::move(r));
}

namespace {

bool universal_shape(const FormulaPtr& f) {
    switch (f->kind) {
        case FKind::TermEq:
        case FKind::NatLeq:
        case FKind::IntMaj:
        case FKind::Bot:
        case FKind::Top:
            return true;
        case FKind::And:
        case FKind::Imp:
            return universal_shape(f->kids[0]) && universal_shape(f->kids[1]);
        case FKind::Forall:
            return universal_shape(f->kids[0]);
        default:
            return false;
    }
}

} // namespace

void Theory::declare_axiom(AxiomDecl a) {
    if (axioms.count(a.name)) fail("axiom '" + a.name + "' already declared");
    std::map<std::string, TyPtr> frees;
    typecheck_formula(*this, a.formula, frees);
    if (!frees.empty()) fail("axiom '" + a.name + "' must be closed");
    if (a.universal && !universal_shape(a.formula))
        fail("axiom '" + a.name + "' flagged universal but not witness-free by shape");
    axioms.emplace(a.name, std::move(a));
}

const RelDecl& Theory::relation(const std::string& name) const {
    auto it = relations.find(name);
    if (it == relations.end()) fail("unknown relation '" + name + "'");
    return it->second;
}

const AxiomDecl& Theory::axiom(const std::string& name) const {
    auto it = axioms.find(name);
    if (it == axioms.end()) fail("unknown axiom '" + name + "'");
    return it->second;
}

Theory arith_theory() {
    Theory th;
    TyPtr N = nat();
    TermPtr n = var("n", N), m = var("m", N), k = var("k", N);
    auto S = [](const TermPtr& t) { return app(con(ConstKind::Succ), t); };
    auto ax = [&](const std::string& name, FormulaPtr f) {
        th.declare_axiom({name, std::move(f), true});
    };
    ax("bool-distinct", neg(term_eq(bool_lit(0), bool_lit(1))));
    ax("succ-nonzero", forall("n", N, neg(term_eq(S(n), numeral(0)))));
    ax("succ-inj", forall("n", N, forall("m", N, imp(term_eq(S(n), S(m)), term_eq(n, m)))));
    ax("leq-refl", forall("n", N, nat_leq(n, n)));
    ax("leq-zero", forall("n", N, nat_leq(numeral(0), n)));
    ax("leq-succ", forall("n", N, nat_leq(n, S(n))));
    ax("leq-trans",
       forall("n", N, forall("m", N, forall("k", N,
           imp(conj(nat_leq(n, m), nat_leq(m, k)), nat_leq(n, k))))));
    ax("leq-succ-mono",
       forall("n", N, forall("m", N, imp(nat_leq(n, m), nat_leq(S(n), S(m))))));
    ax("eq-leq", forall("n", N, forall("m", N, imp(term_eq(n, m), nat_leq(n, m)))));
    return th;
}

Theory bfi_theory() {
    Theory th = arith_theory();
    th.has_intmaj = true;
    return th;
}

// ---------------------------------------------------------------------------
// Typechecking.
// ---------------------------------------------------------------------------
namespace {

void typecheck_impl(const Theory& th, const FormulaPtr& f,
                    std::map<std::string, TyPtr>& bound,
                    std::map<std::string, TyPtr>& frees, bool allow_target) {
    auto do_term = [&](const TermPtr& t, const char* what) -> TyPtr {
        std::map<std::string, TyPtr> tf = term_frees(t);
        for (const auto& [v, ty] : tf) {
            auto bit = bound.find(v);
            if (bit != bound.end()) {
                if (!equal(bit->second, ty))
                    fail(std::string(what) + ": variable '" + v + "' occurs at " + show(ty) +
                         " but is bound at " + show(bit->second));
                continue;
            }
            auto fit = frees.find(v);
            if (fit == frees.end())
                frees.emplace(v, ty);
            else if (!equal(fit->second, ty))
                fail(std::string(what) + ": free variable '" + v + "' used at two types");
        }
        try {
            TyPtr ty = typecheck(t);
            th.types.validate(ty);
            return ty;
        } catch (const std::runtime_error& e) {
            fail(std::string(what) + ": " + e.what());
        }
    };
    auto target_only = [&](const char* what) {
        if (!allow_target) fail(std::string(what) + " is not a source-language construct");
    };
    switch (f->kind) {
        case FKind::Bot: return;
        case FKind::Top: target_only("top"); return;
        case FKind::Atom: {
            const RelDecl& r = th.relation(f->name);
            if (r.arg_tys.size() != f->terms.size())
                fail("relation '" + f->name + "' expects " +
                     std::to_string(r.arg_tys.size()) + " arguments");
            for (std::size_t i = 0; i < f->terms.size(); ++i) {
                TyPtr ty = do_term(f->terms[i], "relation argument");
                if (!equal(ty, r.arg_tys[i]))
                    fail("relation '" + f->name + "' argument " + std::to_string(i) +
                         " has type " + show(ty) + ", expected " + show(r.arg_tys[i]));
            }
            return;
        }
        case FKind::TermEq: {
            TyPtr a = do_term(f->terms[0], "==");
            TyPtr b = do_term(f->terms[1], "==");
            if (!equal(a, b)) fail("== between distinct types");
            return;
        }
        case FKind::NatLeq:
            if (!equal(do_term(f->terms[0], "<="), nat()) ||
                !equal(do_term(f->terms[1], "<="), nat()))
                fail("<= expects N operands");
            return;
        case FKind::IntMaj: {
            if (!th.has_intmaj) fail("<|B is not part of this theory");
            TyPtr a = do_term(f->terms[0], "<|B");
            TyPtr b = do_term(f->terms[1], "<|B");
            if (!equal(a, b) || !is_arithmetical(a)) fail("<|B expects equal arithmetical types");
            return;
        }
        case FKind::BezemLeq: {
            target_only("<=B");
            TyPtr a = do_term(f->terms[0], "<=B");
            TyPtr b = do_term(f->terms[1], "<=B");
            std::optional<TyPtr> d;
            try {
                d = dagger(a);
            } catch (const type_error& e) {
                fail(std::string("<=B: ") + e.what());
            }
            if (!d || !equal(*d, b)) fail("<=B operand types do not match via dagger");
            return;
        }
        case FKind::SetMem: {
            target_only("in");
            TyPtr a = do_term(f->terms[0], "in");
            TyPtr s = do_term(f->terms[1], "in");
            if (s->kind != Ty::Kind::Star || !equal(s->elem, a))
                fail("'in' expects an element and a set of its type");
            return;
        }
        case FKind::ITypePred:
            target_only("I(.)");
            do_term(f->terms[0], "I(.)");
            return;
        case FKind::Or:
            target_only("\\/");
            [[fallthrough]];
        case FKind::And:
        case FKind::Imp:
            typecheck_impl(th, f->kids[0], bound, frees, allow_target);
            typecheck_impl(th, f->kids[1], bound, frees, allow_target);
            return;
        case FKind::Forall:
        case FKind::Exists:
        case FKind::BForall:
        case FKind::BExists: {
            th.types.validate(f->ty);
            auto saved = bound.find(f->name) != bound.end()
                             ? std::optional<TyPtr>(bound[f->name])
                             : std::nullopt;
            bound[f->name] = f->ty;
            for (const auto& k : f->kids) typecheck_impl(th, k, bound, frees, allow_target);
            if (saved) bound[f->name] = *saved; else bound.erase(f->name);
            return;
        }
        case FKind::SetForall:
        case FKind::NumForall:
        case FKind::NumExists: {
            target_only("bounded target quantifier");
            TyPtr ts = do_term(f->terms[0], "quantifier bound");
            if (f->kind == FKind::SetForall) {
                if (ts->kind != Ty::Kind::Star || !equal(ts->elem, f->ty))
                    fail("set quantifier bound must be a set of the variable's type");
            } else if (!equal(ts, nat())) {
                fail("numeric quantifier bound must be N");
            }
            auto saved = bound.find(f->name) != bound.end()
                             ? std::optional<TyPtr>(bound[f->name])
                             : std::nullopt;
            bound[f->name] = f->ty;
            typecheck_impl(th, f->kids[0], bound, frees, allow_target);
            if (saved) bound[f->name] = *saved; else bound.erase(f->name);
            return;
        }
    }
    fail("typecheck_formula: bad formula");
}

} // namespace

void typecheck_formula(const Theory& th, const FormulaPtr& f,
                       std::map<std::string, TyPtr>& frees, bool allow_target) {
    std::map<std::string, TyPtr> bound;
    typecheck_impl(th, f, bound, frees, allow_target);
}

// ---------------------------------------------------------------------------
// Relativization.
// ---------------------------------------------------------------------------
FormulaPtr relativize(const FormulaPtr& f) {
    switch (f->kind) {
        case FKind::Atom:
        case FKind::TermEq:
        case FKind::NatLeq:
        case FKind::IntMaj:
        case FKind::ITypePred:
        case FKind::Bot:
            return f;
        case FKind::And:
            return conj(relativize(f->kids[0]), relativize(f->kids[1]));
        case FKind::Imp:
            return imp(relativize(f->kids[0]), relativize(f->kids[1]));
        case FKind::Forall:
            return forall(f->name, f->ty,
                          imp(itype(var(f->name, f->ty)), relativize(f->kids[0])));
        case FKind::Exists:
            return exists(f->name, f->ty,
                          conj(itype(var(f->name, f->ty)), relativize(f->kids[0])));
        case FKind::BForall:
            return forall(f->name, f->ty,
                          imp(relativize(f->kids[0]), relativize(f->kids[1])));
        case FKind::BExists:
            return exists(f->name, f->ty,
                          conj(relativize(f->kids[0]), relativize(f->kids[1])));
        default:
            fail("relativize: target construct " + show(f));
    }
}

// ---------------------------------------------------------------------------
// Sequents.
// ---------------------------------------------------------------------------
bool equal(const Sequent& a, const Sequent& b) {
    if (a.ctx.size() != b.ctx.size()) return false;
    for (std::size_t i = 0; i < a.ctx.size(); ++i)
        if (!equal(a.ctx[i], b.ctx[i])) return false;
    return equal(a.succ, b.succ);
}

std::string show(const Sequent& s) {
    std::string out;
    for (std::size_t i = 0; i < s.ctx.size(); ++i) {
        if (i) out += ", ";
        out += show(s.ctx[i]);
    }
    if (!s.ctx.empty()) out += " ";
    return out + "|- " + show(s.succ);
}

// ---------------------------------------------------------------------------
// The checker.
// ---------------------------------------------------------------------------
namespace {

struct Checker {
    const Theory& th;

    [[noreturn]] void nope(const std::string& path, const std::string& msg) const {
        fail(path + ": " + msg);
    }

    void want_kids(const DerivPtr& d, std::size_t n, const std::string& path) const {
        if (d->kids.size() != n)
            nope(path, "rule expects " + std::to_string(n) + " premise(s), got " +
                           std::to_string(d->kids.size()));
    }

    FormulaPtr source_formula(const FormulaPtr& f, const std::string& path) const {
        if (!f) nope(path, "missing formula");
        std::map<std::string, TyPtr> frees;
        try {
            typecheck_formula(th, f, frees, false);
        } catch (const logic_error& e) {
            nope(path, e.what());
        }
        return f;
    }

    TermPtr typed_term(const TermPtr& t, const TyPtr& want, const std::string& path,
                       const char* what) const {
        if (!t) nope(path, std::string("missing term for ") + what);
        TyPtr ty;
        try {
            ty = typecheck(t);
            th.types.validate(ty);
        } catch (const std::runtime_error& e) {
            nope(path, std::string(what) + ": " + e.what());
        }
        if (want && !equal(ty, want))
            nope(path, std::string(what) + " has type " + show(ty) + ", expected " + show(want));
        return t;
    }

    void check_sequent(const Sequent& s, const std::string& path) const {
        std::map<std::string, TyPtr> frees;
        try {
            for (const auto& f : s.ctx) typecheck_formula(th, f, frees, false);
            typecheck_formula(th, s.succ, frees, false);
        } catch (const logic_error& e) {
            nope(path, e.what());
        }
    }

    bool free_in_ctx(const std::string& x, const std::vector<FormulaPtr>& ctx) const {
        for (const auto& f : ctx)
            if (free_in(x, f)) return true;
        return false;
    }

    CheckedNode run(const DerivPtr& d, const std::string& path) const {
        if (!d) fail(path + ": missing node");
        CheckedNode out;
        out.node = d.get();
        for (std::size_t i = 0; i < d->kids.size(); ++i)
            out.kids.push_back(run(d->kids[i], path + "/" + std::to_string(i)));
        Sequent cq;
        switch (d->rule) {
            case Rule::Id: {
                want_kids(d, 0, path);
                FormulaPtr f = source_formula(d->f, path);
                cq = {{f}, f};
                break;
            }
            case Rule::BotL: {
                want_kids(d, 0, path);
                cq = {{bot()}, source_formula(d->f, path)};
                break;
            }
            case Rule::EqRefl: {
                want_kids(d, 0, path);
                TermPtr t = typed_term(d->t, nullptr, path, "reflexivity term");
                cq = {{}, term_eq(t, t)};
                break;
            }
            case Rule::Conv: {
                want_kids(d, 0, path);
                TermPtr a = typed_term(d->t, nullptr, path, "conversion lhs");
                TermPtr b = typed_term(d->t2, typecheck(a), path, "conversion rhs");
                TermPtr na, nb;
                try {
                    na = normalize(a);
                    nb = normalize(b);
                } catch (const budget_error& e) {
                    nope(path, std::string("conversion ran out of budget: ") + e.what());
                }
                if (!equal(na, nb))
                    nope(path, "terms do not share a normal form: " + show_pretty(na) +
                                   " vs " + show_pretty(nb));
                cq = {{}, term_eq(a, b)};
                break;
            }
            case Rule::EqSubst: {
                want_kids(d, 0, path);
                if (d->x.empty() || !d->xty) nope(path, "eqsubst needs a variable");
                FormulaPtr f = source_formula(d->f, path);
                if (!is_quantifier_free(f))
                    nope(path, "eqsubst kernel must be quantifier-free");
                auto fv = free_vars(f);
                auto it = fv.find(d->x);
                if (it != fv.end() && !equal(it->second, d->xty))
                    nope(path, "eqsubst variable type mismatch");
                TermPtr s = typed_term(d->t, d->xty, path, "eqsubst lhs term");
                TermPtr t = typed_term(d->t2, d->xty, path, "eqsubst rhs term");
                cq = {{subst(f, d->x, s), term_eq(s, t)}, subst(f, d->x, t)};
                break;
            }
            case Rule::Axiom: {
                want_kids(d, 0, path);
                cq = {{}, th.axiom(d->axiom_name).formula};
                break;
            }
            case Rule::BoolElim: {
                want_kids(d, 0, path);
                if (d->x.empty()) nope(path, "boolelim needs the Boolean variable");
                FormulaPtr D = source_formula(d->f, path);
                auto fv = free_vars(D);
                auto it = fv.find(d->x);
                if (it != fv.end() && !equal(it->second, boolean()))
                    nope(path, "boolelim variable must be Boolean");
                FormulaPtr d0 = subst(D, d->x, bool_lit(0));
                FormulaPtr d1 = subst(D, d->x, bool_lit(1));
                cq = {{}, imp(conj(d0, d1), forall(d->x, boolean(), D))};
                break;
            }
            case Rule::BQDef: {
                want_kids(d, 0, path);
                if (d->x.empty() || !d->xty) nope(path, "bqdef needs the bound variable");
                FormulaPtr bound = source_formula(d->f, path);
                FormulaPtr body = source_formula(d->f2, path);
                FormulaPtr restricted = d->flag ? bforall(d->x, d->xty, bound, body)
                                                : bexists(d->x, d->xty, bound, body);
                FormulaPtr plain = d->flag
                                       ? forall(d->x, d->xty, imp(bound, body))
                                       : exists(d->x, d->xty, conj(bound, body));
                cq = {{}, d->lr ? imp(restricted, plain) : imp(plain, restricted)};
                break;
            }
            case Rule::IntMajAx1: {
                want_kids(d, 0, path);
                if (!th.has_intmaj) nope(path, "theory has no intensional majorizability");
                TermPtr x = var("x", nat()), y = var("y", nat());
                cq = {{},
                      forall("x", nat(), forall("y", nat(),
                          conj(imp(int_maj(x, y), nat_leq(x, y)),
                               imp(nat_leq(x, y), int_maj(x, y)))))};
                break;
            }
            case Rule::IntMajAx2: {
                want_kids(d, 0, path);
                if (!th.has_intmaj) nope(path, "theory has no intensional majorizability");
                if (!d->xty || !d->yty) nope(path, "intmaj-ax2 needs two types");
                TyPtr ft = func(d->xty, d->yty);
                if (!is_arithmetical(ft)) nope(path, "intmaj-ax2 types must be arithmetical");
                TermPtr fv = var("f", ft), gv = var("g", ft);
                TermPtr xv = var("x", d->xty), yv = var("y", d->xty);
                cq = {{},
                      forall("f", ft, forall("g", ft,
                          imp(int_maj(fv, gv),
                              forall("x", d->xty, forall("y", d->xty,
                                  imp(int_maj(xv, yv),
                                      conj(int_maj(app(fv, xv), app(gv, yv)),
                                           int_maj(app(gv, xv), app(gv, yv)))))))))};
                break;
            }
            case Rule::Weaken: {
                want_kids(d, 1, path);
                cq = out.kids[0].seq;
                if (d->i > cq.ctx.size()) nope(path, "weaken index out of range");
                cq.ctx.insert(cq.ctx.begin() + static_cast<std::ptrdiff_t>(d->i),
                              source_formula(d->f, path));
                break;
            }
            case Rule::Contract: {
                want_kids(d, 1, path);
                cq = out.kids[0].seq;
                if (d->i + 1 >= cq.ctx.size()) nope(path, "contract index out of range");
                if (!equal(cq.ctx[d->i], cq.ctx[d->i + 1]))
                    nope(path, "contract expects equal formulas at the index");
                cq.ctx.erase(cq.ctx.begin() + static_cast<std::ptrdiff_t>(d->i + 1));
                break;
            }
            case Rule::Swap: {
                want_kids(d, 1, path);
                cq = out.kids[0].seq;
                if (d->i + 1 >= cq.ctx.size()) nope(path, "swap index out of range");
                std::swap(cq.ctx[d->i], cq.ctx[d->i + 1]);
                break;
            }
            case Rule::AndL: {
                want_kids(d, 1, path);
                cq = out.kids[0].seq;
                if (d->i + 1 >= cq.ctx.size()) nope(path, "andl index out of range");
                FormulaPtr a = cq.ctx[d->i], b = cq.ctx[d->i + 1];
                cq.ctx[d->i] = conj(a, b);
                cq.ctx.erase(cq.ctx.begin() + static_cast<std::ptrdiff_t>(d->i + 1));
                break;
            }
            case Rule::AndR: {
                want_kids(d, 2, path);
                const Sequent& l = out.kids[0].seq;
                const Sequent& r = out.kids[1].seq;
                cq.ctx = l.ctx;
                cq.ctx.insert(cq.ctx.end(), r.ctx.begin(), r.ctx.end());
                cq.succ = conj(l.succ, r.succ);
                break;
            }
            case Rule::ImpR: {
                want_kids(d, 1, path);
                const Sequent& p = out.kids[0].seq;
                if (p.ctx.empty()) nope(path, "impr premise has an empty context");
                cq.ctx.assign(p.ctx.begin() + 1, p.ctx.end());
                cq.succ = imp(p.ctx[0], p.succ);
                break;
            }
            case Rule::ImpL: {
                want_kids(d, 2, path);
                const Sequent& l = out.kids[0].seq;
                const Sequent& r = out.kids[1].seq;
                if (r.ctx.empty()) nope(path, "impl second premise has an empty context");
                cq.ctx.push_back(imp(l.succ, r.ctx[0]));
                cq.ctx.insert(cq.ctx.end(), l.ctx.begin(), l.ctx.end());
                cq.ctx.insert(cq.ctx.end(), r.ctx.begin() + 1, r.ctx.end());
                cq.succ = r.succ;
                break;
            }
            case Rule::Cut: {
                want_kids(d, 2, path);
                const Sequent& l = out.kids[0].seq;
                const Sequent& r = out.kids[1].seq;
                if (r.ctx.empty()) nope(path, "cut second premise has an empty context");
                if (!equal(l.succ, r.ctx[0]))
                    nope(path, "cut formula mismatch: " + show(l.succ) + " vs " +
                                   show(r.ctx[0]));
                cq.ctx = l.ctx;
                cq.ctx.insert(cq.ctx.end(), r.ctx.begin() + 1, r.ctx.end());
                cq.succ = r.succ;
                break;
            }
            case Rule::ForallR: {
                want_kids(d, 1, path);
                if (d->x.empty() || !d->xty) nope(path, "forallr needs the variable");
                const Sequent& p = out.kids[0].seq;
                if (free_in_ctx(d->x, p.ctx))
                    nope(path, "eigenvariable '" + d->x + "' occurs free in the context");
                cq.ctx = p.ctx;
                cq.succ = forall(d->x, d->xty, p.succ);
                break;
            }
            case Rule::ForallL: {
                want_kids(d, 1, path);
                FormulaPtr f = source_formula(d->f, path);
                if (f->kind != FKind::Forall) nope(path, "foralll needs a universal formula");
                TermPtr t = typed_term(d->t, f->ty, path, "instantiation term");
                const Sequent& p = out.kids[0].seq;
                if (p.ctx.empty()) nope(path, "foralll premise has an empty context");
                FormulaPtr want = subst(f->kids[0], f->name, t);
                if (!equal(p.ctx[0], want))
                    nope(path, "instantiated hypothesis mismatch: expected " + show(want) +
                                   ", premise has " + show(p.ctx[0]));
                cq = p;
                cq.ctx[0] = f;
                break;
            }
            case Rule::ExistsR: {
                want_kids(d, 1, path);
                FormulaPtr f = source_formula(d->f, path);
                if (f->kind != FKind::Exists) nope(path, "existsr needs an existential formula");
                TermPtr t = typed_term(d->t, f->ty, path, "instantiation term");
                const Sequent& p = out.kids[0].seq;
                FormulaPtr want = subst(f->kids[0], f->name, t);
                if (!equal(p.succ, want))
                    nope(path, "instantiated succedent mismatch: expected " + show(want) +
                                   ", premise has " + show(p.succ));
                cq = p;
                cq.succ = f;
                break;
            }
            case Rule::ExistsL: {
                want_kids(d, 1, path);
                if (d->x.empty() || !d->xty) nope(path, "existsl needs the variable");
                const Sequent& p = out.kids[0].seq;
                if (p.ctx.empty()) nope(path, "existsl premise has an empty context");
                std::vector<FormulaPtr> rest(p.ctx.begin() + 1, p.ctx.end());
                if (free_in_ctx(d->x, rest) || free_in(d->x, p.succ))
                    nope(path, "eigenvariable '" + d->x + "' occurs free in the conclusion");
                cq = p;
                cq.ctx[0] = exists(d->x, d->xty, p.ctx[0]);
                break;
            }
            case Rule::Induction: {
                want_kids(d, 2, path);
                if (d->x.empty()) nope(path, "induction needs the variable");
                FormulaPtr A = source_formula(d->f, path);
                auto fv = free_vars(A);
                for (const auto& [v, ty] : fv) {
                    if (v != d->x)
                        nope(path, "induction formula has a parameter '" + v +
                                       "'; package parameters before inducting");
                    if (!equal(ty, nat())) nope(path, "induction variable must be N");
                }
                const Sequent& base = out.kids[0].seq;
                const Sequent& step = out.kids[1].seq;
                if (!base.ctx.empty() || !step.ctx.empty())
                    nope(path, "induction premises must have empty contexts");
                if (!equal(base.succ, subst(A, d->x, numeral(0))))
                    nope(path, "base case mismatch");
                FormulaPtr succ_x = subst(A, d->x, app(con(ConstKind::Succ), var(d->x, nat())));
                if (!equal(step.succ, forall(d->x, nat(), imp(A, succ_x))))
                    nope(path, "step case mismatch: expected " +
                                   show(forall(d->x, nat(), imp(A, succ_x))));
                cq = {{}, forall(d->x, nat(), A)};
                break;
            }
            case Rule::IntMajRule: {
                want_kids(d, 1, path);
                if (!th.has_intmaj) nope(path, "theory has no intensional majorizability");
                if (d->x.empty() || d->x2.empty()) nope(path, "intmaj-rule needs two variables");
                TermPtr s = typed_term(d->t, nullptr, path, "intmaj-rule lhs");
                TyPtr ft = typecheck(s);
                if (ft->kind != Ty::Kind::Func || !is_arithmetical(ft))
                    nope(path, "intmaj-rule terms must have an arithmetical function type");
                TermPtr t = typed_term(d->t2, ft, path, "intmaj-rule rhs");
                TermPtr xv = var(d->x, ft->dom), yv = var(d->x2, ft->dom);
                const Sequent& p = out.kids[0].seq;
                if (p.ctx.empty()) nope(path, "intmaj-rule premise has an empty context");
                if (!equal(p.ctx.back(), int_maj(xv, yv)))
                    nope(path, "premise must end with " + show(int_maj(xv, yv)));
                FormulaPtr want = conj(int_maj(app(s, xv), app(t, yv)),
                                       int_maj(app(t, xv), app(t, yv)));
                if (!equal(p.succ, want))
                    nope(path, "premise succedent mismatch: expected " + show(want));
                cq.ctx.assign(p.ctx.begin(), p.ctx.end() - 1);
                cq.succ = int_maj(s, t);
                if (free_in_ctx(d->x, cq.ctx) || free_in_ctx(d->x2, cq.ctx) ||
                    free_in(d->x, cq.succ) || free_in(d->x2, cq.succ))
                    nope(path, "intmaj-rule variables must be fresh for the conclusion");
                break;
            }
        }
        check_sequent(cq, path);
        out.seq = std::move(cq);
        return out;
    }
};

} // namespace

CheckedNode check_derivation(const Theory& th, const DerivPtr& d) {
    return Checker{th}.run(d, "proof");
}

CheckedNode check_file(const DerivationFile& file) {
    CheckedNode root = check_derivation(file.theory, file.proof);
    if (!equal(root.seq, file.stated))
        fail("derived conclusion differs from the stated one:\n  derived: " + show(root.seq) +
             "\n  stated:  " + show(file.stated));
    return root;
}

// ---------------------------------------------------------------------------
// S-expression IO.
// ---------------------------------------------------------------------------
namespace {

using sexpr::Node;
using sexpr::NodePtr;

NodePtr satom(const std::string& s) { return sexpr::atom(s); }

NodePtr slist(std::vector<NodePtr> items) { return sexpr::list(std::move(items)); }

NodePtr to_sexpr_impl(const FormulaPtr& f) {
    switch (f->kind) {
        case FKind::Bot: return slist({satom("bot")});
        case FKind::Top: return slist({satom("top")});
        case FKind::Atom: {
            std::vector<NodePtr> items{satom("rel"), satom(f->name)};
            for (const auto& t : f->terms) items.push_back(term_to_sexpr(t));
            return slist(std::move(items));
        }
        case FKind::TermEq:
            return slist({satom("eq"), term_to_sexpr(f->terms[0]), term_to_sexpr(f->terms[1])});
        case FKind::NatLeq:
            return slist({satom("leq"), term_to_sexpr(f->terms[0]), term_to_sexpr(f->terms[1])});
        case FKind::IntMaj:
            return slist({satom("intmaj"), term_to_sexpr(f->terms[0]),
                          term_to_sexpr(f->terms[1])});
        case FKind::BezemLeq:
            return slist({satom("bleq"), term_to_sexpr(f->terms[0]), term_to_sexpr(f->terms[1])});
        case FKind::SetMem:
            return slist({satom("mem"), term_to_sexpr(f->terms[0]), term_to_sexpr(f->terms[1])});
        case FKind::ITypePred: return slist({satom("itype"), term_to_sexpr(f->terms[0])});
        case FKind::And:
            return slist({satom("and"), to_sexpr_impl(f->kids[0]), to_sexpr_impl(f->kids[1])});
        case FKind::Imp:
            return slist({satom("imp"), to_sexpr_impl(f->kids[0]), to_sexpr_impl(f->kids[1])});
        case FKind::Or:
            return slist({satom("disj"), to_sexpr_impl(f->kids[0]), to_sexpr_impl(f->kids[1])});
        case FKind::Forall:
        case FKind::Exists:
            return slist({satom(f->kind == FKind::Forall ? "forall" : "exists"),
                          satom(f->name), ty_to_sexpr(f->ty), to_sexpr_impl(f->kids[0])});
        case FKind::BForall:
        case FKind::BExists:
            return slist({satom(f->kind == FKind::BForall ? "bforall" : "bexists"),
                          satom(f->name), ty_to_sexpr(f->ty), to_sexpr_impl(f->kids[0]),
                          to_sexpr_impl(f->kids[1])});
        case FKind::SetForall:
            return slist({satom("sforall"), satom(f->name), term_to_sexpr(f->terms[0]),
                          to_sexpr_impl(f->kids[0])});
        case FKind::NumForall:
        case FKind::NumExists:
            return slist({satom(f->kind == FKind::NumForall ? "numforall" : "numexists"),
                          satom(f->name), term_to_sexpr(f->terms[0]), to_sexpr_impl(f->kids[0])});
    }
    fail("formula_to_sexpr: bad formula");
}

FormulaPtr from_sexpr_impl(const NodePtr& n, VarCtx& env);

FormulaPtr binder_from_sexpr(const NodePtr& n, VarCtx& env, const std::string& head) {
    const auto& items = sexpr::items_of(n, "formula");
    auto arity = [&](std::size_t k) {
        if (items.size() != k)
            fail("(" + head + " ...) expects " + std::to_string(k - 1) + " arguments");
    };
    const std::string& x = sexpr::atom_of(items.at(1), "bound variable");
    auto with_bound = [&](const TyPtr& ty, auto&& fn) {
        auto saved = env.find(x) != env.end() ? std::optional<TyPtr>(env[x]) : std::nullopt;
        env[x] = ty;
        auto result = fn();
        if (saved) env[x] = *saved; else env.erase(x);
        return result;
    };
    if (head == "forall" || head == "exists") {
        arity(4);
        TyPtr ty = ty_from_sexpr(items[2]);
        FormulaPtr body = with_bound(ty, [&] { return from_sexpr_impl(items[3], env); });
        return head == "forall" ? forall(x, ty, body) : exists(x, ty, body);
    }
    if (head == "bforall" || head == "bexists") {
        arity(5);
        TyPtr ty = ty_from_sexpr(items[2]);
        FormulaPtr bound = with_bound(ty, [&] { return from_sexpr_impl(items[3], env); });
        FormulaPtr body = with_bound(ty, [&] { return from_sexpr_impl(items[4], env); });
        return head == "bforall" ? bforall(x, ty, bound, body) : bexists(x, ty, bound, body);
    }
    if (head == "sforall") {
        arity(4);
        TermPtr set = term_from_sexpr(items[2], env);
        TyPtr ts = typecheck(set);
        if (ts->kind != Ty::Kind::Star) fail("(sforall ...) bound must be a set");
        FormulaPtr body = with_bound(ts->elem, [&] { return from_sexpr_impl(items[3], env); });
        return set_forall(x, set, body);
    }
    // numforall / numexists
    arity(4);
    TermPtr bound = term_from_sexpr(items[2], env);
    FormulaPtr body = with_bound(nat(), [&] { return from_sexpr_impl(items[3], env); });
    return head == "numforall" ? num_forall(x, bound, body) : num_exists(x, bound, body);
}

FormulaPtr from_sexpr_impl(const NodePtr& n, VarCtx& env) {
    std::string head = sexpr::head(n);
    if (head.empty()) fail("formula: expected a list with an atom head, got " + sexpr::show(n));
    const auto& items = sexpr::items_of(n, "formula");
    auto arity = [&](std::size_t k) {
        if (items.size() != k)
            fail("(" + head + " ...) expects " + std::to_string(k - 1) + " arguments");
    };
    auto term_at = [&](std::size_t i) { return term_from_sexpr(items.at(i), env); };
    auto kid_at = [&](std::size_t i) { return from_sexpr_impl(items.at(i), env); };
    if (head == "bot") { arity(1); return bot(); }
    if (head == "top") { arity(1); return top(); }
    if (head == "eq") { arity(3); return term_eq(term_at(1), term_at(2)); }
    if (head == "leq") { arity(3); return nat_leq(term_at(1), term_at(2)); }
    if (head == "intmaj") { arity(3); return int_maj(term_at(1), term_at(2)); }
    if (head == "bleq") { arity(3); return bezem_leq(term_at(1), term_at(2)); }
    if (head == "mem") { arity(3); return set_mem(term_at(1), term_at(2)); }
    if (head == "itype") { arity(2); return itype(term_at(1)); }
    if (head == "rel") {
        if (items.size() < 2) fail("(rel ...) expects a relation name");
        std::vector<TermPtr> args;
        for (std::size_t i = 2; i < items.size(); ++i) args.push_back(term_at(i));
        return atom(sexpr::atom_of(items[1], "relation name"), std::move(args));
    }
    if (head == "and") { arity(3); return conj(kid_at(1), kid_at(2)); }
    if (head == "imp") { arity(3); return imp(kid_at(1), kid_at(2)); }
    if (head == "disj") { arity(3); return disj(kid_at(1), kid_at(2)); }
    if (head == "not") { arity(2); return neg(kid_at(1)); }
    if (head == "iff") {
        arity(3);
        FormulaPtr a = kid_at(1), b = kid_at(2);
        return conj(imp(a, b), imp(b, a));
    }
    if (head == "or") { arity(3); return expand_or(kid_at(1), kid_at(2)); }
    if (head == "forall" || head == "exists" || head == "bforall" || head == "bexists" ||
        head == "sforall" || head == "numforall" || head == "numexists")
        return binder_from_sexpr(n, env, head);
    fail("formula: unknown head '" + head + "'");
}

} // namespace

sexpr::NodePtr formula_to_sexpr(const FormulaPtr& f) { return to_sexpr_impl(f); }

FormulaPtr formula_from_sexpr(const sexpr::NodePtr& n, const VarCtx& env) {
    VarCtx e = env;
    return from_sexpr_impl(n, e);
}

FormulaPtr parse_formula(const std::string& text, const VarCtx& env) {
    return formula_from_sexpr(sexpr::parse(text), env);
}

sexpr::NodePtr sequent_to_sexpr(const Sequent& s) {
    std::vector<NodePtr> ctx{satom("ctx")};
    for (const auto& f : s.ctx) ctx.push_back(formula_to_sexpr(f));
    return slist({satom("seq"), slist(std::move(ctx)), formula_to_sexpr(s.succ)});
}

Sequent sequent_from_sexpr(const sexpr::NodePtr& n) {
    if (sexpr::head(n) != "seq") fail("expected (seq (ctx ...) F)");
    const auto& items = sexpr::items_of(n, "sequent");
    if (items.size() != 3) fail("(seq ...) expects a context and a succedent");
    if (sexpr::head(items[1]) != "ctx") fail("expected (ctx ...) in sequent");
    Sequent s;
    const auto& ctx = sexpr::items_of(items[1], "context");
    for (std::size_t i = 1; i < ctx.size(); ++i) s.ctx.push_back(formula_from_sexpr(ctx[i]));
    s.succ = formula_from_sexpr(items[2]);
    return s;
}

Theory theory_from_sexpr(const sexpr::NodePtr& n) {
    if (sexpr::head(n) != "theory") fail("expected (theory ...)");
    const auto& items = sexpr::items_of(n, "theory");
    if (items.size() < 2) fail("(theory ...) expects a base name");
    const std::string& base = sexpr::atom_of(items[1], "theory base");
    Theory th;
    if (base == "arith") th = arith_theory();
    else if (base == "bfi") th = bfi_theory();
    else fail("unknown theory base '" + base + "' (expected arith or bfi)");
    for (std::size_t i = 2; i < items.size(); ++i) {
        std::string head = sexpr::head(items[i]);
        const auto& decl = sexpr::items_of(items[i], "theory declaration");
        if (head == "rel") {
            if (decl.size() != 3) fail("(rel NAME (TY*)) expected");
            RelDecl r;
            r.name = sexpr::atom_of(decl[1], "relation name");
            for (const auto& tn : sexpr::items_of(decl[2], "relation argument types"))
                r.arg_tys.push_back(ty_from_sexpr(tn));
            th.declare_relation(std::move(r));
        } else if (head == "axiom") {
            if (decl.size() != 4) fail("(axiom NAME universal|witnessed F) expected");
            AxiomDecl a;
            a.name = sexpr::atom_of(decl[1], "axiom name");
            const std::string& kind = sexpr::atom_of(decl[2], "axiom kind");
            if (kind == "universal") a.universal = true;
            else if (kind == "witnessed") a.universal = false;
            else fail("axiom kind must be universal or witnessed");
            a.formula = formula_from_sexpr(decl[3]);
            th.declare_axiom(std::move(a));
        } else {
            fail("unknown theory declaration '" + head + "'");
        }
    }
    return th;
}

namespace {

DerivPtr dmk(Derivation d) { return std::make_shared<const Derivation>(std::move(d)); }

std::size_t index_of(const NodePtr& n) {
    const std::string& a = sexpr::atom_of(n, "context index");
    if (a.empty() || a.size() > 9 || a.find_first_not_of("0123456789") != std::string::npos)
        fail("bad context index '" + a + "'");
    return static_cast<std::size_t>(std::stoul(a));
}

} // namespace

sexpr::NodePtr derivation_to_sexpr(const DerivPtr& d) {
    auto kid = [&](std::size_t i) { return derivation_to_sexpr(d->kids.at(i)); };
    switch (d->rule) {
        case Rule::Id: return slist({satom("id"), formula_to_sexpr(d->f)});
        case Rule::BotL: return slist({satom("botl"), formula_to_sexpr(d->f)});
        case Rule::EqRefl: return slist({satom("eqrefl"), term_to_sexpr(d->t)});
        case Rule::Conv:
            return slist({satom("conv"), term_to_sexpr(d->t), term_to_sexpr(d->t2)});
        case Rule::EqSubst:
            return slist({satom("eqsubst"), satom(d->x), ty_to_sexpr(d->xty),
                          formula_to_sexpr(d->f), term_to_sexpr(d->t), term_to_sexpr(d->t2)});
        case Rule::Axiom: return slist({satom("axiom"), satom(d->axiom_name)});
        case Rule::BoolElim:
            return slist({satom("boolelim"), satom(d->x), formula_to_sexpr(d->f)});
        case Rule::BQDef:
            return slist({satom("bqdef"), satom(d->flag ? "all" : "ex"),
                          satom(d->lr ? "lr" : "rl"), satom(d->x), ty_to_sexpr(d->xty),
                          formula_to_sexpr(d->f), formula_to_sexpr(d->f2)});
        case Rule::IntMajAx1: return slist({satom("intmaj-ax1")});
        case Rule::IntMajAx2:
            return slist({satom("intmaj-ax2"), ty_to_sexpr(d->xty), ty_to_sexpr(d->yty)});
        case Rule::Weaken:
            return slist({satom("weaken"), formula_to_sexpr(d->f),
                          satom(std::to_string(d->i)), kid(0)});
        case Rule::Contract:
            return slist({satom("contract"), satom(std::to_string(d->i)), kid(0)});
        case Rule::Swap: return slist({satom("swap"), satom(std::to_string(d->i)), kid(0)});
        case Rule::AndL: return slist({satom("andl"), satom(std::to_string(d->i)), kid(0)});
        case Rule::AndR: return slist({satom("andr"), kid(0), kid(1)});
        case Rule::ImpR: return slist({satom("impr"), kid(0)});
        case Rule::ImpL: return slist({satom("impl"), kid(0), kid(1)});
        case Rule::Cut: return slist({satom("cut"), kid(0), kid(1)});
        case Rule::ForallR:
            return slist({satom("forallr"), satom(d->x), ty_to_sexpr(d->xty), kid(0)});
        case Rule::ForallL:
            return slist({satom("foralll"), formula_to_sexpr(d->f), term_to_sexpr(d->t),
                          kid(0)});
        case Rule::ExistsR:
            return slist({satom("existsr"), formula_to_sexpr(d->f), term_to_sexpr(d->t),
                          kid(0)});
        case Rule::ExistsL:
            return slist({satom("existsl"), satom(d->x), ty_to_sexpr(d->xty), kid(0)});
        case Rule::Induction:
            return slist({satom("induction"), satom(d->x), formula_to_sexpr(d->f), kid(0),
                          kid(1)});
        case Rule::IntMajRule:
            return slist({satom("intmaj-rule"), term_to_sexpr(d->t), term_to_sexpr(d->t2),
                          satom(d->x), satom(d->x2), kid(0)});
    }
    fail("derivation_to_sexpr: bad rule");
}

DerivPtr derivation_from_sexpr(const sexpr::NodePtr& n) {
    std::string head = sexpr::head(n);
    if (head.empty()) fail("derivation: expected a rule list, got " + sexpr::show(n));
    const auto& items = sexpr::items_of(n, "derivation");
    auto arity = [&](std::size_t k) {
        if (items.size() != k)
            fail("(" + head + " ...) expects " + std::to_string(k - 1) + " arguments");
    };
    Derivation d;
    if (head == "id" || head == "botl") {
        arity(2);
        d.rule = head == "id" ? Rule::Id : Rule::BotL;
        d.f = formula_from_sexpr(items[1]);
    } else if (head == "eqrefl") {
        arity(2);
        d.rule = Rule::EqRefl;
        d.t = term_from_sexpr(items[1]);
    } else if (head == "conv") {
        arity(3);
        d.rule = Rule::Conv;
        d.t = term_from_sexpr(items[1]);
        d.t2 = term_from_sexpr(items[2]);
    } else if (head == "eqsubst") {
        arity(6);
        d.rule = Rule::EqSubst;
        d.x = sexpr::atom_of(items[1], "eqsubst variable");
        d.xty = ty_from_sexpr(items[2]);
        VarCtx env{{d.x, d.xty}};
        d.f = formula_from_sexpr(items[3], env);
        d.t = term_from_sexpr(items[4]);
        d.t2 = term_from_sexpr(items[5]);
    } else if (head == "axiom") {
        arity(2);
        d.rule = Rule::Axiom;
        d.axiom_name = sexpr::atom_of(items[1], "axiom name");
    } else if (head == "boolelim") {
        arity(3);
        d.rule = Rule::BoolElim;
        d.x = sexpr::atom_of(items[1], "boolelim variable");
        VarCtx env{{d.x, boolean()}};
        d.f = formula_from_sexpr(items[2], env);
    } else if (head == "bqdef") {
        arity(7);
        d.rule = Rule::BQDef;
        const std::string& fl = sexpr::atom_of(items[1], "bqdef flavour");
        if (fl == "all") d.flag = true;
        else if (fl == "ex") d.flag = false;
        else fail("bqdef flavour must be all or ex");
        const std::string& dir = sexpr::atom_of(items[2], "bqdef direction");
        if (dir == "lr") d.lr = true;
        else if (dir == "rl") d.lr = false;
        else fail("bqdef direction must be lr or rl");
        d.x = sexpr::atom_of(items[3], "bqdef variable");
        d.xty = ty_from_sexpr(items[4]);
        VarCtx env{{d.x, d.xty}};
        d.f = formula_from_sexpr(items[5], env);
        d.f2 = formula_from_sexpr(items[6], env);
    } else if (head == "intmaj-ax1") {
        arity(1);
        d.rule = Rule::IntMajAx1;
    } else if (head == "intmaj-ax2") {
        arity(3);
        d.rule = Rule::IntMajAx2;
        d.xty = ty_from_sexpr(items[1]);
        d.yty = ty_from_sexpr(items[2]);
    } else if (head == "weaken") {
        arity(4);
        d.rule = Rule::Weaken;
        d.f = formula_from_sexpr(items[1]);
        d.i = index_of(items[2]);
        d.kids = {derivation_from_sexpr(items[3])};
    } else if (head == "contract" || head == "swap" || head == "andl") {
        arity(3);
        d.rule = head == "contract" ? Rule::Contract
                 : head == "swap"   ? Rule::Swap
                                    : Rule::AndL;
        d.i = index_of(items[1]);
        d.kids = {derivation_from_sexpr(items[2])};
    } else if (head == "andr" || head == "impl" || head == "cut") {
        arity(3);
        d.rule = head == "andr" ? Rule::AndR : head == "impl" ? Rule::ImpL : Rule::Cut;
        d.kids = {derivation_from_sexpr(items[1]), derivation_from_sexpr(items[2])};
    } else if (head == "impr") {
        arity(2);
        d.rule = Rule::ImpR;
        d.kids = {derivation_from_sexpr(items[1])};
    } else if (head == "forallr" || head == "existsl") {
        arity(4);
        d.rule = head == "forallr" ? Rule::ForallR : Rule::ExistsL;
        d.x = sexpr::atom_of(items[1], "bound variable");
        d.xty = ty_from_sexpr(items[2]);
        d.kids = {derivation_from_sexpr(items[3])};
    } else if (head == "foralll" || head == "existsr") {
        arity(4);
        d.rule = head == "foralll" ? Rule::ForallL : Rule::ExistsR;
        d.f = formula_from_sexpr(items[1]);
        d.t = term_from_sexpr(items[2]);
        d.kids = {derivation_from_sexpr(items[3])};
    } else if (head == "induction") {
        arity(5);
        d.rule = Rule::Induction;
        d.x = sexpr::atom_of(items[1], "induction variable");
        d.xty = nat();
        VarCtx env{{d.x, nat()}};
        d.f = formula_from_sexpr(items[2], env);
        d.kids = {derivation_from_sexpr(items[3]), derivation_from_sexpr(items[4])};
    } else if (head == "intmaj-rule") {
        arity(6);
        d.rule = Rule::IntMajRule;
        d.t = term_from_sexpr(items[1]);
        d.t2 = term_from_sexpr(items[2]);
        d.x = sexpr::atom_of(items[3], "intmaj-rule variable");
        d.x2 = sexpr::atom_of(items[4], "intmaj-rule variable");
        d.kids = {derivation_from_sexpr(items[5])};
    } else {
        fail("derivation: unknown rule '" + head + "'");
    }
    return dmk(std::move(d));
}

DerivationFile check_file_from_sexpr(const sexpr::NodePtr& n) {
    if (sexpr::head(n) != "check") fail("expected (check (theory ...) (conclusion ...) (proof ...))");
    const auto& items = sexpr::items_of(n, "check file");
    DerivationFile file;
    bool have_theory = false, have_concl = false, have_proof = false;
    for (std::size_t i = 1; i < items.size(); ++i) {
        std::string head = sexpr::head(items[i]);
        if (head == "theory") {
            file.theory = theory_from_sexpr(items[i]);
            have_theory = true;
        } else if (head == "conclusion") {
            const auto& c = sexpr::items_of(items[i], "conclusion");
            if (c.size() != 2) fail("(conclusion (seq ...)) expected");
            file.stated = sequent_from_sexpr(c[1]);
            have_concl = true;
        } else if (head == "proof") {
            const auto& p = sexpr::items_of(items[i], "proof");
            if (p.size() != 2) fail("(proof NODE) expected");
            file.proof = derivation_from_sexpr(p[1]);
            have_proof = true;
        } else {
            fail("check file: unknown section '" + head + "'");
        }
    }
    if (!have_theory) fail("check file: missing (theory ...)");
    if (!have_concl) fail("check file: missing (conclusion ...)");
    if (!have_proof) fail("check file: missing (proof ...)");
    return file;
}

DerivationFile parse_check_file(const std::string& text) {
    return check_file_from_sexpr(sexpr::parse(text));
}

} // namespace wit
