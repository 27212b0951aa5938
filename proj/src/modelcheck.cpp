#include "wit/modelcheck.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "wit/interp.hpp"

namespace wit {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw modelcheck_error(msg); }

ValuePtr mk(Value v) { return std::make_shared<const Value>(std::move(v)); }

// Wraps an already-normal closed term without re-normalizing.
ValuePtr fun_from_normal(TermPtr nf, TyPtr ty) {
    Value v;
    v.kind = VKind::Fun;
    v.ty = std::move(ty);
    v.def = std::move(nf);
    return mk(std::move(v));
}

} // namespace

// ===========================================================================
// Values.
// ===========================================================================
ValuePtr nat_value(std::uint64_t n) {
    Value v;
    v.kind = VKind::Nat;
    v.nat = n;
    return mk(std::move(v));
}

ValuePtr bool_value(bool one) {
    Value v;
    v.kind = VKind::Bool;
    v.one = one;
    return mk(std::move(v));
}

ValuePtr fun_value(const TermPtr& def) {
    if (!def) fail("fun_value: missing term");
    if (!is_closed(def)) fail("fun_value: the defining term must be closed");
    TyPtr ty;
    try {
        ty = typecheck(def);
    } catch (const std::runtime_error& e) {
        fail(std::string("fun_value: ") + e.what());
    }
    if (ty->kind != Ty::Kind::Func)
        fail("fun_value: expected a function type, got " + show(ty));
    return fun_from_normal(normalize(def), ty);
}

ValuePtr set_value(const TyPtr& elem_ty, std::vector<ValuePtr> elems) {
    if (!elem_ty) fail("set_value: missing element type");
    if (elems.empty()) fail("set_value: sets are non-empty");
    for (const auto& e : elems)
        if (!equal(type_of(e), elem_ty))
            fail("set_value: member " + show(e) + " has type " + show(type_of(e)) +
                 ", expected " + show(elem_ty));
    std::sort(elems.begin(), elems.end(),
              [](const ValuePtr& a, const ValuePtr& b) { return compare(a, b) < 0; });
    elems.erase(std::unique(elems.begin(), elems.end(),
                            [](const ValuePtr& a, const ValuePtr& b) {
                                return compare(a, b) == 0;
                            }),
                elems.end());
    Value v;
    v.kind = VKind::Set;
    v.ty = elem_ty;
    v.elems = std::move(elems);
    return mk(std::move(v));
}

TyPtr type_of(const ValuePtr& v) {
    if (!v) fail("type_of: missing value");
    switch (v->kind) {
        case VKind::Nat: return nat();
        case VKind::Bool: return boolean();
        case VKind::Fun: return v->ty;
        case VKind::Set: return star(v->ty);
    }
    fail("type_of: bad value");
}

TermPtr to_term(const ValuePtr& v) {
    if (!v) fail("to_term: missing value");
    switch (v->kind) {
        case VKind::Nat: return numeral(v->nat);
        case VKind::Bool: return bool_lit(v->one ? 1 : 0);
        case VKind::Fun: return v->def;
        case VKind::Set: {
            std::vector<TermPtr> elems;
            for (const auto& e : v->elems) elems.push_back(to_term(e));
            return set_term(v->ty, std::move(elems));
        }
    }
    fail("to_term: bad value");
}

std::string show(const ValuePtr& v) { return show_pretty(to_term(v)); }

int compare(const ValuePtr& a, const ValuePtr& b) { return compare(to_term(a), to_term(b)); }

bool equal(const ValuePtr& a, const ValuePtr& b) { return compare(a, b) == 0; }

// ===========================================================================
// Evaluation.
// ===========================================================================
namespace {

ValuePtr value_of_normal(const TermPtr& nf, const Budgets& bud) {
    TyPtr ty;
    try {
        ty = typecheck(nf);
    } catch (const std::runtime_error& e) {
        fail(std::string("eval: ") + e.what());
    }
    switch (ty->kind) {
        case Ty::Kind::Ground:
            if (ty->name == "N") {
                auto k = as_numeral(nf);
                if (!k) fail("eval: " + show_pretty(nf) + " is not a numeral");
                return nat_value(*k);
            }
            if (ty->name == "B") {
                if (nf->kind == Term::Kind::Con && nf->con.kind == ConstKind::Bool0)
                    return bool_value(false);
                if (nf->kind == Term::Kind::Con && nf->con.kind == ConstKind::Bool1)
                    return bool_value(true);
                fail("eval: " + show_pretty(nf) + " is not a Boolean literal");
            }
            fail("eval: no values at ground type '" + ty->name + "'");
        case Ty::Kind::Star: {
            auto vs = as_set(nf);
            if (!vs) fail("eval: " + show_pretty(nf) + " is not a set literal");
            std::vector<ValuePtr> members;
            for (const auto& e : vs->elems) members.push_back(value_of_normal(e, bud));
            return set_value(vs->elem_ty, std::move(members));
        }
        case Ty::Kind::Func:
            return fun_from_normal(nf, ty);
    }
    fail("eval: bad type");
}

} // namespace

ValuePtr eval(const TermPtr& t, const ValueEnv& env, const Budgets& bud) {
    if (!t) fail("eval: missing term");
    TermPtr closed = t;
    for (const auto& x : free_vars(t)) {
        auto it = env.find(x);
        if (it == env.end()) fail("eval: unbound variable '" + x + "'");
        closed = subst(closed, x, to_term(it->second));
    }
    return value_of_normal(normalize(closed, bud.step_budget), bud);
}

ValuePtr apply(const ValuePtr& f, const ValuePtr& arg, const Budgets& bud) {
    if (!f || f->kind != VKind::Fun) fail("apply: not a function value");
    return eval(app(f->def, to_term(arg)), {}, bud);
}

// ===========================================================================
// Universes.
// ===========================================================================
namespace {

std::uint64_t ipow_capped(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (base == 0) return 0;
        if (r > cap / base) return cap + 1;
        r *= base;
    }
    return r;
}

// \x. Cond(iszero x, table[0], Cond(iszero (pred x), table[1], ... table[n-1]))
// The last entry doubles as the default beyond the tabulated segment.
TermPtr nat_lookup_term(const TyPtr& cod, const std::vector<TermPtr>& table) {
    TermPtr x = var("x", nat());
    TermPtr acc = table.back();
    for (std::size_t i = table.size() - 1; i-- > 0;) {
        TermPtr probe = x;
        for (std::size_t k = 0; k < i; ++k) probe = app(pred_term(), probe);
        acc = app(con(ConstKind::Cond, {cod}), {app(iszero_term(), probe), table[i], acc});
    }
    return lam("x", nat(), acc);
}

TermPtr bool_lookup_term(const TyPtr& cod, const TermPtr& at0, const TermPtr& at1) {
    TermPtr i = var("i", boolean());
    return lam("i", boolean(), app(con(ConstKind::Cond, {cod}), {i, at0, at1}));
}

std::string probe_signature(const ValuePtr& f, const std::vector<ValuePtr>& probes,
                            const Budgets& bud) {
    std::string sig;
    for (const auto& p : probes) {
        sig += show(apply(f, p, bud));
        sig += '|';
    }
    return sig;
}

// Term grammar for function universes: constant maps, the identity, successor
// and max-with-a-constant at N -> N (closed under pairwise composition up to
// the configured depth), singleton maps into the star of the domain, and
// point evaluations plus successor/max combinations at second order.
std::vector<TermPtr> grammar_terms(const TyPtr& A, const TyPtr& B, const Universe& u) {
    const TyPtr N = nat();
    std::vector<TermPtr> d1;
    {
        const auto& codvals = u.values(B);
        std::size_t ccap = std::min<std::size_t>(codvals.size(), 16);
        for (std::size_t i = 0; i < ccap; ++i) d1.push_back(lam("x", A, to_term(codvals[i])));
    }
    if (equal(A, B)) d1.push_back(lam("x", A, var("x", A)));
    if (equal(A, N) && equal(B, N)) {
        TermPtr n = var("n", N);
        d1.push_back(lam("n", N, app(con(ConstKind::Succ), n)));
        for (std::uint64_t c : {std::uint64_t{3}, u.budgets.max_nat})
            d1.push_back(lam("n", N, app(max_term(N), {n, numeral(c)})));
    }
    if (B->kind == Ty::Kind::Star && equal(B->elem, A))
        d1.push_back(lam("x", A, app(con(ConstKind::Singleton, {A}), var("x", A))));
    if (A->kind == Ty::Kind::Func && equal(A, func(N, N)) && equal(B, N)) {
        TermPtr f = var("f", A);
        for (std::uint64_t c = 0; c <= u.budgets.max_nat; ++c)
            d1.push_back(lam("f", A, app(f, numeral(c))));
        d1.push_back(lam("f", A, app(con(ConstKind::Succ), app(f, numeral(0)))));
        d1.push_back(lam("f", A,
                         app(max_term(N), {app(f, numeral(0)), app(f, numeral(u.budgets.max_nat))})));
    }
    std::vector<TermPtr> out = d1;
    if (u.budgets.max_fn_depth >= 2 && equal(A, N) && equal(B, N)) {
        TermPtr n = var("n", N);
        for (const auto& g : d1)
            for (const auto& f : d1) out.push_back(lam("n", N, app(g, app(f, n))));
    }
    return out;
}

std::pair<std::vector<ValuePtr>, bool> generate_universe(const TyPtr& ty, const Universe& u) {
    const Budgets& bud = u.budgets;
    switch (ty->kind) {
        case Ty::Kind::Ground: {
            if (ty->name == "N") {
                std::vector<ValuePtr> vals;
                for (std::uint64_t n = 0; n <= bud.max_nat; ++n) vals.push_back(nat_value(n));
                return {vals, false};
            }
            if (ty->name == "B") return {{bool_value(false), bool_value(true)}, true};
            fail("no universe configured for ground type '" + ty->name + "'");
        }
        case Ty::Kind::Star: {
            const auto& elems = u.values(ty->elem);
            bool elem_exh = u.exhaustive(ty->elem);
            std::vector<ValuePtr> vals;
            bool capped = false;
            std::size_t maxk = std::min(bud.max_set_size, elems.size());
            for (std::size_t k = 1; k <= maxk && !capped; ++k) {
                std::vector<std::size_t> idx(k);
                std::iota(idx.begin(), idx.end(), std::size_t{0});
                for (;;) {
                    if (vals.size() >= bud.max_type_universe) {
                        capped = true;
                        break;
                    }
                    std::vector<ValuePtr> members;
                    for (std::size_t i : idx) members.push_back(elems[i]);
                    vals.push_back(set_value(ty->elem, std::move(members)));
                    // next k-combination of {0..elems.size()-1}
                    std::size_t i = k;
                    while (i-- > 0)
                        if (idx[i] + 1 <= elems.size() - (k - i)) break;
                    if (i == static_cast<std::size_t>(-1)) break;
                    ++idx[i];
                    for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
                }
            }
            bool exh = elem_exh && !capped && elems.size() <= bud.max_set_size;
            return {vals, exh};
        }
        case Ty::Kind::Func: {
            const auto& domv = u.values(ty->dom);
            const auto& codv = u.values(ty->cod);
            bool nat_dom = ty->dom->kind == Ty::Kind::Ground && ty->dom->name == "N";
            bool bool_dom = ty->dom->kind == Ty::Kind::Ground && ty->dom->name == "B";
            // A N-domain lookup table indexes positionally, so it needs the
            // universe to be exactly {0..n} in order.
            if (nat_dom)
                for (std::size_t i = 0; i < domv.size(); ++i)
                    if (domv[i]->kind != VKind::Nat || domv[i]->nat != i) nat_dom = false;
            int b0 = -1, b1 = -1;
            if (bool_dom) {
                for (std::size_t i = 0; i < domv.size(); ++i) {
                    if (domv[i]->kind != VKind::Bool) continue;
                    (domv[i]->one ? b1 : b0) = static_cast<int>(i);
                }
                if (b0 < 0 || b1 < 0) bool_dom = false;
            }
            std::uint64_t count = ipow_capped(codv.size(), domv.size(), bud.tabulation_cap);
            if ((nat_dom || bool_dom) && count <= bud.tabulation_cap) {
                std::vector<ValuePtr> vals;
                std::vector<std::size_t> idx(domv.size(), 0);
                for (;;) {
                    std::vector<TermPtr> table;
                    for (std::size_t i = 0; i < domv.size(); ++i)
                        table.push_back(to_term(codv[idx[i]]));
                    TermPtr t = nat_dom
                                    ? nat_lookup_term(ty->cod, table)
                                    : bool_lookup_term(ty->cod, table[static_cast<std::size_t>(b0)],
                                                       table[static_cast<std::size_t>(b1)]);
                    vals.push_back(fun_value(t));
                    std::size_t i = 0;
                    while (i < idx.size()) {
                        if (++idx[i] < codv.size()) break;
                        idx[i] = 0;
                        ++i;
                    }
                    if (i == idx.size()) break;
                }
                return {vals, u.exhaustive(ty->dom) && u.exhaustive(ty->cod)};
            }
            auto cands = grammar_terms(ty->dom, ty->cod, u);
            std::vector<ValuePtr> vals;
            std::set<std::string> seen;
            std::vector<ValuePtr> probes(domv.begin(),
                                         domv.begin() + std::min<std::size_t>(domv.size(), 8));
            for (const auto& c : cands) {
                if (vals.size() >= bud.max_type_universe) break;
                try {
                    ValuePtr f = fun_value(c);
                    if (seen.insert(probe_signature(f, probes, bud)).second) vals.push_back(f);
                } catch (const term_error&) {
                    continue;
                } catch (const modelcheck_error&) {
                    continue;
                }
            }
            if (vals.empty())
                fail("no universe functions generated for type " + show(ty) + "; configure one");
            return {vals, false};
        }
    }
    fail("generate_universe: bad type");
}

} // namespace

void Universe::set(const TyPtr& ty, std::vector<ValuePtr> vals, bool exhaustive) {
    if (!ty) fail("universe: missing type");
    if (vals.empty()) fail("universe for " + wit::show(ty) + " must be non-empty");
    for (const auto& v : vals)
        if (!equal(type_of(v), ty))
            fail("universe member " + wit::show(v) + " is not of type " + wit::show(ty));
    Entry e;
    e.vals = std::move(vals);
    e.exhaustive = exhaustive;
    entries_[wit::show(ty)] = std::move(e);
}

const Universe::Entry& Universe::entry(const TyPtr& ty) const {
    if (!ty) fail("universe: missing type");
    std::string key = wit::show(ty);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
    auto [vals, exh] = generate_universe(ty, *this);
    Entry e;
    e.vals = std::move(vals);
    e.exhaustive = exh;
    return entries_.emplace(key, std::move(e)).first->second;
}

const std::vector<ValuePtr>& Universe::values(const TyPtr& ty) const { return entry(ty).vals; }

bool Universe::exhaustive(const TyPtr& ty) const { return entry(ty).exhaustive; }

Universe universe_from_sexpr(const sexpr::NodePtr& n) {
    if (sexpr::head(n) != "universe") fail("expected (universe ...)");
    const auto& items = sexpr::items_of(n, "universe");
    Universe u;
    struct Pending {
        TyPtr ty;
        std::vector<sexpr::NodePtr> terms;
        bool exhaustive;
    };
    std::vector<Pending> pending;
    auto num_of = [](const sexpr::NodePtr& child, const char* what) -> std::uint64_t {
        const auto& kids = sexpr::items_of(child, what);
        if (kids.size() != 2) fail(std::string(what) + " expects a single number");
        try {
            return std::stoull(sexpr::atom_of(kids[1], what));
        } catch (const std::exception&) {
            fail(std::string(what) + " expects a number");
        }
    };
    for (std::size_t i = 1; i < items.size(); ++i) {
        const auto& child = items[i];
        std::string h = sexpr::head(child);
        if (h == "max-nat") u.budgets.max_nat = num_of(child, "max-nat");
        else if (h == "max-set") u.budgets.max_set_size = num_of(child, "max-set");
        else if (h == "max-probe-depth") u.budgets.max_probe_depth = num_of(child, "max-probe-depth");
        else if (h == "fn-depth") u.budgets.max_fn_depth = num_of(child, "fn-depth");
        else if (h == "tab-cap") u.budgets.tabulation_cap = num_of(child, "tab-cap");
        else if (h == "max-universe") u.budgets.max_type_universe = num_of(child, "max-universe");
        else if (h == "probe-cap") u.budgets.probe_cap = num_of(child, "probe-cap");
        else if (h == "steps") u.budgets.step_budget = num_of(child, "steps");
        else if (h == "max-instances") u.budgets.max_instances = num_of(child, "max-instances");
        else if (h == "seed") u.budgets.seed = num_of(child, "seed");
        else if (h == "type") {
            const auto& kids = sexpr::items_of(child, "type");
            if (kids.size() < 3) fail("(type TY [exhaustive] (values T*)) expects a type and values");
            Pending p;
            p.ty = ty_from_sexpr(kids[1]);
            std::size_t at = 2;
            p.exhaustive = false;
            if (kids[at]->is_atom && kids[at]->atom == "exhaustive") {
                p.exhaustive = true;
                ++at;
            }
            if (at >= kids.size() || sexpr::head(kids[at]) != "values")
                fail("(type ...) expects a (values T*) list");
            const auto& vs = sexpr::items_of(kids[at], "values");
            for (std::size_t j = 1; j < vs.size(); ++j) p.terms.push_back(vs[j]);
            pending.push_back(std::move(p));
        } else {
            fail("unknown universe key '" + h + "'");
        }
    }
    for (const auto& p : pending) {
        std::vector<ValuePtr> vals;
        for (const auto& tn : p.terms) vals.push_back(eval(term_from_sexpr(tn), {}, u.budgets));
        u.set(p.ty, std::move(vals), p.exhaustive);
    }
    return u;
}

Universe parse_universe(const std::string& text) { return universe_from_sexpr(sexpr::parse(text)); }

// ===========================================================================
// Check results.
// ===========================================================================
namespace {

CheckResult r_holds(bool exact) {
    CheckResult r;
    r.outcome = Outcome::Holds;
    r.exact = exact;
    return r;
}

CheckResult r_fails(std::vector<Binding> ce, std::string note = "") {
    CheckResult r;
    r.outcome = Outcome::Fails;
    r.exact = true;
    r.counterexample = std::move(ce);
    r.note = std::move(note);
    return r;
}

CheckResult r_exh(std::string note) {
    CheckResult r;
    r.outcome = Outcome::Exhausted;
    r.note = std::move(note);
    return r;
}

std::string show_bindings(const std::vector<Binding>& bs) {
    std::string out = "[";
    for (std::size_t i = 0; i < bs.size(); ++i) {
        if (i) out += ", ";
        out += bs[i].var + " = " + show(bs[i].val);
    }
    return out + "]";
}

} // namespace

std::string show(Outcome o) {
    switch (o) {
        case Outcome::Holds: return "holds";
        case Outcome::Fails: return "fails";
        case Outcome::Exhausted: return "exhausted";
    }
    return "?";
}

std::string show(const CheckResult& r) {
    switch (r.outcome) {
        case Outcome::Holds: return r.exact ? "holds" : "holds (universe-relative)";
        case Outcome::Fails: {
            std::string out = "fails";
            if (!r.counterexample.empty()) out += " at " + show_bindings(r.counterexample);
            if (!r.note.empty()) out += ": " + r.note;
            return out;
        }
        case Outcome::Exhausted: return "exhausted: " + r.note;
    }
    return "?";
}

// ===========================================================================
// Value comparison (probe-based at function types).
// ===========================================================================
namespace {

// verdict: 1 equal (exactly), 0 equal on probes only, -1 distinct (exactly).
struct EqRes {
    int verdict;
    std::string note;
};

EqRes value_eq(const ValuePtr& a, const ValuePtr& b, const Universe& u, std::size_t depth) {
    if (a->kind != b->kind) fail("comparing values of different kinds");
    switch (a->kind) {
        case VKind::Nat:
            if (a->nat == b->nat) return {1, ""};
            return {-1, show(a) + " /= " + show(b)};
        case VKind::Bool:
            if (a->one == b->one) return {1, ""};
            return {-1, show(a) + " /= " + show(b)};
        case VKind::Set: {
            if (!equal(a->ty, b->ty)) fail("comparing sets of different element types");
            auto side = [&](const ValuePtr& xs, const ValuePtr& ys) -> EqRes {
                bool limited = false;
                for (const auto& m : xs->elems) {
                    bool exact_in = false, maybe_in = false;
                    for (const auto& n2 : ys->elems) {
                        EqRes r = value_eq(m, n2, u, depth);
                        if (r.verdict == 1) {
                            exact_in = true;
                            break;
                        }
                        if (r.verdict == 0) maybe_in = true;
                    }
                    if (exact_in) continue;
                    if (maybe_in) {
                        limited = true;
                        continue;
                    }
                    return {-1, "member " + show(m) + " of " + show(xs) + " is not in " + show(ys)};
                }
                return {limited ? 0 : 1, limited ? "set equality decided on probes only" : ""};
            };
            EqRes l = side(a, b);
            if (l.verdict == -1) return l;
            EqRes r = side(b, a);
            if (r.verdict == -1) return r;
            if (l.verdict == 1 && r.verdict == 1) return {1, ""};
            return {0, l.verdict == 0 ? l.note : r.note};
        }
        case VKind::Fun: {
            if (!equal(a->ty, b->ty)) fail("comparing functions of different types");
            if (equal(a->def, b->def)) return {1, ""};
            if (depth >= u.budgets.max_probe_depth)
                return {0, "probe depth budget reached at type " + show(a->ty)};
            const auto& dom = u.values(a->ty->dom);
            std::size_t cap = std::min(dom.size(), u.budgets.probe_cap);
            bool limited = !(u.exhaustive(a->ty->dom) && cap == dom.size());
            for (std::size_t i = 0; i < cap; ++i) {
                ValuePtr fa = apply(a, dom[i], u.budgets);
                ValuePtr fb = apply(b, dom[i], u.budgets);
                EqRes r = value_eq(fa, fb, u, depth + 1);
                if (r.verdict == -1)
                    return {-1, "at argument " + show(dom[i]) + ": " +
                                    (r.note.empty() ? show(fa) + " /= " + show(fb) : r.note)};
                if (r.verdict == 0) limited = true;
            }
            return {limited ? 0 : 1,
                    limited ? "function equality at " + show(a->ty) + " decided on " +
                                  std::to_string(cap) + " probes only"
                            : ""};
        }
    }
    fail("value_eq: bad value");
}

} // namespace

// ===========================================================================
// Majorizability.
// ===========================================================================
std::optional<TyPtr> shadow_type(const TyPtr& t) {
    if (!t) fail("shadow_type: missing type");
    switch (t->kind) {
        case Ty::Kind::Ground:
            if (t->name == "N") return nat();
            if (t->name == "B") return std::nullopt;
            fail("shadow_type: defined for types built from N and B, got '" + t->name + "'");
        case Ty::Kind::Star: {
            auto e = shadow_type(t->elem);
            if (!e) fail("shadow_type: star of a bounded type has no shadow");
            return star(*e);
        }
        case Ty::Kind::Func: {
            auto c = shadow_type(t->cod);
            if (!c) {
                shadow_type(t->dom); // still reject foreign grounds inside
                return std::nullopt;
            }
            auto d = shadow_type(t->dom);
            if (!d) return c;
            return func(*d, *c);
        }
    }
    fail("shadow_type: bad kind");
}

namespace {

std::string lvl(std::size_t depth) { return depth <= 1 ? "" : std::to_string(depth); }

CheckResult bezem_impl(const TyPtr& sigma, const ValuePtr& x, const ValuePtr& a,
                       const Universe& u, std::size_t depth) {
    switch (sigma->kind) {
        case Ty::Kind::Ground: {
            if (sigma->name == "N") {
                if (x->nat <= a->nat) return r_holds(true);
                return r_fails({}, std::to_string(x->nat) + " <= " + std::to_string(a->nat) +
                                       " is false");
            }
            fail("majorizability is undefined at bounded ground type '" + sigma->name + "'");
        }
        case Ty::Kind::Star: {
            bool all_exact = true;
            std::string unknown;
            for (const auto& m : x->elems) {
                bool got = false, got_exact = false, some_unknown = false;
                for (const auto& n2 : a->elems) {
                    CheckResult r = bezem_impl(sigma->elem, m, n2, u, depth);
                    if (r.holds()) {
                        got = true;
                        got_exact = r.exact;
                        if (r.exact) break;
                    } else if (r.outcome == Outcome::Exhausted) {
                        some_unknown = true;
                    }
                }
                if (!got) {
                    if (some_unknown) {
                        if (unknown.empty())
                            unknown = "majorant search for member " + show(m) + " exhausted";
                        continue;
                    }
                    return r_fails({{"u" + lvl(depth), m}},
                                   "no member of " + show(a) + " majorizes it");
                }
                all_exact = all_exact && got_exact;
            }
            for (const auto& n2 : a->elems) {
                CheckResult r = bezem_impl(sigma->elem, n2, n2, u, depth);
                if (r.fails()) {
                    r.counterexample.insert(r.counterexample.begin(), {"v" + lvl(depth), n2});
                    r.note = "right-hand member is not self-majorizing: " + r.note;
                    return r;
                }
                if (r.outcome == Outcome::Exhausted && unknown.empty()) unknown = r.note;
                all_exact = all_exact && r.exact;
            }
            if (!unknown.empty()) return r_exh(unknown);
            return r_holds(all_exact);
        }
        case Ty::Kind::Func: {
            auto srho = shadow_type(sigma->dom);
            const TyPtr& tau = sigma->cod;
            auto stau = shadow_type(tau);
            if (!stau) fail("majorizability at " + show(sigma) + ": bounded codomain");
            std::string lx = "x" + lvl(depth), la = "a" + lvl(depth), lz = "z" + lvl(depth);
            bool limited = false;
            std::string unknown;
            if (!srho) {
                // bounded domain: every application is bounded by the
                // right-hand side, which majorizes itself
                if (!u.exhaustive(sigma->dom)) limited = true;
                for (const auto& xv : u.values(sigma->dom)) {
                    CheckResult r = bezem_impl(tau, apply(x, xv, u.budgets), a, u, depth + 1);
                    if (r.fails()) {
                        r.counterexample.insert(r.counterexample.begin(), {lx, xv});
                        return r;
                    }
                    if (r.outcome == Outcome::Exhausted) {
                        if (unknown.empty()) unknown = r.note;
                        continue;
                    }
                    limited = limited || !r.exact;
                }
                CheckResult self = bezem_impl(*stau, a, a, u, depth + 1);
                if (self.fails()) {
                    self.note = "right-hand side is not self-majorizing: " + self.note;
                    return self;
                }
                if (self.outcome == Outcome::Exhausted && unknown.empty()) unknown = self.note;
                limited = limited || !self.exact;
            } else {
                const auto& xs = u.values(sigma->dom);
                const auto& as = u.values(*srho);
                limited = !(u.exhaustive(sigma->dom) && u.exhaustive(*srho));
                auto clause = [&](const TyPtr& lty, const std::vector<ValuePtr>& lvals,
                                  const ValuePtr& lfun, const TyPtr& cty,
                                  const std::string& lname) -> std::optional<CheckResult> {
                    for (const auto& lv : lvals) {
                        for (const auto& av : as) {
                            CheckResult pre = bezem_impl(lty, lv, av, u, depth + 1);
                            if (pre.fails()) continue;
                            CheckResult concl = bezem_impl(cty, apply(lfun, lv, u.budgets),
                                                           apply(a, av, u.budgets), u, depth + 1);
                            if (concl.holds()) {
                                limited = limited || !concl.exact;
                                continue;
                            }
                            if (concl.fails() && pre.holds() && pre.exact) {
                                concl.counterexample.insert(concl.counterexample.begin(),
                                                            {la, av});
                                concl.counterexample.insert(concl.counterexample.begin(),
                                                            {lname, lv});
                                return concl;
                            }
                            if (unknown.empty())
                                unknown = concl.fails()
                                              ? "application bound fails but its premise was "
                                                "only universe-verified"
                                              : concl.note;
                        }
                    }
                    return std::nullopt;
                };
                if (auto r = clause(sigma->dom, xs, x, tau, lx)) return *r;
                if (auto r = clause(*srho, as, a, *stau, lz)) return *r;
            }
            if (!unknown.empty()) return r_exh(unknown);
            return r_holds(!limited);
        }
    }
    fail("bezem: bad type");
}

} // namespace

CheckResult bezem_leq_check(const TyPtr& sigma, const ValuePtr& x, const ValuePtr& a,
                            const Universe& u) {
    if (!sigma || !x || !a) fail("bezem_leq_check: missing argument");
    auto sh = shadow_type(sigma);
    if (!sh) fail("majorizability is undefined at bounded type " + show(sigma));
    if (!equal(type_of(x), sigma))
        fail("left-hand value has type " + show(type_of(x)) + ", expected " + show(sigma));
    if (!equal(type_of(a), *sh))
        fail("right-hand value has type " + show(type_of(a)) + ", expected the shadow type " +
             show(*sh));
    return bezem_impl(sigma, x, a, u, 1);
}

CheckResult monotone_check(const TyPtr& sigma, const ValuePtr& v, const Universe& u) {
    if (!sigma || !v) fail("monotone_check: missing argument");
    auto sh = shadow_type(sigma);
    if (!sh || !equal(*sh, sigma))
        fail("monotone requires a self-shadowed type (built from N); got " + show(sigma));
    if (!equal(type_of(v), sigma))
        fail("value has type " + show(type_of(v)) + ", expected " + show(sigma));
    return bezem_impl(sigma, v, v, u, 1);
}

// ===========================================================================
// Formula checking.
// ===========================================================================
namespace {

// Restores (or erases) an environment entry on scope exit.
struct EnvGuard {
    ValueEnv& env;
    std::string name;
    ValuePtr old;
    bool had;
    EnvGuard(ValueEnv& e, std::string n) : env(e), name(std::move(n)) {
        auto it = env.find(name);
        had = it != env.end();
        if (had) old = it->second;
    }
    ~EnvGuard() {
        if (had)
            env[name] = old;
        else
            env.erase(name);
    }
};

CheckResult check_impl(const FormulaPtr& f, const Universe& u, ValueEnv& env);

CheckResult for_all_range(const std::string& x, const std::vector<ValuePtr>& vals,
                          bool range_exh, const FormulaPtr& body, const Universe& u,
                          ValueEnv& env) {
    bool all_exact = true;
    std::string unknown;
    EnvGuard guard(env, x);
    for (const auto& v : vals) {
        env[x] = v;
        CheckResult r = check_impl(body, u, env);
        if (r.fails()) {
            r.counterexample.insert(r.counterexample.begin(), {x, v});
            return r;
        }
        if (r.outcome == Outcome::Exhausted) {
            if (unknown.empty()) unknown = x + " = " + show(v) + ": " + r.note;
            continue;
        }
        all_exact = all_exact && r.exact;
    }
    if (!unknown.empty()) return r_exh(unknown);
    return r_holds(range_exh && all_exact);
}

CheckResult exists_range(const std::string& x, const std::vector<ValuePtr>& vals,
                         bool range_exh, const FormulaPtr& body, const Universe& u,
                         ValueEnv& env) {
    bool found_limited = false, any_unknown = false;
    std::string unknote;
    EnvGuard guard(env, x);
    for (const auto& v : vals) {
        env[x] = v;
        CheckResult r = check_impl(body, u, env);
        if (r.holds() && r.exact) return r_holds(true);
        if (r.holds()) found_limited = true;
        if (r.outcome == Outcome::Exhausted && unknote.empty()) {
            any_unknown = true;
            unknote = x + " = " + show(v) + ": " + r.note;
        }
        any_unknown = any_unknown || r.outcome == Outcome::Exhausted;
    }
    if (found_limited) return r_holds(false);
    if (range_exh && !any_unknown)
        return r_fails({}, "no witness for '" + x + "': every value of the exhaustive range fails");
    return r_exh("exists " + x + ": no witness within the universe" +
                 (unknote.empty() ? "" : "; " + unknote));
}

CheckResult check_impl(const FormulaPtr& f, const Universe& u, ValueEnv& env) {
    switch (f->kind) {
        case FKind::Bot:
            return r_fails({}, "falsum");
        case FKind::Top:
            return r_holds(true);
        case FKind::TermEq: {
            ValuePtr a = eval(f->terms[0], env, u.budgets);
            ValuePtr b = eval(f->terms[1], env, u.budgets);
            EqRes r = value_eq(a, b, u, 0);
            if (r.verdict == 1) return r_holds(true);
            if (r.verdict == -1)
                return r_fails({}, show(a) + " == " + show(b) + " is false" +
                                       (r.note.empty() ? "" : " (" + r.note + ")"));
            return r_exh(r.note.empty() ? "equality decided on probes only" : r.note);
        }
        case FKind::NatLeq: {
            ValuePtr a = eval(f->terms[0], env, u.budgets);
            ValuePtr b = eval(f->terms[1], env, u.budgets);
            if (a->nat <= b->nat) return r_holds(true);
            return r_fails({}, std::to_string(a->nat) + " <= " + std::to_string(b->nat) +
                                   " is false");
        }
        case FKind::IntMaj: {
            TyPtr sigma;
            try {
                sigma = typecheck(f->terms[0]);
            } catch (const std::runtime_error& e) {
                fail(std::string("<|B operand: ") + e.what());
            }
            ValuePtr x = eval(f->terms[0], env, u.budgets);
            ValuePtr a = eval(f->terms[1], env, u.budgets);
            return bezem_impl(sigma, x, a, u, 1);
        }
        case FKind::BezemLeq: {
            TyPtr sigma;
            try {
                sigma = typecheck(f->terms[0]);
            } catch (const std::runtime_error& e) {
                fail(std::string("<=B operand: ") + e.what());
            }
            ValuePtr x = eval(f->terms[0], env, u.budgets);
            ValuePtr a = eval(f->terms[1], env, u.budgets);
            return bezem_impl(sigma, x, a, u, 1);
        }
        case FKind::SetMem: {
            ValuePtr v = eval(f->terms[0], env, u.budgets);
            ValuePtr s = eval(f->terms[1], env, u.budgets);
            if (s->kind != VKind::Set) fail("'in' expects a set value");
            bool maybe = false;
            for (const auto& m : s->elems) {
                EqRes r = value_eq(v, m, u, 0);
                if (r.verdict == 1) return r_holds(true);
                if (r.verdict == 0) maybe = true;
            }
            if (maybe) return r_exh("membership of " + show(v) + " decided on probes only");
            return r_fails({}, show(v) + " is not a member of " + show(s));
        }
        case FKind::Atom:
            fail("relation '" + f->name + "' has no evaluation; interpret the formula first");
        case FKind::ITypePred:
            fail("membership predicate I(.) has no direct evaluation; interpret the formula first");
        case FKind::And: {
            CheckResult a = check_impl(f->kids[0], u, env);
            if (a.fails()) return a;
            CheckResult b = check_impl(f->kids[1], u, env);
            if (b.fails()) return b;
            if (a.outcome == Outcome::Exhausted) return a;
            if (b.outcome == Outcome::Exhausted) return b;
            return r_holds(a.exact && b.exact);
        }
        case FKind::Or: {
            CheckResult a = check_impl(f->kids[0], u, env);
            if (a.holds() && a.exact) return a;
            CheckResult b = check_impl(f->kids[1], u, env);
            if (b.holds() && b.exact) return b;
            if (a.holds()) return a;
            if (b.holds()) return b;
            if (a.fails() && b.fails()) {
                std::vector<Binding> ce = a.counterexample;
                ce.insert(ce.end(), b.counterexample.begin(), b.counterexample.end());
                return r_fails(std::move(ce), "both disjuncts fail: " + a.note +
                                                  (b.note.empty() ? "" : "; " + b.note));
            }
            return a.outcome == Outcome::Exhausted ? a : b;
        }
        case FKind::Imp: {
            CheckResult a = check_impl(f->kids[0], u, env);
            if (a.fails()) return r_holds(true);
            CheckResult b = check_impl(f->kids[1], u, env);
            if (b.holds()) return b;
            if (b.fails()) {
                if (a.holds() && a.exact) return b;
                return r_exh("conclusion fails at " + show_bindings(b.counterexample) +
                             " but the premise was only universe-verified" +
                             (a.note.empty() ? "" : " (" + a.note + ")"));
            }
            return b;
        }
        case FKind::Forall:
            return for_all_range(f->name, u.values(f->ty), u.exhaustive(f->ty), f->kids[0], u,
                                 env);
        case FKind::Exists:
            return exists_range(f->name, u.values(f->ty), u.exhaustive(f->ty), f->kids[0], u,
                                env);
        case FKind::SetForall: {
            ValuePtr s = eval(f->terms[0], env, u.budgets);
            if (s->kind != VKind::Set) fail("set-bounded quantifier expects a set value");
            return for_all_range(f->name, s->elems, true, f->kids[0], u, env);
        }
        case FKind::NumForall:
        case FKind::NumExists: {
            ValuePtr b = eval(f->terms[0], env, u.budgets);
            if (b->kind != VKind::Nat) fail("numeric bound is not a natural number");
            std::vector<ValuePtr> vals;
            for (std::uint64_t k = 0; k <= b->nat; ++k) vals.push_back(nat_value(k));
            if (f->kind == FKind::NumForall)
                return for_all_range(f->name, vals, true, f->kids[0], u, env);
            return exists_range(f->name, vals, true, f->kids[0], u, env);
        }
        case FKind::BForall:
            return check_impl(forall(f->name, f->ty, imp(f->kids[0], f->kids[1])), u, env);
        case FKind::BExists:
            return check_impl(exists(f->name, f->ty, conj(f->kids[0], f->kids[1])), u, env);
    }
    fail("check: bad formula");
}

} // namespace

CheckResult check(const FormulaPtr& f, const Universe& u, const ValueEnv& env) {
    if (!f) fail("check: missing formula");
    ValueEnv e = env;
    return check_impl(f, u, e);
}

// ===========================================================================
// Extraction verification.
// ===========================================================================
namespace {

struct GridDim {
    std::string label;
    const std::vector<ValuePtr>* vals;
};

} // namespace

VerifyReport verify_extraction(const Theory& th, const DerivPtr& d,
                               const BaseInterpretation& base, const Extraction& ex,
                               const Universe& u) {
    CheckedNode root = check_derivation(th, d);
    const Sequent& seq = root.seq;
    const bool rel = ex.mode == ExtractMode::Relativized;
    const InterpOptions& opts = ex.opts;

    auto interp1 = [&](const FormulaPtr& f) {
        return rel ? iinterp(f, base, opts) : uinterp(f, base, opts);
    };
    std::vector<InterpretedFormula> ctxI;
    for (const auto& b : seq.ctx) ctxI.push_back(interp1(b));
    InterpretedFormula succI = interp1(seq.succ);

    // Free variables of the end-sequent, name-ordered.
    std::map<std::string, TyPtr> frees;
    {
        auto merge = [&](const FormulaPtr& f) {
            for (const auto& [n2, t2] : free_vars(f)) {
                auto it = frees.find(n2);
                if (it == frees.end())
                    frees.emplace(n2, t2);
                else if (!equal(it->second, t2))
                    fail("free variable '" + n2 + "' used at two types");
            }
        };
        for (const auto& b : seq.ctx) merge(b);
        merge(seq.succ);
    }
    std::vector<std::pair<std::string, TyPtr>> xs(frees.begin(), frees.end());

    std::vector<InterpretedFormula> memI;
    if (rel)
        for (const auto& [xn, xt] : xs) memI.push_back(uinterp(itype(var(xn, xt)), base, opts));

    // --- shape and signature checks -------------------------------------
    if (ex.s.size() != ctxI.size())
        fail("extraction has " + std::to_string(ex.s.size()) +
             " context collector tuples, expected " + std::to_string(ctxI.size()));
    for (std::size_t i = 0; i < ctxI.size(); ++i)
        if (ex.s[i].size() != ctxI[i].b_vars.size())
            fail("context formula " + std::to_string(i) + " needs " +
                 std::to_string(ctxI[i].b_vars.size()) + " collectors, got " +
                 std::to_string(ex.s[i].size()));
    if (ex.t.size() != succI.a_vars.size())
        fail("succedent needs " + std::to_string(succI.a_vars.size()) + " witnesses, got " +
             std::to_string(ex.t.size()));
    if (rel) {
        if (ex.q.size() != xs.size())
            fail("relativized extraction needs " + std::to_string(xs.size()) +
                 " membership collector tuples, got " + std::to_string(ex.q.size()));
        for (std::size_t k = 0; k < xs.size(); ++k)
            if (ex.q[k].size() != memI[k].b_vars.size())
                fail("membership predicate of '" + xs[k].first + "' needs " +
                     std::to_string(memI[k].b_vars.size()) + " collectors, got " +
                     std::to_string(ex.q[k].size()));
    } else if (!ex.q.empty()) {
        fail("plain-mode extraction carries membership collectors");
    }

    std::vector<TyPtr> ac_tys;
    for (const auto& fi : ctxI)
        for (const auto& av : fi.a_vars) ac_tys.push_back(av.ty);
    for (const auto& mi : memI)
        for (const auto& av : mi.a_vars) ac_tys.push_back(av.ty);
    std::vector<TyPtr> acd_tys = ac_tys;
    for (const auto& dv : succI.b_vars) acd_tys.push_back(dv.ty);

    auto expect_term = [&](const TermPtr& t, const TyPtr& want, const std::string& what) {
        if (!t) fail("missing " + what);
        if (!is_closed(t)) fail(what + " must be closed");
        TyPtr ty;
        try {
            ty = typecheck(t);
        } catch (const std::runtime_error& e) {
            fail(what + ": " + e.what());
        }
        if (!equal(ty, want))
            fail(what + " has type " + show(ty) + ", expected " + show(want));
    };
    for (std::size_t i = 0; i < ctxI.size(); ++i)
        for (std::size_t j = 0; j < ex.s[i].size(); ++j)
            expect_term(ex.s[i][j], func(acd_tys, star(ctxI[i].b_vars[j].ty)),
                        "collector s[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    for (std::size_t j = 0; j < ex.t.size(); ++j)
        expect_term(ex.t[j], func(ac_tys, succI.a_vars[j].ty),
                    "witness t[" + std::to_string(j) + "]");
    for (std::size_t k = 0; k < ex.q.size(); ++k)
        for (std::size_t j = 0; j < ex.q[k].size(); ++j)
            expect_term(ex.q[k][j], func(acd_tys, star(memI[k].b_vars[j].ty)),
                        "membership collector q[" + std::to_string(k) + "][" +
                            std::to_string(j) + "]");

    // --- the assignment grid ---------------------------------------------
    // Dimension order: context witness tuples, membership witness tuples,
    // succedent counter-witness tuple, then the sequent's free variables.
    struct RawDim {
        std::string name;
        TyPtr ty;
    };
    std::vector<RawDim> raw;
    std::vector<std::pair<std::size_t, std::size_t>> a_span; // per ctx formula
    for (const auto& fi : ctxI) {
        a_span.emplace_back(raw.size(), fi.a_vars.size());
        for (const auto& av : fi.a_vars) raw.push_back({av.name, av.ty});
    }
    std::vector<std::pair<std::size_t, std::size_t>> c_span; // per free variable
    for (const auto& mi : memI) {
        c_span.emplace_back(raw.size(), mi.a_vars.size());
        for (const auto& av : mi.a_vars) raw.push_back({av.name, av.ty});
    }
    std::size_t d_off = raw.size();
    for (const auto& dv : succI.b_vars) raw.push_back({dv.name, dv.ty});
    std::size_t x_off = raw.size();
    for (const auto& [xn, xt] : xs) raw.push_back({xn, xt});
    std::size_t ac_count = d_off;
    std::size_t acd_count = x_off;

    std::map<std::string, std::size_t> name_uses;
    for (const auto& r : raw) ++name_uses[r.name];
    std::map<std::string, std::size_t> name_seen;
    std::vector<GridDim> dims;
    for (const auto& r : raw) {
        std::string label = r.name;
        if (name_uses[r.name] > 1) label += "#" + std::to_string(++name_seen[r.name]);
        dims.push_back({label, &u.values(r.ty)});
    }

    VerifyReport rep;
    rep.sequent = show(seq);
    rep.base_tag = ex.base_tag.empty() ? base.tag : ex.base_tag;
    rep.mode = show(ex.mode);
    rep.seed = u.budgets.seed;

    std::uint64_t total = 1;
    bool sampling = false;
    for (const auto& dim : dims) {
        std::uint64_t size = dim.vals->size();
        if (size == 0) fail("empty universe for grid variable '" + dim.label + "'");
        if (total > u.budgets.max_instances / size) {
            sampling = true;
            break;
        }
        total *= size;
    }
    sampling = sampling || total > u.budgets.max_instances;
    std::size_t n_inst = sampling ? u.budgets.max_instances : static_cast<std::size_t>(total);
    rep.sampled = sampling;
    if (sampling)
        rep.note = "assignment grid larger than " + std::to_string(u.budgets.max_instances) +
                   " instances; sampled (seed " + std::to_string(u.budgets.seed) + ")";

    std::mt19937_64 rng(u.budgets.seed);
    std::vector<std::size_t> idx(dims.size(), 0);
    std::vector<ValuePtr> cur(dims.size());
    std::vector<TermPtr> curt(dims.size());
    constexpr std::size_t problem_cap = 25;

    for (std::size_t inst = 0; inst < n_inst; ++inst) {
        if (sampling)
            for (std::size_t k = 0; k < dims.size(); ++k)
                idx[k] = static_cast<std::size_t>(rng() % dims[k].vals->size());
        for (std::size_t k = 0; k < dims.size(); ++k) {
            cur[k] = (*dims[k].vals)[idx[k]];
            curt[k] = to_term(cur[k]);
        }

        std::vector<TermPtr> args_ac(curt.begin(), curt.begin() + ac_count);
        std::vector<TermPtr> args_acd(curt.begin(), curt.begin() + acd_count);
        auto subst_frees = [&](FormulaPtr body) {
            for (std::size_t k = 0; k < xs.size(); ++k)
                body = subst(body, xs[k].first, curt[x_off + k]);
            return body;
        };

        std::vector<FormulaPtr> premises;
        for (std::size_t k = 0; k < memI.size(); ++k) {
            FormulaPtr body = memI[k].body;
            for (std::size_t j = 0; j < memI[k].a_vars.size(); ++j)
                body = subst(body, memI[k].a_vars[j].name, curt[c_span[k].first + j]);
            body = subst_frees(body);
            for (std::size_t j = memI[k].b_vars.size(); j-- > 0;)
                body = set_forall(memI[k].b_vars[j].name, app(ex.q[k][j], args_acd), body);
            premises.push_back(body);
        }
        for (std::size_t i = 0; i < ctxI.size(); ++i) {
            FormulaPtr body = ctxI[i].body;
            for (std::size_t j = 0; j < ctxI[i].a_vars.size(); ++j)
                body = subst(body, ctxI[i].a_vars[j].name, curt[a_span[i].first + j]);
            body = subst_frees(body);
            for (std::size_t j = ctxI[i].b_vars.size(); j-- > 0;)
                body = set_forall(ctxI[i].b_vars[j].name, app(ex.s[i][j], args_acd), body);
            premises.push_back(body);
        }
        FormulaPtr concl = succI.body;
        for (std::size_t j = 0; j < succI.a_vars.size(); ++j)
            concl = subst(concl, succI.a_vars[j].name, app(ex.t[j], args_ac));
        for (std::size_t j = 0; j < succI.b_vars.size(); ++j)
            concl = subst(concl, succI.b_vars[j].name, curt[d_off + j]);
        concl = subst_frees(concl);

        FormulaPtr ob = concl;
        if (!premises.empty()) {
            FormulaPtr prem = premises[0];
            for (std::size_t i = 1; i < premises.size(); ++i) prem = conj(prem, premises[i]);
            ob = imp(prem, concl);
        }

        CheckResult res = check(ob, u, {});
        ++rep.instances;
        switch (res.outcome) {
            case Outcome::Holds: ++rep.holds; break;
            case Outcome::Fails: ++rep.fails; break;
            case Outcome::Exhausted: ++rep.exhausted; break;
        }
        if (!res.holds() && rep.problems.size() < problem_cap) {
            InstanceResult ir;
            for (std::size_t k = 0; k < dims.size(); ++k)
                ir.assignment.push_back({dims[k].label, cur[k]});
            ir.result = res;
            rep.problems.push_back(std::move(ir));
        }

        if (!sampling) {
            std::size_t k = 0;
            while (k < idx.size()) {
                if (++idx[k] < dims[k].vals->size()) break;
                idx[k] = 0;
                ++k;
            }
            if (k == idx.size() && inst + 1 < n_inst) fail("grid iteration out of step");
        }
    }
    return rep;
}

std::string show(const VerifyReport& r) {
    std::ostringstream out;
    out << "sequent: " << r.sequent << "\n";
    out << "base: " << r.base_tag << "  mode: " << r.mode << "  seed: " << r.seed << "\n";
    out << "instances: " << r.instances << "  holds: " << r.holds << "  fails: " << r.fails
        << "  exhausted: " << r.exhausted << "\n";
    if (!r.note.empty()) out << "note: " << r.note << "\n";
    if (!r.problems.empty()) {
        out << "problem instances:\n";
        for (const auto& p : r.problems)
            out << "  " << show_bindings(p.assignment) << " " << show(p.result) << "\n";
    }
    return out.str();
}

std::string machine_summary(const VerifyReport& r) {
    std::ostringstream out;
    out << "result=" << (r.all_holds() ? "holds" : (r.fails > 0 ? "fails" : "exhausted")) << "\n";
    out << "instances=" << r.instances << "\n";
    out << "holds=" << r.holds << "\n";
    out << "fails=" << r.fails << "\n";
    out << "exhausted=" << r.exhausted << "\n";
    out << "sampled=" << (r.sampled ? 1 : 0) << "\n";
    out << "seed=" << r.seed << "\n";
    out << "base=" << r.base_tag << "\n";
    out << "mode=" << r.mode << "\n";
    out << "sequent=" << r.sequent << "\n";
    return out.str();
}

// ===========================================================================
// Continuity moduli.
// ===========================================================================
ModulusResult find_modulus(const TermPtr& phi, const ValuePtr& h, ModulusMode mode,
                           const Universe& u, std::uint64_t budget) {
    const TyPtr N = nat();
    const TyPtr NN = func(N, N);
    if (!phi) fail("find_modulus: missing functional");
    if (!is_closed(phi)) fail("find_modulus: the functional must be a closed term");
    TyPtr pty;
    try {
        pty = typecheck(phi);
    } catch (const std::runtime_error& e) {
        fail(std::string("find_modulus: ") + e.what());
    }
    if (!equal(pty, func(NN, N)))
        fail("find_modulus: expected type ((N -> N) -> N), got " + show(pty));
    if (!h || h->kind != VKind::Fun || !equal(h->ty, NN))
        fail("find_modulus: the argument must be a function value at (N -> N)");
    const Budgets& bud = u.budgets;

    ModulusResult out;
    try {
        std::uint64_t phih = eval(app(phi, h->def), {}, bud)->nat;
        std::uint64_t big = phih + budget + 1;

        // Candidate pool: the N -> N universe plus piecewise functions —
        // steps between 0 and a large constant, identity-up-to-a-point, and
        // the identity bumped at a single point — so that a candidate set
        // missing a relevant point is refutable.
        std::vector<ValuePtr> pool = u.values(NN);
        TermPtr n = var("n", N);
        auto upto = [&](std::uint64_t k, const TermPtr& low, const TermPtr& high) {
            return lam("n", N,
                       app(con(ConstKind::Cond, {N}),
                           {app(leqb_term(), {n, numeral(k)}), low, high}));
        };
        auto bump = [&](std::uint64_t k, const TermPtr& at) {
            // \n. if n == k then `at` else n
            return lam("n", N,
                       app(con(ConstKind::Cond, {N}),
                           {app(leqb_term(), {n, numeral(k)}),
                            app(con(ConstKind::Cond, {N}),
                                {app(leqb_term(), {numeral(k), n}), at, n}),
                            n}));
        };
        for (std::uint64_t k = 0; k <= budget + 2; ++k) {
            pool.push_back(fun_value(upto(k, numeral(0), numeral(big))));
            pool.push_back(fun_value(upto(k, numeral(big), numeral(0))));
        }
        for (std::uint64_t k = 0; k <= 2 * budget + 2; ++k) {
            pool.push_back(fun_value(upto(k, n, numeral(0))));
            pool.push_back(fun_value(upto(k, n, numeral(big))));
        }
        for (std::uint64_t k = 0; k <= budget; ++k) {
            pool.push_back(fun_value(bump(k, numeral(0))));
            pool.push_back(fun_value(bump(k, numeral(big))));
        }

        struct Row {
            std::vector<std::uint64_t> at;
            std::uint64_t phi;
        };
        auto row_of = [&](const ValuePtr& f) {
            Row r;
            r.phi = eval(app(phi, f->def), {}, bud)->nat;
            for (std::uint64_t v = 0; v <= budget; ++v)
                r.at.push_back(apply(f, nat_value(v), bud)->nat);
            return r;
        };
        Row hr = row_of(h);
        std::vector<Row> rows;
        rows.reserve(pool.size());
        for (const auto& f : pool) rows.push_back(row_of(f));

        auto admissible = [&](const std::vector<std::uint64_t>& mu) {
            for (const auto& r : rows) {
                bool constrained = true;
                for (std::uint64_t v : mu) {
                    bool ok = mode == ModulusMode::Eq ? r.at[v] == hr.at[v] : r.at[v] <= hr.at[v];
                    if (!ok) {
                        constrained = false;
                        break;
                    }
                }
                if (!constrained) continue;
                bool concl = mode == ModulusMode::Eq ? r.phi == hr.phi : r.phi <= hr.phi;
                if (!concl) return false;
            }
            return true;
        };

        std::size_t maxk = std::min<std::size_t>(bud.max_set_size,
                                                 static_cast<std::size_t>(budget) + 1);
        std::string params = "subsets of {0.." + std::to_string(budget) + "} of size <= " +
                             std::to_string(maxk) + " against " + std::to_string(pool.size()) +
                             " candidate functions";
        for (std::size_t k = 1; k <= maxk; ++k) {
            std::vector<std::uint64_t> mu(k);
            std::iota(mu.begin(), mu.end(), std::uint64_t{0});
            for (;;) {
                if (admissible(mu)) {
                    std::vector<ValuePtr> members;
                    for (std::uint64_t v : mu) members.push_back(nat_value(v));
                    out.modulus = set_value(N, std::move(members));
                    out.note = "found over " + params;
                    return out;
                }
                std::size_t i = k;
                while (i-- > 0)
                    if (mu[i] + 1 <= budget - (k - 1 - i)) break;
                if (i == static_cast<std::size_t>(-1)) break;
                ++mu[i];
                for (std::size_t j = i + 1; j < k; ++j) mu[j] = mu[j - 1] + 1;
            }
        }
        out.note = "no modulus within budget: searched nonempty " + params;
        return out;
    } catch (const budget_error& e) {
        out.note = std::string("evaluation budget exceeded during the search: ") + e.what();
        return out;
    }
}

} // namespace wit
