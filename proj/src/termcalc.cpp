#include "wit/termcalc.hpp"

#include <algorithm>
#include <random>

namespace wit {

TermPtr var(const std::string& name, TyPtr ty) {
    if (!ty) throw term_error("var: null type");
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Var;
    t->name = name;
    t->ty = std::move(ty);
    return t;
}

TermPtr con(ConstKind kind, std::vector<TyPtr> tyargs) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Con;
    t->con = Const{kind, std::move(tyargs)};
    const_ty(t->con); // validate early
    return t;
}

TermPtr app(TermPtr fn, TermPtr arg) {
    if (!fn || !arg) throw term_error("app: null component");
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::App;
    t->fn = std::move(fn);
    t->arg = std::move(arg);
    return t;
}

TermPtr app(TermPtr fn, const std::vector<TermPtr>& args) {
    TermPtr t = std::move(fn);
    for (const auto& a : args) t = app(t, a);
    return t;
}

TermPtr lam(const std::string& name, TyPtr ty, TermPtr body) {
    if (!ty || !body) throw term_error("lam: null component");
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Lam;
    t->name = name;
    t->ty = std::move(ty);
    t->body = std::move(body);
    return t;
}

TermPtr lam(const std::vector<std::pair<std::string, TyPtr>>& params, TermPtr body) {
    TermPtr t = std::move(body);
    for (auto it = params.rbegin(); it != params.rend(); ++it) t = lam(it->first, it->second, t);
    return t;
}

TermPtr numeral(std::uint64_t n) {
    TermPtr t = con(ConstKind::Zero);
    for (std::uint64_t i = 0; i < n; ++i) t = app(con(ConstKind::Succ), t);
    return t;
}

std::optional<std::uint64_t> as_numeral(const TermPtr& t) {
    std::uint64_t n = 0;
    TermPtr cur = t;
    for (;;) {
        if (cur->kind == Term::Kind::Con && cur->con.kind == ConstKind::Zero) return n;
        if (cur->kind == Term::Kind::App && cur->fn->kind == Term::Kind::Con &&
            cur->fn->con.kind == ConstKind::Succ) {
            ++n;
            cur = cur->arg;
            continue;
        }
        return std::nullopt;
    }
}

TermPtr bool_lit(int v) {
    if (v == 0) return con(ConstKind::Bool0);
    if (v == 1) return con(ConstKind::Bool1);
    throw term_error("bool_lit: value must be 0 or 1");
}

namespace {

void need_args(const Const& c, size_t n, const char* name) {
    if (c.args.size() != n)
        throw term_error(std::string(name) + ": expected " + std::to_string(n) + " type parameter(s)");
    for (const auto& a : c.args)
        if (!a) throw term_error(std::string(name) + ": null type parameter");
}

} // namespace

TyPtr const_ty(const Const& c) {
    using K = ConstKind;
    switch (c.kind) {
    case K::Pi: {
        need_args(c, 2, "pi");
        return func(c.args[0], func(c.args[1], c.args[0]));
    }
    case K::Sigma: {
        need_args(c, 3, "sigma");
        const TyPtr &r = c.args[0], &s = c.args[1], &g = c.args[2];
        return func(func(r, func(s, g)), func(func(r, s), func(r, g)));
    }
    case K::Zero:
        need_args(c, 0, "zero");
        return nat();
    case K::Succ:
        need_args(c, 0, "succ");
        return func(nat(), nat());
    case K::Bool0:
    case K::Bool1:
        need_args(c, 0, "bool");
        return boolean();
    case K::Rec: {
        need_args(c, 1, "rec");
        const TyPtr& s = c.args[0];
        return func(nat(), func(s, func(func(nat(), func(s, s)), s)));
    }
    case K::Cond: {
        need_args(c, 1, "cond");
        const TyPtr& s = c.args[0];
        return func(boolean(), func(s, func(s, s)));
    }
    case K::Default: {
        need_args(c, 1, "default");
        if (c.args[0]->kind != Ty::Kind::Ground)
            throw term_error("default: type parameter must be a ground type, got " + show(c.args[0]));
        return c.args[0];
    }
    case K::Singleton: {
        need_args(c, 1, "sing");
        return func(c.args[0], star(c.args[0]));
    }
    case K::Union: {
        need_args(c, 1, "cup");
        TyPtr st = star(c.args[0]);
        return func(st, func(st, st));
    }
    case K::BigUnion: {
        need_args(c, 2, "bigcup");
        return func(star(c.args[0]), func(func(c.args[0], star(c.args[1])), star(c.args[1])));
    }
    case K::MaxSet:
        need_args(c, 0, "maxset");
        return func(star(nat()), nat());
    case K::MaxPair: {
        need_args(c, 1, "max");
        if (!is_arithmetical(c.args[0]))
            throw term_error("max: type parameter must be arithmetical, got " + show(c.args[0]));
        const TyPtr& s = c.args[0];
        return func(s, func(s, s));
    }
    }
    throw term_error("const_ty: bad constant");
}

TyPtr typecheck(const TermPtr& t, const VarCtx& ctx) {
    switch (t->kind) {
    case Term::Kind::Var: {
        auto it = ctx.find(t->name);
        if (it != ctx.end() && !equal(it->second, t->ty))
            throw term_error("variable '" + t->name + "' used at type " + show(t->ty) +
                             " but bound at " + show(it->second));
        return t->ty;
    }
    case Term::Kind::Con:
        return const_ty(t->con);
    case Term::Kind::App: {
        TyPtr ft = typecheck(t->fn, ctx);
        TyPtr at = typecheck(t->arg, ctx);
        if (ft->kind != Ty::Kind::Func)
            throw term_error("application of a non-function of type " + show(ft));
        if (!equal(ft->dom, at))
            throw term_error("argument type mismatch: expected " + show(ft->dom) + ", got " + show(at));
        return ft->cod;
    }
    case Term::Kind::Lam: {
        VarCtx inner = ctx;
        inner[t->name] = t->ty;
        return func(t->ty, typecheck(t->body, inner));
    }
    }
    throw term_error("typecheck: bad kind");
}

int compare(const TermPtr& a, const TermPtr& b) {
    if (a.get() == b.get()) return 0;
    auto rank = [](Term::Kind k) {
        switch (k) {
        case Term::Kind::Var: return 0;
        case Term::Kind::Con: return 1;
        case Term::Kind::App: return 2;
        case Term::Kind::Lam: return 3;
        }
        return 4;
    };
    if (rank(a->kind) != rank(b->kind)) return rank(a->kind) < rank(b->kind) ? -1 : 1;
    switch (a->kind) {
    case Term::Kind::Var: {
        if (a->name != b->name) return a->name < b->name ? -1 : 1;
        return compare(a->ty, b->ty);
    }
    case Term::Kind::Con: {
        if (a->con.kind != b->con.kind)
            return static_cast<int>(a->con.kind) < static_cast<int>(b->con.kind) ? -1 : 1;
        if (a->con.args.size() != b->con.args.size())
            return a->con.args.size() < b->con.args.size() ? -1 : 1;
        for (size_t i = 0; i < a->con.args.size(); ++i) {
            int c = compare(a->con.args[i], b->con.args[i]);
            if (c != 0) return c;
        }
        return 0;
    }
    case Term::Kind::App: {
        int c = compare(a->fn, b->fn);
        return c != 0 ? c : compare(a->arg, b->arg);
    }
    case Term::Kind::Lam: {
        int c = compare(a->ty, b->ty);
        if (c != 0) return c;
        if (a->name != b->name) return a->name < b->name ? -1 : 1;
        return compare(a->body, b->body);
    }
    }
    throw term_error("compare: bad kind");
}

bool equal(const TermPtr& a, const TermPtr& b) { return compare(a, b) == 0; }

bool free_in(const std::string& x, const TermPtr& t) {
    switch (t->kind) {
    case Term::Kind::Var:
        return t->name == x;
    case Term::Kind::Con:
        return false;
    case Term::Kind::App:
        return free_in(x, t->fn) || free_in(x, t->arg);
    case Term::Kind::Lam:
        return t->name != x && free_in(x, t->body);
    }
    return false;
}

namespace {

void free_vars_into(const TermPtr& t, std::set<std::string>& bound, std::set<std::string>& out) {
    switch (t->kind) {
    case Term::Kind::Var:
        if (!bound.count(t->name)) out.insert(t->name);
        return;
    case Term::Kind::Con:
        return;
    case Term::Kind::App:
        free_vars_into(t->fn, bound, out);
        free_vars_into(t->arg, bound, out);
        return;
    case Term::Kind::Lam: {
        bool fresh = bound.insert(t->name).second;
        free_vars_into(t->body, bound, out);
        if (fresh) bound.erase(t->name);
        return;
    }
    }
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
    std::string n = base;
    while (avoid.count(n)) n += "'";
    return n;
}

} // namespace

std::set<std::string> free_vars(const TermPtr& t) {
    std::set<std::string> bound, out;
    free_vars_into(t, bound, out);
    return out;
}

bool is_closed(const TermPtr& t) { return free_vars(t).empty(); }

TermPtr subst(const TermPtr& t, const std::string& x, const TermPtr& s) {
    switch (t->kind) {
    case Term::Kind::Var:
        return t->name == x ? s : t;
    case Term::Kind::Con:
        return t;
    case Term::Kind::App: {
        TermPtr f = subst(t->fn, x, s);
        TermPtr a = subst(t->arg, x, s);
        if (f.get() == t->fn.get() && a.get() == t->arg.get()) return t;
        return app(f, a);
    }
    case Term::Kind::Lam: {
        if (t->name == x) return t;
        if (free_in(x, t->body) && free_in(t->name, s)) {
            std::set<std::string> avoid = free_vars(s);
            auto bodyfv = free_vars(t->body);
            avoid.insert(bodyfv.begin(), bodyfv.end());
            avoid.insert(x);
            std::string y = fresh_name(t->name, avoid);
            TermPtr renamed = subst(t->body, t->name, var(y, t->ty));
            return lam(y, t->ty, subst(renamed, x, s));
        }
        TermPtr b = subst(t->body, x, s);
        if (b.get() == t->body.get()) return t;
        return lam(t->name, t->ty, b);
    }
    }
    throw term_error("subst: bad kind");
}

std::pair<TermPtr, std::vector<TermPtr>> spine(const TermPtr& t) {
    std::vector<TermPtr> args;
    TermPtr cur = t;
    while (cur->kind == Term::Kind::App) {
        args.push_back(cur->arg);
        cur = cur->fn;
    }
    std::reverse(args.begin(), args.end());
    return {cur, std::move(args)};
}

// ---------------------------------------------------------------------------
// Canonical sets.
// ---------------------------------------------------------------------------

namespace {

// Decomposes a tree of singletons/unions; returns elem type via tyargs.
bool set_literal_parts(const TermPtr& t, TyPtr& elem_ty, std::vector<TermPtr>& elems) {
    auto [head, args] = spine(t);
    if (head->kind != Term::Kind::Con) return false;
    if (head->con.kind == ConstKind::Singleton && args.size() == 1) {
        elem_ty = head->con.args[0];
        elems.push_back(args[0]);
        return true;
    }
    if (head->con.kind == ConstKind::Union && args.size() == 2) {
        elem_ty = head->con.args[0];
        return set_literal_parts(args[0], elem_ty, elems) && set_literal_parts(args[1], elem_ty, elems);
    }
    return false;
}

} // namespace

std::optional<ValueSet> as_set(const TermPtr& t) {
    TyPtr elem_ty;
    std::vector<TermPtr> elems;
    if (!set_literal_parts(t, elem_ty, elems)) return std::nullopt;
    return ValueSet{elem_ty, std::move(elems)};
}

TermPtr set_term(const TyPtr& elem_ty, std::vector<TermPtr> elems) {
    if (elems.empty()) throw term_error("set_term: finite sets are non-empty");
    std::sort(elems.begin(), elems.end(), [](const TermPtr& a, const TermPtr& b) { return compare(a, b) < 0; });
    elems.erase(std::unique(elems.begin(), elems.end(),
                            [](const TermPtr& a, const TermPtr& b) { return equal(a, b); }),
                elems.end());
    TermPtr out = app(con(ConstKind::Singleton, {elem_ty}), elems.back());
    for (size_t i = elems.size() - 1; i-- > 0;)
        out = app(con(ConstKind::Union, {elem_ty}), {app(con(ConstKind::Singleton, {elem_ty}), elems[i]), out});
    return out;
}

bool is_canonical_set(const TermPtr& t) {
    auto vs = as_set(t);
    if (!vs) return false;
    for (size_t i = 0; i + 1 < vs->elems.size(); ++i)
        if (compare(vs->elems[i], vs->elems[i + 1]) >= 0) return false;
    // Canonical trees are right-nested: every left child of a union is a singleton.
    TermPtr cur = t;
    for (;;) {
        auto [head, args] = spine(cur);
        if (head->con.kind == ConstKind::Singleton) return true;
        auto [lh, largs] = spine(args[0]);
        if (lh->kind != Term::Kind::Con || lh->con.kind != ConstKind::Singleton) return false;
        cur = args[1];
    }
}

// ---------------------------------------------------------------------------
// Normalisation.
// ---------------------------------------------------------------------------

namespace {

std::optional<TermPtr> reduce_root(const TermPtr& t);

bool term_is_normal(const TermPtr& t) {
    if (reduce_root(t)) return false;
    switch (t->kind) {
    case Term::Kind::App:
        return term_is_normal(t->fn) && term_is_normal(t->arg);
    case Term::Kind::Lam:
        return term_is_normal(t->body);
    default:
        return true;
    }
}

std::optional<TermPtr> reduce_root(const TermPtr& t) {
    using K = ConstKind;
    if (t->kind == Term::Kind::App && t->fn->kind == Term::Kind::Lam)
        return subst(t->fn->body, t->fn->name, t->arg);
    if (t->kind != Term::Kind::App) return std::nullopt;
    auto [head, args] = spine(t);
    if (head->kind != Term::Kind::Con) return std::nullopt;
    const Const& c = head->con;
    switch (c.kind) {
    case K::Pi:
        if (args.size() == 2) return args[0];
        return std::nullopt;
    case K::Sigma:
        if (args.size() == 3) return app(app(args[0], args[2]), app(args[1], args[2]));
        return std::nullopt;
    case K::Rec: {
        if (args.size() != 3) return std::nullopt;
        const TermPtr& n = args[0];
        if (n->kind == Term::Kind::Con && n->con.kind == K::Zero) return args[1];
        if (n->kind == Term::Kind::App && n->fn->kind == Term::Kind::Con &&
            n->fn->con.kind == K::Succ) {
            TermPtr m = n->arg;
            TermPtr rec_m = app(con(K::Rec, c.args), {m, args[1], args[2]});
            return app(args[2], {m, rec_m});
        }
        return std::nullopt;
    }
    case K::Cond: {
        if (args.size() != 3) return std::nullopt;
        if (args[0]->kind == Term::Kind::Con && args[0]->con.kind == K::Bool0) return args[1];
        if (args[0]->kind == Term::Kind::Con && args[0]->con.kind == K::Bool1) return args[2];
        return std::nullopt;
    }
    case K::BigUnion: {
        if (args.size() != 2) return std::nullopt;
        auto [sh, sargs] = spine(args[0]);
        if (sh->kind != Term::Kind::Con) return std::nullopt;
        if (sh->con.kind == K::Singleton && sargs.size() == 1) return app(args[1], sargs[0]);
        if (sh->con.kind == K::Union && sargs.size() == 2) {
            TermPtr l = app(con(K::BigUnion, c.args), {sargs[0], args[1]});
            TermPtr r = app(con(K::BigUnion, c.args), {sargs[1], args[1]});
            return app(con(K::Union, {c.args[1]}), {l, r});
        }
        return std::nullopt;
    }
    case K::Union: {
        if (args.size() != 2) return std::nullopt;
        if (is_canonical_set(t)) return std::nullopt;
        auto l = as_set(args[0]);
        auto r = as_set(args[1]);
        if (!l || !r) return std::nullopt;
        for (const auto& e : l->elems)
            if (!term_is_normal(e)) return std::nullopt;
        for (const auto& e : r->elems)
            if (!term_is_normal(e)) return std::nullopt;
        std::vector<TermPtr> all = l->elems;
        all.insert(all.end(), r->elems.begin(), r->elems.end());
        return set_term(c.args[0], std::move(all));
    }
    case K::MaxSet: {
        if (args.size() != 1) return std::nullopt;
        if (!is_canonical_set(args[0])) return std::nullopt;
        auto vs = as_set(args[0]);
        std::uint64_t best = 0;
        for (const auto& e : vs->elems) {
            auto n = as_numeral(e);
            if (!n) return std::nullopt;
            best = std::max(best, *n);
        }
        return numeral(best);
    }
    case K::MaxPair: {
        const TyPtr& s = c.args[0];
        if (s->kind == Ty::Kind::Ground) {
            if (args.size() != 2) return std::nullopt;
            auto a = as_numeral(args[0]);
            auto b = as_numeral(args[1]);
            if (!a || !b) return std::nullopt;
            return numeral(std::max(*a, *b));
        }
        if (s->kind == Ty::Kind::Func) {
            if (args.size() != 3) return std::nullopt;
            return app(con(K::MaxPair, {s->cod}), {app(args[0], args[2]), app(args[1], args[2])});
        }
        return std::nullopt;
    }
    default:
        return std::nullopt;
    }
}

std::optional<TermPtr> step_normal_order(const TermPtr& t) {
    if (auto r = reduce_root(t)) return r;
    switch (t->kind) {
    case Term::Kind::App: {
        if (auto f = step_normal_order(t->fn)) return app(*f, t->arg);
        if (auto a = step_normal_order(t->arg)) return app(t->fn, *a);
        return std::nullopt;
    }
    case Term::Kind::Lam: {
        if (auto b = step_normal_order(t->body)) return lam(t->name, t->ty, *b);
        return std::nullopt;
    }
    default:
        return std::nullopt;
    }
}

std::optional<TermPtr> step_applicative(const TermPtr& t) {
    switch (t->kind) {
    case Term::Kind::App: {
        if (auto f = step_applicative(t->fn)) return app(*f, t->arg);
        if (auto a = step_applicative(t->arg)) return app(t->fn, *a);
        break;
    }
    case Term::Kind::Lam: {
        if (auto b = step_applicative(t->body)) return lam(t->name, t->ty, *b);
        break;
    }
    default:
        break;
    }
    return reduce_root(t);
}

using Path = std::vector<int>; // 0 = fn, 1 = arg, 2 = body

void collect_redexes(const TermPtr& t, Path& cur, std::vector<Path>& out) {
    if (reduce_root(t)) out.push_back(cur);
    switch (t->kind) {
    case Term::Kind::App:
        cur.push_back(0);
        collect_redexes(t->fn, cur, out);
        cur.back() = 1;
        collect_redexes(t->arg, cur, out);
        cur.pop_back();
        return;
    case Term::Kind::Lam:
        cur.push_back(2);
        collect_redexes(t->body, cur, out);
        cur.pop_back();
        return;
    default:
        return;
    }
}

TermPtr apply_at(const TermPtr& t, const Path& path, size_t i) {
    if (i == path.size()) {
        auto r = reduce_root(t);
        if (!r) throw term_error("apply_at: stale redex path");
        return *r;
    }
    switch (path[i]) {
    case 0:
        return app(apply_at(t->fn, path, i + 1), t->arg);
    case 1:
        return app(t->fn, apply_at(t->arg, path, i + 1));
    case 2:
        return lam(t->name, t->ty, apply_at(t->body, path, i + 1));
    }
    throw term_error("apply_at: bad path");
}

} // namespace

TermPtr normalize(const TermPtr& t, std::size_t step_budget) {
    TermPtr cur = t;
    for (std::size_t steps = 0;; ++steps) {
        auto next = step_normal_order(cur);
        if (!next) return cur;
        if (steps >= step_budget)
            throw budget_error("normalize: step budget of " + std::to_string(step_budget) + " exceeded");
        cur = *next;
    }
}

TermPtr normalize_applicative(const TermPtr& t, std::size_t step_budget) {
    TermPtr cur = t;
    for (std::size_t steps = 0;; ++steps) {
        auto next = step_applicative(cur);
        if (!next) return cur;
        if (steps >= step_budget)
            throw budget_error("normalize: step budget of " + std::to_string(step_budget) + " exceeded");
        cur = *next;
    }
}

TermPtr normalize_seeded(const TermPtr& t, std::uint64_t seed, std::size_t step_budget) {
    std::mt19937_64 rng(seed);
    TermPtr cur = t;
    for (std::size_t steps = 0;; ++steps) {
        std::vector<Path> redexes;
        Path p;
        collect_redexes(cur, p, redexes);
        if (redexes.empty()) return cur;
        if (steps >= step_budget)
            throw budget_error("normalize: step budget of " + std::to_string(step_budget) + " exceeded");
        const Path& pick = redexes[rng() % redexes.size()];
        cur = apply_at(cur, pick, 0);
    }
}

bool is_normal(const TermPtr& t) { return term_is_normal(t); }

// ---------------------------------------------------------------------------
// Bracket abstraction.
// ---------------------------------------------------------------------------

TermPtr bracket_abstract(const std::string& x, const TyPtr& xty, const TermPtr& t) {
    if (t->kind == Term::Kind::Lam)
        return bracket_abstract(x, xty, combinatorize(t));
    if (t->kind == Term::Kind::Var && t->name == x) {
        if (!equal(t->ty, xty))
            throw term_error("bracket_abstract: variable '" + x + "' typed " + show(t->ty) +
                             ", expected " + show(xty));
        // identity at xty: Sigma Pi Pi
        TyPtr xx = func(xty, xty);
        return app(con(ConstKind::Sigma, {xty, xx, xty}),
                   {con(ConstKind::Pi, {xty, xx}), con(ConstKind::Pi, {xty, xty})});
    }
    VarCtx ctx;
    ctx[x] = xty;
    if (!free_in(x, t)) {
        TyPtr tau = typecheck(t, ctx);
        return app(con(ConstKind::Pi, {tau, xty}), t);
    }
    // t is an application containing x
    if (t->kind != Term::Kind::App) throw term_error("bracket_abstract: unexpected shape");
    if (t->arg->kind == Term::Kind::Var && t->arg->name == x && !free_in(x, t->fn))
        return t->fn; // eta
    TyPtr fty = typecheck(t->fn, ctx);
    if (fty->kind != Ty::Kind::Func) throw term_error("bracket_abstract: ill-typed application");
    return app(con(ConstKind::Sigma, {xty, fty->dom, fty->cod}),
               {bracket_abstract(x, xty, t->fn), bracket_abstract(x, xty, t->arg)});
}

TermPtr combinatorize(const TermPtr& t) {
    switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::Con:
        return t;
    case Term::Kind::App:
        return app(combinatorize(t->fn), combinatorize(t->arg));
    case Term::Kind::Lam:
        return bracket_abstract(t->name, t->ty, combinatorize(t->body));
    }
    throw term_error("combinatorize: bad kind");
}

// ---------------------------------------------------------------------------
// Defaults, maxima, derived arithmetic.
// ---------------------------------------------------------------------------

TermPtr default_term(const TyPtr& ty, const TypeRegistry& reg) {
    switch (ty->kind) {
    case Ty::Kind::Ground: {
        const GroundDecl& d = reg.lookup(ty->name);
        if (d.default_const == "zero") return con(ConstKind::Zero);
        if (d.default_const == "bool0") return con(ConstKind::Bool0);
        if (d.default_const == "bool1") return con(ConstKind::Bool1);
        return con(ConstKind::Default, {ty});
    }
    case Ty::Kind::Func:
        return lam("x", ty->dom, default_term(ty->cod, reg));
    case Ty::Kind::Star:
        return app(con(ConstKind::Singleton, {ty->elem}), default_term(ty->elem, reg));
    }
    throw term_error("default_term: bad kind");
}

TermPtr max_term(const TyPtr& ty) {
    if (!is_arithmetical(ty))
        throw term_error("max_term: type must be arithmetical, got " + show(ty));
    return con(ConstKind::MaxPair, {ty});
}

TermPtr maxset_term(const TyPtr& ty) {
    if (!is_arithmetical(ty))
        throw term_error("maxset_term: type must be arithmetical, got " + show(ty));
    if (ty->kind == Ty::Kind::Ground) return con(ConstKind::MaxSet);
    // m_{rho->tau}(F) = \x. m_tau (bigcup F (\f. {f x}))
    TermPtr F = var("F", star(ty));
    TermPtr x = var("x", ty->dom);
    TermPtr f = var("f", ty);
    TermPtr collect = lam("f", ty, app(con(ConstKind::Singleton, {ty->cod}), app(f, x)));
    TermPtr body = app(maxset_term(ty->cod), app(con(ConstKind::BigUnion, {ty, ty->cod}), {F, collect}));
    return lam("F", star(ty), lam("x", ty->dom, body));
}

TermPtr pred_term() {
    TermPtr n = var("n", nat());
    TermPtr step = lam({{"k", nat()}, {"r", nat()}}, var("k", nat()));
    return lam("n", nat(), app(con(ConstKind::Rec, {nat()}), {n, numeral(0), step}));
}

TermPtr monus_term() {
    TermPtr step = lam({{"k", nat()}, {"r", nat()}}, app(pred_term(), var("r", nat())));
    TermPtr body = app(con(ConstKind::Rec, {nat()}), {var("m", nat()), var("n", nat()), step});
    return lam({{"n", nat()}, {"m", nat()}}, body);
}

TermPtr add_term() {
    TermPtr step = lam({{"k", nat()}, {"r", nat()}}, app(con(ConstKind::Succ), var("r", nat())));
    TermPtr body = app(con(ConstKind::Rec, {nat()}), {var("m", nat()), var("n", nat()), step});
    return lam({{"n", nat()}, {"m", nat()}}, body);
}

TermPtr iszero_term() {
    TermPtr step = lam({{"k", nat()}, {"r", boolean()}}, con(ConstKind::Bool1));
    return lam("n", nat(),
               app(con(ConstKind::Rec, {boolean()}), {var("n", nat()), con(ConstKind::Bool0), step}));
}

TermPtr leqb_term() {
    TermPtr body = app(iszero_term(), app(monus_term(), {var("n", nat()), var("m", nat())}));
    return lam({{"n", nat()}, {"m", nat()}}, body);
}

TermPtr interval_term() {
    TyPtr ns = star(nat());
    TermPtr step = lam({{"k", nat()}, {"s", ns}},
                       app(con(ConstKind::Union, {nat()}),
                           {var("s", ns),
                            app(con(ConstKind::Singleton, {nat()}), app(con(ConstKind::Succ), var("k", nat())))}));
    TermPtr body = app(con(ConstKind::Rec, {ns}),
                       {var("n", nat()), app(con(ConstKind::Singleton, {nat()}), numeral(0)), step});
    return lam("n", nat(), body);
}

// ---------------------------------------------------------------------------
// Surface syntax.
// ---------------------------------------------------------------------------

namespace {

using sexpr::NodePtr;

NodePtr to_sexpr_impl(const TermPtr& t, std::set<std::string>& bound) {
    if (auto n = as_numeral(t))
        return sexpr::list({sexpr::atom("num"), sexpr::atom(std::to_string(*n))});
    switch (t->kind) {
    case Term::Kind::Var:
        if (bound.count(t->name)) return sexpr::atom(t->name);
        return sexpr::list({sexpr::atom("var"), sexpr::atom(t->name), ty_to_sexpr(t->ty)});
    case Term::Kind::Con: {
        const Const& c = t->con;
        auto plain = [&](const char* name) {
            std::vector<NodePtr> items{sexpr::atom(name)};
            for (const auto& a : c.args) items.push_back(ty_to_sexpr(a));
            return items;
        };
        switch (c.kind) {
        case ConstKind::Pi: return sexpr::list(plain("pi"));
        case ConstKind::Sigma: return sexpr::list(plain("sigma"));
        case ConstKind::Zero: return sexpr::list(plain("zero"));
        case ConstKind::Succ: return sexpr::list(plain("succ"));
        case ConstKind::Bool0: return sexpr::list({sexpr::atom("bool"), sexpr::atom("0")});
        case ConstKind::Bool1: return sexpr::list({sexpr::atom("bool"), sexpr::atom("1")});
        case ConstKind::Rec: return sexpr::list(plain("rec"));
        case ConstKind::Cond: return sexpr::list(plain("cond"));
        case ConstKind::Default: return sexpr::list(plain("default"));
        case ConstKind::Singleton: return sexpr::list(plain("sing"));
        case ConstKind::Union: return sexpr::list(plain("cup"));
        case ConstKind::BigUnion: return sexpr::list(plain("bigcup"));
        case ConstKind::MaxSet: return sexpr::list(plain("maxset"));
        case ConstKind::MaxPair: return sexpr::list(plain("max"));
        }
        throw term_error("to_sexpr: bad constant");
    }
    case Term::Kind::App: {
        if (is_canonical_set(t)) {
            auto vs = as_set(t);
            std::vector<NodePtr> items{sexpr::atom("set"), ty_to_sexpr(vs->elem_ty)};
            for (const auto& e : vs->elems) items.push_back(to_sexpr_impl(e, bound));
            return sexpr::list(std::move(items));
        }
        auto [head, args] = spine(t);
        if (head->kind == Term::Kind::Con) {
            NodePtr h = to_sexpr_impl(head, bound);
            std::vector<NodePtr> items = h->items;
            for (const auto& a : args) items.push_back(to_sexpr_impl(a, bound));
            return sexpr::list(std::move(items));
        }
        std::vector<NodePtr> items{sexpr::atom("app"), to_sexpr_impl(head, bound)};
        for (const auto& a : args) items.push_back(to_sexpr_impl(a, bound));
        return sexpr::list(std::move(items));
    }
    case Term::Kind::Lam: {
        bool fresh = bound.insert(t->name).second;
        NodePtr b = to_sexpr_impl(t->body, bound);
        if (fresh) bound.erase(t->name);
        return sexpr::list({sexpr::atom("lam"), sexpr::atom(t->name), ty_to_sexpr(t->ty), b});
    }
    }
    throw term_error("to_sexpr: bad kind");
}

struct HeadInfo {
    ConstKind kind;
    size_t tyargs;
};

const std::map<std::string, HeadInfo>& const_heads() {
    static const std::map<std::string, HeadInfo> m = {
        {"pi", {ConstKind::Pi, 2}},         {"sigma", {ConstKind::Sigma, 3}},
        {"zero", {ConstKind::Zero, 0}},     {"succ", {ConstKind::Succ, 0}},
        {"rec", {ConstKind::Rec, 1}},       {"cond", {ConstKind::Cond, 1}},
        {"default", {ConstKind::Default, 1}}, {"sing", {ConstKind::Singleton, 1}},
        {"cup", {ConstKind::Union, 1}},     {"bigcup", {ConstKind::BigUnion, 2}},
        {"maxset", {ConstKind::MaxSet, 0}}, {"max", {ConstKind::MaxPair, 1}},
    };
    return m;
}

TermPtr from_sexpr_impl(const NodePtr& n, VarCtx& env) {
    if (n->is_atom) {
        auto it = env.find(n->atom);
        if (it == env.end())
            throw term_error("unbound variable '" + n->atom + "' (use (var " + n->atom + " TY) for free variables)");
        return var(n->atom, it->second);
    }
    const auto& items = n->items;
    if (items.empty()) throw term_error("term syntax: empty list");
    const std::string h = sexpr::head(n);
    if (h == "num") {
        if (items.size() != 2) throw term_error("term syntax: (num k)");
        const std::string& d = sexpr::atom_of(items[1], "num");
        for (char c : d)
            if (c < '0' || c > '9') throw term_error("term syntax: bad numeral '" + d + "'");
        return numeral(std::stoull(d));
    }
    if (h == "bool") {
        if (items.size() != 2) throw term_error("term syntax: (bool 0|1)");
        const std::string& d = sexpr::atom_of(items[1], "bool");
        if (d == "0") return con(ConstKind::Bool0);
        if (d == "1") return con(ConstKind::Bool1);
        throw term_error("term syntax: bad boolean literal '" + d + "'");
    }
    if (h == "var") {
        if (items.size() != 3) throw term_error("term syntax: (var x TY)");
        return var(sexpr::atom_of(items[1], "var"), ty_from_sexpr(items[2]));
    }
    if (h == "lam") {
        if (items.size() != 4) throw term_error("term syntax: (lam x TY body)");
        std::string x = sexpr::atom_of(items[1], "lam");
        TyPtr ty = ty_from_sexpr(items[2]);
        auto old = env.find(x);
        std::optional<TyPtr> saved;
        if (old != env.end()) saved = old->second;
        env[x] = ty;
        TermPtr body = from_sexpr_impl(items[3], env);
        if (saved) env[x] = *saved; else env.erase(x);
        return lam(x, ty, body);
    }
    if (h == "app") {
        if (items.size() < 3) throw term_error("term syntax: (app f a ...)");
        TermPtr t = from_sexpr_impl(items[1], env);
        for (size_t i = 2; i < items.size(); ++i) t = app(t, from_sexpr_impl(items[i], env));
        return t;
    }
    if (h == "set") {
        if (items.size() < 3) throw term_error("term syntax: (set TY e ...)");
        TyPtr elem = ty_from_sexpr(items[1]);
        TermPtr out = app(con(ConstKind::Singleton, {elem}), from_sexpr_impl(items.back(), env));
        for (size_t i = items.size() - 1; i-- > 2;)
            out = app(con(ConstKind::Union, {elem}),
                      {app(con(ConstKind::Singleton, {elem}), from_sexpr_impl(items[i], env)), out});
        return out;
    }
    auto hit = const_heads().find(h);
    if (hit == const_heads().end()) throw term_error("term syntax: unknown head '" + h + "'");
    const HeadInfo& info = hit->second;
    if (items.size() < 1 + info.tyargs)
        throw term_error("term syntax: '" + h + "' needs " + std::to_string(info.tyargs) + " type parameter(s)");
    std::vector<TyPtr> tyargs;
    for (size_t i = 0; i < info.tyargs; ++i) tyargs.push_back(ty_from_sexpr(items[1 + i]));
    TermPtr t = con(info.kind, std::move(tyargs));
    for (size_t i = 1 + info.tyargs; i < items.size(); ++i) t = app(t, from_sexpr_impl(items[i], env));
    return t;
}

} // namespace

sexpr::NodePtr term_to_sexpr(const TermPtr& t) {
    std::set<std::string> bound;
    return to_sexpr_impl(t, bound);
}

TermPtr term_from_sexpr(const sexpr::NodePtr& n, const VarCtx& env) {
    VarCtx e = env;
    return from_sexpr_impl(n, e);
}

std::string show(const TermPtr& t) { return sexpr::show(term_to_sexpr(t)); }

TermPtr parse_term(const std::string& text, const VarCtx& env) {
    return term_from_sexpr(sexpr::parse(text), env);
}

namespace {

// Precedences for the mathematical rendering: lambda and big-union bodies
// extend right (0), binary union 5, application 10, atoms 20.
std::string pretty_impl(const TermPtr& t, int ctx_prec);

std::string pretty_wrap(const std::string& s, int prec, int ctx_prec) {
    if (prec < ctx_prec) return "(" + s + ")";
    return s;
}

std::string pretty_const(const Const& c) {
    switch (c.kind) {
        case ConstKind::Pi: return "Pi";
        case ConstKind::Sigma: return "Sigma";
        case ConstKind::Zero: return "0";
        case ConstKind::Succ: return "S";
        case ConstKind::Bool0: return "0b";
        case ConstKind::Bool1: return "1b";
        case ConstKind::Rec: return "rec";
        case ConstKind::Cond: return "cond";
        case ConstKind::Default: return "e_" + show(c.args.at(0));
        case ConstKind::Singleton: return "sing";
        case ConstKind::Union: return "cup";
        case ConstKind::BigUnion: return "bigcup";
        case ConstKind::MaxSet: return "m";
        case ConstKind::MaxPair: return "max";
    }
    throw term_error("pretty_const: bad kind");
}

std::string pretty_impl(const TermPtr& t, int ctx_prec) {
    if (auto k = as_numeral(t)) return std::to_string(*k);
    if (auto vs = as_set(t)) {
        std::string s = "{";
        for (std::size_t i = 0; i < vs->elems.size(); ++i) {
            if (i) s += ", ";
            s += pretty_impl(vs->elems[i], 0);
        }
        return s + "}";
    }
    switch (t->kind) {
        case Term::Kind::Var: return t->name;
        case Term::Kind::Con: return pretty_const(t->con);
        case Term::Kind::Lam: {
            std::string s = "\\" + t->name + ". " + pretty_impl(t->body, 0);
            return pretty_wrap(s, 0, ctx_prec);
        }
        case Term::Kind::App: {
            auto [head, args] = spine(t);
            if (head->kind == Term::Kind::Con) {
                if (head->con.kind == ConstKind::Singleton && args.size() == 1)
                    return "{" + pretty_impl(args[0], 0) + "}";
                if (head->con.kind == ConstKind::Union && args.size() == 2) {
                    std::string s = pretty_impl(args[0], 5) + " U " + pretty_impl(args[1], 6);
                    return pretty_wrap(s, 5, ctx_prec);
                }
                if (head->con.kind == ConstKind::BigUnion && args.size() == 2 &&
                    args[1]->kind == Term::Kind::Lam) {
                    std::string s = "U{" + args[1]->name + " in " + pretty_impl(args[0], 0) +
                                    "} " + pretty_impl(args[1]->body, 0);
                    return pretty_wrap(s, 0, ctx_prec);
                }
            }
            std::string s = pretty_impl(t->fn, 10) + " " + pretty_impl(t->arg, 11);
            return pretty_wrap(s, 10, ctx_prec);
        }
    }
    throw term_error("show_pretty: bad term");
}

} // namespace

std::string show_pretty(const TermPtr& t) { return pretty_impl(t, 0); }

} // namespace wit
