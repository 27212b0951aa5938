#include "wit/interp.hpp"

#include <cctype>
#include <set>
#include <utility>

namespace wit {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw interp_error(msg); }

// Internal signal: some atom with positive witnesses has no joining maps.
struct MissingJoin {
    std::string rel;
};

std::string hole_name(const char* stem, std::size_t i) {
    return std::string("%") + stem + std::to_string(i);
}

bool is_binder(FKind k) {
    switch (k) {
        case FKind::Forall:
        case FKind::Exists:
        case FKind::BForall:
        case FKind::BExists:
        case FKind::SetForall:
        case FKind::NumForall:
        case FKind::NumExists:
            return true;
        default:
            return false;
    }
}

void term_names(const TermPtr& t, std::set<std::string>& out) {
    switch (t->kind) {
        case Term::Kind::Var: out.insert(t->name); return;
        case Term::Kind::Con: return;
        case Term::Kind::App:
            term_names(t->fn, out);
            term_names(t->arg, out);
            return;
        case Term::Kind::Lam:
            out.insert(t->name);
            term_names(t->body, out);
            return;
    }
}

void formula_names(const FormulaPtr& f, std::set<std::string>& out) {
    if (is_binder(f->kind)) out.insert(f->name);
    for (const auto& t : f->terms) term_names(t, out);
    for (const auto& k : f->kids) formula_names(k, out);
}

} // namespace

// ---------------------------------------------------------------------------
// Holes and information relations.
// ---------------------------------------------------------------------------
TermPtr arg_hole(std::size_t i, TyPtr ty) { return var("%" + std::to_string(i), std::move(ty)); }
TermPtr wit_hole(std::size_t i, TyPtr ty) { return var(hole_name("a", i), std::move(ty)); }
TermPtr cwit_hole(std::size_t i, TyPtr ty) { return var(hole_name("b", i), std::move(ty)); }

namespace {

// Parses "%<digits>" / "%a<digits>" / "%b<digits>"; returns the group
// ('0' for argument, 'a', 'b') and the index, or 0 when not a hole name.
char parse_hole(const std::string& name, std::size_t& index) {
    if (name.size() < 2 || name[0] != '%') return 0;
    char group = '0';
    std::size_t pos = 1;
    if (name[1] == 'a' || name[1] == 'b') {
        group = name[1];
        pos = 2;
    }
    if (pos >= name.size() || name.size() - pos > 9) return 0;
    std::size_t v = 0;
    for (std::size_t k = pos; k < name.size(); ++k) {
        if (!std::isdigit(static_cast<unsigned char>(name[k]))) return 0;
        v = v * 10 + static_cast<std::size_t>(name[k] - '0');
    }
    index = v;
    return group;
}

} // namespace

void check_info_relation(const InfoRelation& r) {
    if (!r.schema) fail("information relation without a schema");
    for (const auto& [name, ty] : free_vars(r.schema)) {
        std::size_t i = 0;
        char group = parse_hole(name, i);
        const TyTuple* tuple = group == '0'   ? &r.args
                               : group == 'a' ? &r.tplus
                               : group == 'b' ? &r.tminus
                                              : nullptr;
        if (!tuple)
            fail("schema mentions '" + name + "', which is not a hole variable");
        if (i >= tuple->size())
            fail("schema hole '" + name + "' is out of range");
        if (!equal(ty, (*tuple)[i]))
            fail("schema hole '" + name + "' has type " + show(ty) + ", declared " +
                 show((*tuple)[i]));
    }
    if (!r.joins.empty()) {
        if (r.joins.size() != r.tplus.size())
            fail("joining maps must cover every positive component (got " +
                 std::to_string(r.joins.size()) + " for " + std::to_string(r.tplus.size()) + ")");
        for (std::size_t i = 0; i < r.joins.size(); ++i) {
            if (!is_closed(r.joins[i])) fail("joining maps must be closed terms");
            TyPtr want = func(r.tplus[i], func(r.tplus[i], r.tplus[i]));
            TyPtr got;
            try {
                got = typecheck(r.joins[i]);
            } catch (const term_error& e) {
                fail(std::string("joining map does not typecheck: ") + e.what());
            }
            if (!equal(got, want))
                fail("joining map " + std::to_string(i) + " has type " + show(got) +
                     ", expected " + show(want));
        }
    }
}

FormulaPtr instantiate(const InfoRelation& r, const std::vector<TermPtr>& args,
                       const std::vector<TermPtr>& wits, const std::vector<TermPtr>& cwits) {
    auto arity = [&](const char* what, std::size_t got, std::size_t want) {
        if (got != want)
            fail(std::string(what) + " tuple has " + std::to_string(got) + " entries, expected " +
                 std::to_string(want));
    };
    arity("argument", args.size(), r.args.size());
    arity("witness", wits.size(), r.tplus.size());
    arity("counter-witness", cwits.size(), r.tminus.size());
    auto typed = [&](const TermPtr& t, const TyPtr& want, const char* what) {
        TyPtr got;
        try {
            got = typecheck(t);
        } catch (const term_error& e) {
            fail(std::string(what) + " does not typecheck: " + e.what());
        }
        if (!equal(got, want))
            fail(std::string(what) + " has type " + show(got) + ", expected " + show(want));
    };
    // A replacement may only mention hole names that are substituted before it
    // (arguments of lower index); anything else would be captured.
    for (std::size_t i = 0; i < args.size(); ++i) {
        typed(args[i], r.args[i], "relation argument");
        for (const auto& v : free_vars(args[i])) {
            std::size_t k = 0;
            char group = parse_hole(v, k);
            if (group == 'a' || group == 'b' || (group == '0' && k > i))
                fail("relation argument mentions the pending hole '" + v + "'");
        }
    }
    auto no_holes = [&](const std::vector<TermPtr>& ts, const char* what) {
        for (const auto& t : ts)
            for (const auto& v : free_vars(t))
                if (!v.empty() && v[0] == '%')
                    fail(std::string(what) + " mentions the reserved name '" + v + "'");
    };
    no_holes(wits, "witness term");
    no_holes(cwits, "counter-witness term");
    for (std::size_t i = 0; i < wits.size(); ++i) typed(wits[i], r.tplus[i], "witness term");
    for (std::size_t i = 0; i < cwits.size(); ++i)
        typed(cwits[i], r.tminus[i], "counter-witness term");

    FormulaPtr out = r.schema;
    for (std::size_t i = 0; i < wits.size(); ++i)
        out = subst(out, hole_name("a", i), wits[i]);
    for (std::size_t i = 0; i < cwits.size(); ++i)
        out = subst(out, hole_name("b", i), cwits[i]);
    for (std::size_t i = 0; i < args.size(); ++i)
        out = subst(out, "%" + std::to_string(i), args[i]);
    return out;
}

InfoRelation precise_itype(TyPtr sigma) {
    InfoRelation r;
    r.args = {sigma};
    r.tplus = {sigma};
    r.schema = term_eq(arg_hole(0, sigma), wit_hole(0, sigma));
    return r;
}

InfoRelation uniform_itype(TyPtr sigma) {
    InfoRelation r;
    r.args = {std::move(sigma)};
    r.schema = top();
    return r;
}

InfoRelation bounding_itype_nat() {
    InfoRelation r;
    r.args = {nat()};
    r.tplus = {nat()};
    r.schema = nat_leq(arg_hole(0, nat()), wit_hole(0, nat()));
    r.joins = {max_term(nat())};
    return r;
}

InfoRelation majorant_itype(TyPtr sigma) {
    std::optional<TyPtr> d;
    try {
        d = dagger(sigma);
    } catch (const type_error& e) {
        fail(std::string("majorant membership: ") + e.what());
    }
    if (!d) fail("majorant membership needs an unbounded type, got " + show(sigma));
    InfoRelation r;
    r.args = {sigma};
    r.tplus = {*d};
    r.schema = bezem_leq(arg_hole(0, sigma), wit_hole(0, *d));
    r.joins = {max_term(*d)};
    return r;
}

InfoRelation finite_set_itype(TyPtr sigma) {
    InfoRelation r;
    r.args = {sigma};
    r.tplus = {star(sigma)};
    r.schema = set_mem(arg_hole(0, sigma), wit_hole(0, star(sigma)));
    r.joins = {con(ConstKind::Union, {sigma})};
    return r;
}

// ---------------------------------------------------------------------------
// Base interpretations.
// ---------------------------------------------------------------------------
const InfoRelation& BaseInterpretation::relation(const std::string& name) const {
    auto it = relations.find(name);
    if (it == relations.end())
        fail("base interpretation '" + tag + "' does not interpret relation '" + name + "'");
    return it->second;
}

InfoRelation BaseInterpretation::itype_rel(const TyPtr& ty) const {
    if (!itype_fn) fail("base interpretation '" + tag + "' does not interpret membership");
    return itype_fn(*this, ty);
}

namespace {
std::vector<TermPtr> join_terms_impl(const FormulaPtr& f, const BaseInterpretation& base,
                                     const InterpOptions& opts);
}

BaseInterpretation canonical_extend(BaseInterpretation ground_base) {
    auto ground = ground_base.itype_fn;
    if (!ground) fail("canonical extension needs a ground-type membership interpretation");
    ground_base.itype_fn = [ground](const BaseInterpretation& self,
                                    const TyPtr& ty) -> InfoRelation {
        if (ty->kind != Ty::Kind::Func) return ground(self, ty);
        TermPtr h = arg_hole(0, ty);
        TermPtr x = var("x", ty->dom);
        FormulaPtr unfold = forall("x", ty->dom, imp(itype(x), itype(app(h, x))));
        InterpretedFormula u = uinterp(unfold, self, {});
        InfoRelation r;
        r.args = {ty};
        FormulaPtr schema = display_normalize(u.body);
        for (std::size_t i = 0; i < u.a_vars.size(); ++i) {
            r.tplus.push_back(u.a_vars[i].ty);
            schema = subst(schema, u.a_vars[i].name, wit_hole(i, u.a_vars[i].ty));
        }
        for (std::size_t i = 0; i < u.b_vars.size(); ++i) {
            r.tminus.push_back(u.b_vars[i].ty);
            schema = subst(schema, u.b_vars[i].name, cwit_hole(i, u.b_vars[i].ty));
        }
        r.schema = schema;
        try {
            r.joins = join_terms_impl(unfold, self, {});
        } catch (const MissingJoin&) {
            r.joins.clear();
        }
        check_info_relation(r);
        return r;
    };
    return ground_base;
}

BaseInterpretation preset(const std::string& tag) {
    BaseInterpretation b;
    b.tag = tag;
    if (tag == "pp") {
        b.itype_fn = [](const BaseInterpretation&, const TyPtr& ty) {
            return precise_itype(ty);
        };
        return b;
    }
    if (tag == "cp") {
        b.itype_fn = [](const BaseInterpretation&, const TyPtr& ty) -> InfoRelation {
            if (equal(ty, nat()) || equal(ty, boolean())) return precise_itype(ty);
            fail("preset cp interprets membership at the ground types N and B only; got " +
                 show(ty));
        };
        return canonical_extend(std::move(b));
    }
    if (tag == "mb") {
        b.itype_fn = [](const BaseInterpretation&, const TyPtr& ty) -> InfoRelation {
            if (equal(ty, nat())) return bounding_itype_nat();
            bool bounded = false;
            try {
                bounded = is_bounded(ty);
            } catch (const type_error& e) {
                fail(std::string("preset mb: ") + e.what());
            }
            if (bounded) return uniform_itype(ty);
            return majorant_itype(ty);
        };
        return b;
    }
    if (tag == "f") {
        b.itype_fn = [](const BaseInterpretation&, const TyPtr& ty) -> InfoRelation {
            if (equal(ty, boolean())) return uniform_itype(ty);
            return finite_set_itype(ty);
        };
        return b;
    }
    if (tag == "cb") {
        b.itype_fn = [](const BaseInterpretation&, const TyPtr& ty) -> InfoRelation {
            if (equal(ty, nat())) return bounding_itype_nat();
            if (equal(ty, boolean())) return uniform_itype(ty);
            fail("preset cb interprets membership at the ground types N and B only; got " +
                 show(ty));
        };
        return canonical_extend(std::move(b));
    }
    fail("unknown base interpretation '" + tag + "' (expected pp, cp, mb, f or cb)");
}

// ---------------------------------------------------------------------------
// Base files.
// ---------------------------------------------------------------------------
BaseInterpretation base_from_sexpr(const sexpr::NodePtr& n, const Theory& th) {
    if (sexpr::head(n) != "base") fail("expected (base TAG ENTRY*), got " + sexpr::show(n));
    const auto& items = sexpr::items_of(n, "base");
    if (items.size() < 2) fail("(base ...) needs a preset tag");
    BaseInterpretation b = preset(sexpr::atom_of(items[1], "base tag"));
    for (std::size_t e = 2; e < items.size(); ++e) {
        const auto& entry = items[e];
        if (sexpr::head(entry) != "rel")
            fail("base entry must be (rel NAME ...), got " + sexpr::show(entry));
        const auto& parts = sexpr::items_of(entry, "rel entry");
        if (parts.size() < 5 || parts.size() > 6)
            fail("(rel ...) expects a name, tplus, tminus, a schema and optional joins");
        std::string name = sexpr::atom_of(parts[1], "relation name");
        InfoRelation r;
        r.args = th.relation(name).arg_tys;
        auto tuple_of = [&](const sexpr::NodePtr& node, const char* what) {
            if (sexpr::head(node) != what)
                fail(std::string("expected (") + what + " TY*), got " + sexpr::show(node));
            TyTuple out;
            const auto& tys = sexpr::items_of(node, what);
            for (std::size_t i = 1; i < tys.size(); ++i) out.push_back(ty_from_sexpr(tys[i]));
            return out;
        };
        r.tplus = tuple_of(parts[2], "tplus");
        r.tminus = tuple_of(parts[3], "tminus");
        if (sexpr::head(parts[4]) != "schema")
            fail("expected (schema F), got " + sexpr::show(parts[4]));
        const auto& sc = sexpr::items_of(parts[4], "schema");
        if (sc.size() != 2) fail("(schema ...) expects exactly one formula");
        VarCtx env;
        for (std::size_t i = 0; i < r.args.size(); ++i) env["%" + std::to_string(i)] = r.args[i];
        for (std::size_t i = 0; i < r.tplus.size(); ++i) env[hole_name("a", i)] = r.tplus[i];
        for (std::size_t i = 0; i < r.tminus.size(); ++i) env[hole_name("b", i)] = r.tminus[i];
        r.schema = formula_from_sexpr(sc[1], env);
        std::map<std::string, TyPtr> frees;
        try {
            typecheck_formula(th, r.schema, frees, /*allow_target=*/true);
        } catch (const logic_error& err) {
            fail("schema for '" + name + "': " + err.what());
        }
        if (parts.size() == 6) {
            if (sexpr::head(parts[5]) != "joins")
                fail("expected (joins T*), got " + sexpr::show(parts[5]));
            const auto& js = sexpr::items_of(parts[5], "joins");
            for (std::size_t i = 1; i < js.size(); ++i)
                r.joins.push_back(term_from_sexpr(js[i]));
        }
        check_info_relation(r);
        b.relations[name] = std::move(r);
    }
    return b;
}

BaseInterpretation parse_base(const std::string& text, const Theory& th) {
    return base_from_sexpr(sexpr::parse(text), th);
}

// ---------------------------------------------------------------------------
// Interpreted formulas.
// ---------------------------------------------------------------------------
std::string show(const InterpretedFormula& f) {
    std::string out;
    for (const auto& v : f.a_vars) out += "pos " + v.name + " : " + show(v.ty) + "\n";
    for (const auto& v : f.b_vars) out += "neg " + v.name + " : " + show(v.ty) + "\n";
    out += "body " + show(f.body);
    return out;
}

CollapseEligibility exists_collapse_eligibility(const BaseInterpretation& base,
                                                const TyPtr& sigma) {
    InfoRelation r = base.itype_rel(sigma);
    if (r.tplus.empty() && r.tminus.empty()) return CollapseEligibility::Uniform;
    if (r.tplus.size() == 1 && r.tminus.empty() && equal(r.tplus[0], sigma) &&
        equal(r.schema, term_eq(arg_hole(0, sigma), wit_hole(0, sigma))))
        return CollapseEligibility::Precise;
    return CollapseEligibility::No;
}

namespace {

// Types whose existential clause skips the finite-set quantification.
std::vector<TyPtr> unstar_types(const BaseInterpretation& base, const InterpOptions& opts) {
    std::vector<TyPtr> out;
    for (const auto& ty : opts.simple_exists) {
        switch (exists_collapse_eligibility(base, ty)) {
            case CollapseEligibility::Precise: out.push_back(ty); break;
            case CollapseEligibility::Uniform: break; // witness-free guard: identity
            case CollapseEligibility::No:
                if (!opts.unchecked)
                    fail("the direct existential clause at " + show(ty) +
                         " is not valid for base '" + base.tag + "'");
                out.push_back(ty);
                break;
        }
    }
    if (opts.simplified_disjunction) {
        if (exists_collapse_eligibility(base, boolean()) != CollapseEligibility::Uniform)
            fail("the simplified disjunction clause needs the witness-free Boolean membership");
        out.push_back(boolean());
    }
    return out;
}

bool unstarred(const std::vector<TyPtr>& unstar, const TyPtr& ty) {
    for (const auto& u : unstar)
        if (equal(u, ty)) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Witness signatures (kept independent of the interpretation proper so the
// two can be checked against each other).
// ---------------------------------------------------------------------------
using Sig = std::pair<TyTuple, TyTuple>;

Sig sig_of(const FormulaPtr& f, const BaseInterpretation& base,
           const std::vector<TyPtr>& unstar) {
    switch (f->kind) {
        case FKind::Bot:
        case FKind::TermEq:
        case FKind::NatLeq:
        case FKind::IntMaj:
            return {};
        case FKind::Atom: {
            const InfoRelation& r = base.relation(f->name);
            return {r.tplus, r.tminus};
        }
        case FKind::ITypePred: {
            InfoRelation r = base.itype_rel(typecheck(f->terms[0]));
            return {r.tplus, r.tminus};
        }
        case FKind::And: {
            Sig a = sig_of(f->kids[0], base, unstar);
            Sig b = sig_of(f->kids[1], base, unstar);
            a.first.insert(a.first.end(), b.first.begin(), b.first.end());
            a.second.insert(a.second.end(), b.second.begin(), b.second.end());
            return a;
        }
        case FKind::Imp: {
            Sig a = sig_of(f->kids[0], base, unstar);
            Sig b = sig_of(f->kids[1], base, unstar);
            Sig out;
            for (const auto& t : b.first) out.first.push_back(func(a.first, t));
            TyTuple gdom = a.first;
            gdom.insert(gdom.end(), b.second.begin(), b.second.end());
            for (const auto& t : a.second) out.first.push_back(func(gdom, star(t)));
            out.second = a.first;
            out.second.insert(out.second.end(), b.second.begin(), b.second.end());
            return out;
        }
        case FKind::Forall:
            return sig_of(f->kids[0], base, unstar);
        case FKind::Exists: {
            Sig a = sig_of(f->kids[0], base, unstar);
            if (unstarred(unstar, f->ty)) return a;
            for (auto& t : a.second) t = star(t);
            return a;
        }
        case FKind::BForall:
            return sig_of(forall(f->name, f->ty, imp(f->kids[0], f->kids[1])), base, unstar);
        case FKind::BExists:
            return sig_of(exists(f->name, f->ty, conj(f->kids[0], f->kids[1])), base, unstar);
        default:
            fail("cannot interpret target construct " + show(f));
    }
}

// ---------------------------------------------------------------------------
// The interpretation.  Witness names are chosen deterministically: the first
// subformula draws on stems a/b, its sibling on c/d and so on; implications
// introduce f/g functionals; membership guards use u/v; starred counters take
// the capitalized stem.  A name generator keeps everything distinct from the
// input's variables and from each other.
// ---------------------------------------------------------------------------
struct NameGen {
    std::set<std::string> taboo;

    std::string fresh(const std::string& stem) {
        if (taboo.insert(stem).second) return stem;
        for (std::size_t k = 0;; ++k) {
            std::string name = stem + std::to_string(k);
            if (taboo.insert(name).second) return name;
        }
    }
};

struct Hint {
    std::string pos = "a";
    std::string neg = "b";
};

Hint next(const Hint& h) {
    Hint out = h;
    if (out.pos.size() == 1 && out.pos[0] >= 'a' && out.pos[0] <= 'x') out.pos[0] += 2;
    if (out.neg.size() == 1 && out.neg[0] >= 'a' && out.neg[0] <= 'x') out.neg[0] += 2;
    return out;
}

std::string upperize(const std::string& name) {
    if (!name.empty() && std::islower(static_cast<unsigned char>(name[0]))) {
        std::string out = name;
        out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
        return out;
    }
    return "U" + name;
}

struct UCtx {
    const BaseInterpretation& base;
    std::vector<TyPtr> unstar;
    NameGen ng;
};

std::vector<TermPtr> var_terms(const std::vector<WitnessVar>& vs) {
    std::vector<TermPtr> out;
    out.reserve(vs.size());
    for (const auto& v : vs) out.push_back(var(v.name, v.ty));
    return out;
}

std::vector<TyPtr> var_types(const std::vector<WitnessVar>& vs) {
    std::vector<TyPtr> out;
    out.reserve(vs.size());
    for (const auto& v : vs) out.push_back(v.ty);
    return out;
}

InterpretedFormula interp_rel(const InfoRelation& r, const std::vector<TermPtr>& args,
                              const Hint& h, UCtx& cx) {
    InterpretedFormula out;
    std::vector<TermPtr> ws, cs;
    for (const auto& ty : r.tplus) {
        std::string name = cx.ng.fresh(h.pos);
        out.a_vars.push_back({name, ty});
        ws.push_back(var(name, ty));
    }
    for (const auto& ty : r.tminus) {
        std::string name = cx.ng.fresh(h.neg);
        out.b_vars.push_back({name, ty});
        cs.push_back(var(name, ty));
    }
    out.body = instantiate(r, args, ws, cs);
    return out;
}

InterpretedFormula go(const FormulaPtr& f, const Hint& h, UCtx& cx) {
    switch (f->kind) {
        case FKind::Bot:
        case FKind::TermEq:
        case FKind::NatLeq:
            return {f, {}, {}};
        case FKind::IntMaj:
            // The majorizability relation is witness-free: it goes to the
            // target's hereditary majorant relation.
            return {bezem_leq(f->terms[0], f->terms[1]), {}, {}};
        case FKind::Atom:
            return interp_rel(cx.base.relation(f->name), f->terms, h, cx);
        case FKind::ITypePred:
            return interp_rel(cx.base.itype_rel(typecheck(f->terms[0])), f->terms,
                              Hint{"u", "v"}, cx);
        case FKind::And: {
            InterpretedFormula ia = go(f->kids[0], h, cx);
            InterpretedFormula ib = go(f->kids[1], next(h), cx);
            InterpretedFormula out;
            out.body = conj(ia.body, ib.body);
            out.a_vars = std::move(ia.a_vars);
            out.a_vars.insert(out.a_vars.end(), ib.a_vars.begin(), ib.a_vars.end());
            out.b_vars = std::move(ia.b_vars);
            out.b_vars.insert(out.b_vars.end(), ib.b_vars.begin(), ib.b_vars.end());
            return out;
        }
        case FKind::Imp: {
            InterpretedFormula ia = go(f->kids[0], h, cx);
            if (ia.a_vars.empty() && ia.b_vars.empty()) {
                // Witness-free premise: the functionals would be nullary and
                // the set quantification empty, so the clause degenerates.
                InterpretedFormula ib = go(f->kids[1], h, cx);
                ib.body = imp(ia.body, ib.body);
                return ib;
            }
            InterpretedFormula ib = go(f->kids[1], next(h), cx);
            std::vector<TyPtr> ats = var_types(ia.a_vars);
            std::vector<TermPtr> aterms = var_terms(ia.a_vars);
            std::vector<TermPtr> dterms = var_terms(ib.b_vars);
            std::vector<TyPtr> gdom = ats;
            for (const auto& v : ib.b_vars) gdom.push_back(v.ty);

            InterpretedFormula out;
            FormulaPtr concl = ib.body;
            for (const auto& bi : ib.a_vars) {
                std::string fn = cx.ng.fresh("f");
                TyPtr fty = func(ats, bi.ty);
                out.a_vars.push_back({fn, fty});
                concl = subst(concl, bi.name, app(var(fn, fty), aterms));
            }
            std::vector<WitnessVar> gs;
            for (const auto& aj : ia.b_vars) {
                std::string gn = cx.ng.fresh("g");
                gs.push_back({gn, func(gdom, star(aj.ty))});
            }
            FormulaPtr prem = ia.body;
            std::vector<TermPtr> gargs = aterms;
            gargs.insert(gargs.end(), dterms.begin(), dterms.end());
            for (std::size_t j = ia.b_vars.size(); j-- > 0;)
                prem = set_forall(ia.b_vars[j].name,
                                  app(var(gs[j].name, gs[j].ty), gargs), prem);
            out.a_vars.insert(out.a_vars.end(), gs.begin(), gs.end());
            out.b_vars = std::move(ia.a_vars);
            out.b_vars.insert(out.b_vars.end(), ib.b_vars.begin(), ib.b_vars.end());
            out.body = imp(prem, concl);
            return out;
        }
        case FKind::Forall: {
            InterpretedFormula ia = go(f->kids[0], h, cx);
            ia.body = forall(f->name, f->ty, ia.body);
            return ia;
        }
        case FKind::Exists: {
            InterpretedFormula ia = go(f->kids[0], h, cx);
            if (unstarred(cx.unstar, f->ty)) {
                ia.body = exists(f->name, f->ty, ia.body);
                return ia;
            }
            std::vector<WitnessVar> sets;
            for (const auto& bj : ia.b_vars)
                sets.push_back({cx.ng.fresh(upperize(bj.name)), star(bj.ty)});
            FormulaPtr body = ia.body;
            for (std::size_t j = ia.b_vars.size(); j-- > 0;)
                body = set_forall(ia.b_vars[j].name, var(sets[j].name, sets[j].ty), body);
            ia.body = exists(f->name, f->ty, body);
            ia.b_vars = std::move(sets);
            return ia;
        }
        case FKind::BForall:
            return go(forall(f->name, f->ty, imp(f->kids[0], f->kids[1])), h, cx);
        case FKind::BExists:
            return go(exists(f->name, f->ty, conj(f->kids[0], f->kids[1])), h, cx);
        default:
            fail("cannot interpret target construct " + show(f));
    }
}

} // namespace

std::pair<TyTuple, TyTuple> witness_sig(const FormulaPtr& f, const BaseInterpretation& base,
                                        const InterpOptions& opts) {
    return sig_of(f, base, unstar_types(base, opts));
}

InterpretedFormula uinterp(const FormulaPtr& f, const BaseInterpretation& base,
                           const InterpOptions& opts) {
    UCtx cx{base, unstar_types(base, opts), {}};
    formula_names(f, cx.ng.taboo);
    return go(f, {}, cx);
}

InterpretedFormula iinterp(const FormulaPtr& f, const BaseInterpretation& base,
                           const InterpOptions& opts) {
    return uinterp(relativize(f), base, opts);
}

// ---------------------------------------------------------------------------
// Display normalization.
// ---------------------------------------------------------------------------
namespace {

FormulaPtr with_kids(const FormulaPtr& f, std::vector<FormulaPtr> ks) {
    switch (f->kind) {
        case FKind::And: return conj(std::move(ks[0]), std::move(ks[1]));
        case FKind::Imp: return imp(std::move(ks[0]), std::move(ks[1]));
        case FKind::Or: return disj(std::move(ks[0]), std::move(ks[1]));
        case FKind::Forall: return forall(f->name, f->ty, std::move(ks[0]));
        case FKind::Exists: return exists(f->name, f->ty, std::move(ks[0]));
        case FKind::BForall: return bforall(f->name, f->ty, std::move(ks[0]), std::move(ks[1]));
        case FKind::BExists: return bexists(f->name, f->ty, std::move(ks[0]), std::move(ks[1]));
        case FKind::SetForall: return set_forall(f->name, f->terms[0], std::move(ks[0]));
        case FKind::NumForall: return num_forall(f->name, f->terms[0], std::move(ks[0]));
        case FKind::NumExists: return num_exists(f->name, f->terms[0], std::move(ks[0]));
        default: return f;
    }
}

bool is_var_named(const TermPtr& t, const std::string& x) {
    return t->kind == Term::Kind::Var && t->name == x;
}

bool is_bool_lit(const TermPtr& t, ConstKind k) {
    return t->kind == Term::Kind::Con && t->con.kind == k;
}

// One rewrite at the root, or nullptr.
FormulaPtr display_step(const FormulaPtr& f) {
    if (f->kind == FKind::SetForall) {
        const FormulaPtr& body = f->kids[0];
        if (!free_in(f->name, body)) return body; // finite sets are non-empty
        if (body->kind == FKind::And) {
            if (!free_in(f->name, body->kids[0]))
                return conj(body->kids[0], set_forall(f->name, f->terms[0], body->kids[1]));
            if (!free_in(f->name, body->kids[1]))
                return conj(set_forall(f->name, f->terms[0], body->kids[0]), body->kids[1]);
        }
        if (body->kind == FKind::Imp && !free_in(f->name, body->kids[0]))
            return imp(body->kids[0], set_forall(f->name, f->terms[0], body->kids[1]));
        return nullptr;
    }
    if (f->kind == FKind::And) {
        if (f->kids[0]->kind == FKind::Top) return f->kids[1];
        if (f->kids[1]->kind == FKind::Top) return f->kids[0];
        return nullptr;
    }
    if (f->kind == FKind::Imp) {
        if (f->kids[0]->kind == FKind::Top) return f->kids[1];
        return nullptr;
    }
    if (f->kind == FKind::Forall && f->kids[0]->kind == FKind::Imp) {
        const FormulaPtr& guard = f->kids[0]->kids[0];
        const FormulaPtr& body = f->kids[0]->kids[1];
        if (guard->kind == FKind::TermEq) {
            if (is_var_named(guard->terms[0], f->name) && !free_in(f->name, guard->terms[1]))
                return subst(body, f->name, guard->terms[1]);
            if (is_var_named(guard->terms[1], f->name) && !free_in(f->name, guard->terms[0]))
                return subst(body, f->name, guard->terms[0]);
        }
        if (guard->kind == FKind::NatLeq && is_var_named(guard->terms[0], f->name) &&
            !free_in(f->name, guard->terms[1]))
            return num_forall(f->name, guard->terms[1], body);
        return nullptr;
    }
    if (f->kind == FKind::Exists && f->kids[0]->kind == FKind::And) {
        const FormulaPtr& guard = f->kids[0]->kids[0];
        const FormulaPtr& body = f->kids[0]->kids[1];
        if (guard->kind == FKind::TermEq) {
            if (is_var_named(guard->terms[0], f->name) && !free_in(f->name, guard->terms[1]))
                return subst(body, f->name, guard->terms[1]);
            if (is_var_named(guard->terms[1], f->name) && !free_in(f->name, guard->terms[0]))
                return subst(body, f->name, guard->terms[0]);
        }
        if (guard->kind == FKind::NatLeq && is_var_named(guard->terms[0], f->name) &&
            !free_in(f->name, guard->terms[1]))
            return num_exists(f->name, guard->terms[1], body);
        // exists i^B ((i == 0 -> P) /\ (i == 1 -> Q))  becomes  P \/ Q
        if (equal(f->ty, boolean()) && guard->kind == FKind::Imp && body->kind == FKind::Imp &&
            guard->kids[0]->kind == FKind::TermEq && body->kids[0]->kind == FKind::TermEq &&
            is_var_named(guard->kids[0]->terms[0], f->name) &&
            is_bool_lit(guard->kids[0]->terms[1], ConstKind::Bool0) &&
            is_var_named(body->kids[0]->terms[0], f->name) &&
            is_bool_lit(body->kids[0]->terms[1], ConstKind::Bool1) &&
            !free_in(f->name, guard->kids[1]) && !free_in(f->name, body->kids[1]))
            return disj(guard->kids[1], body->kids[1]);
        return nullptr;
    }
    return nullptr;
}

FormulaPtr display_rec(const FormulaPtr& f, std::size_t& fuel) {
    if (fuel-- == 0) fail("display normalization did not terminate");
    std::vector<FormulaPtr> ks;
    ks.reserve(f->kids.size());
    bool changed = false;
    for (const auto& k : f->kids) {
        ks.push_back(display_rec(k, fuel));
        changed = changed || ks.back() != k;
    }
    FormulaPtr g = changed ? with_kids(f, std::move(ks)) : f;
    if (FormulaPtr r = display_step(g)) return display_rec(r, fuel);
    return g;
}

} // namespace

FormulaPtr display_normalize(const FormulaPtr& f) {
    std::size_t fuel = 100000;
    return display_rec(f, fuel);
}

// ---------------------------------------------------------------------------
// Joining of bounds.
// ---------------------------------------------------------------------------
namespace {

std::vector<TermPtr> rel_joins(const InfoRelation& r, const std::string& what) {
    if (r.tplus.empty()) return {};
    if (!r.has_joins()) throw MissingJoin{what};
    return r.joins;
}

std::vector<TermPtr> join_terms_impl(const FormulaPtr& f, const BaseInterpretation& base,
                                     const InterpOptions& opts) {
    switch (f->kind) {
        case FKind::Bot:
        case FKind::TermEq:
        case FKind::NatLeq:
        case FKind::IntMaj:
            return {};
        case FKind::Atom:
            return rel_joins(base.relation(f->name), f->name);
        case FKind::ITypePred: {
            TyPtr ty = typecheck(f->terms[0]);
            return rel_joins(base.itype_rel(ty), "I at " + show(ty));
        }
        case FKind::And: {
            std::vector<TermPtr> a = join_terms_impl(f->kids[0], base, opts);
            std::vector<TermPtr> b = join_terms_impl(f->kids[1], base, opts);
            a.insert(a.end(), b.begin(), b.end());
            return a;
        }
        case FKind::Imp: {
            auto sa = witness_sig(f->kids[0], base, opts);
            auto sb = witness_sig(f->kids[1], base, opts);
            std::vector<TermPtr> jb = join_terms_impl(f->kids[1], base, opts);
            std::vector<TermPtr> out;
            // Pointwise join on the witness functionals ...
            std::vector<std::pair<std::string, TyPtr>> params;
            std::vector<TermPtr> aargs;
            for (std::size_t i = 0; i < sa.first.size(); ++i) {
                std::string an = "a" + std::to_string(i);
                params.emplace_back(an, sa.first[i]);
                aargs.push_back(var(an, sa.first[i]));
            }
            for (std::size_t i = 0; i < sb.first.size(); ++i) {
                TyPtr compo = func(sa.first, sb.first[i]);
                TermPtr p = var("p", compo), q = var("q", compo);
                TermPtr body = app(jb[i], {app(p, aargs), app(q, aargs)});
                std::vector<std::pair<std::string, TyPtr>> ps{{"p", compo}, {"q", compo}};
                ps.insert(ps.end(), params.begin(), params.end());
                out.push_back(lam(ps, body));
            }
            // ... and set union on the counter-witness collectors.
            std::vector<std::pair<std::string, TyPtr>> gparams = params;
            std::vector<TermPtr> gargs = aargs;
            TyTuple gdom = sa.first;
            for (std::size_t i = 0; i < sb.second.size(); ++i) {
                std::string dn = "d" + std::to_string(i);
                gparams.emplace_back(dn, sb.second[i]);
                gargs.push_back(var(dn, sb.second[i]));
                gdom.push_back(sb.second[i]);
            }
            for (std::size_t j = 0; j < sa.second.size(); ++j) {
                TyPtr compo = func(gdom, star(sa.second[j]));
                TermPtr p = var("p", compo), q = var("q", compo);
                TermPtr body = app(con(ConstKind::Union, {sa.second[j]}),
                                   {app(p, gargs), app(q, gargs)});
                std::vector<std::pair<std::string, TyPtr>> ps{{"p", compo}, {"q", compo}};
                ps.insert(ps.end(), gparams.begin(), gparams.end());
                out.push_back(lam(ps, body));
            }
            return out;
        }
        case FKind::Forall:
        case FKind::Exists:
            return join_terms_impl(f->kids[0], base, opts);
        case FKind::BForall:
            return join_terms_impl(forall(f->name, f->ty, imp(f->kids[0], f->kids[1])), base,
                                   opts);
        case FKind::BExists:
            return join_terms_impl(exists(f->name, f->ty, conj(f->kids[0], f->kids[1])), base,
                                   opts);
        default:
            fail("cannot join over target construct " + show(f));
    }
}

} // namespace

std::vector<TermPtr> join_terms(const FormulaPtr& f, const BaseInterpretation& base,
                                const InterpOptions& opts) {
    try {
        return join_terms_impl(f, base, opts);
    } catch (const MissingJoin& m) {
        fail("relation '" + m.rel + "' has no joining maps");
    }
}

std::vector<TermPtr> join(const FormulaPtr& f, const BaseInterpretation& base,
                          const std::vector<TermPtr>& as, const std::vector<TermPtr>& bs,
                          const InterpOptions& opts) {
    std::vector<TermPtr> js = join_terms(f, base, opts);
    if (as.size() != js.size() || bs.size() != js.size())
        fail("join: expected two witness tuples with " + std::to_string(js.size()) +
             " components");
    std::vector<TermPtr> out;
    out.reserve(js.size());
    for (std::size_t i = 0; i < js.size(); ++i) out.push_back(app(js[i], {as[i], bs[i]}));
    return out;
}

} // namespace wit
