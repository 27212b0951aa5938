#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>

#include "wit/interp.hpp"
#include "wit/modelcheck.hpp"

using namespace wit;

namespace {

TyPtr N() { return nat(); }
TyPtr B() { return boolean(); }
TyPtr NN() { return func(nat(), nat()); }

TermPtr tp(const std::string& s) { return parse_term(s); }
DerivPtr dparse(const std::string& s) { return derivation_from_sexpr(sexpr::parse(s)); }

ValuePtr vnat(std::uint64_t n) { return nat_value(n); }
ValuePtr vset(std::initializer_list<std::uint64_t> ns) {
    std::vector<ValuePtr> vs;
    for (auto n : ns) vs.push_back(nat_value(n));
    return set_value(nat(), std::move(vs));
}
ValuePtr vfun(const std::string& s) { return fun_value(parse_term(s)); }
// qualified: a bare two-argument apply(...) would also find std::apply via ADL
ValuePtr vapply(const ValuePtr& f, const ValuePtr& x) { return wit::apply(f, x); }

// Independent iterative oracle for the primitive recursor.
std::uint64_t rec_oracle(std::uint64_t n, std::uint64_t z,
                         const std::function<std::uint64_t(std::uint64_t, std::uint64_t)>& s) {
    std::uint64_t acc = z;
    for (std::uint64_t i = 0; i < n; ++i) acc = s(i, acc);
    return acc;
}

// Independent majorizability oracle at N*: every member of x has a bound in
// a (self-majorization on the right is automatic at ground type).
bool star_leq_oracle(const std::vector<std::uint64_t>& x, const std::vector<std::uint64_t>& a) {
    for (auto m : x) {
        bool ok = false;
        for (auto b : a) ok = ok || m <= b;
        if (!ok) return false;
    }
    return true;
}

} // namespace

// ---------------------------------------------------------------------------
// Values.
// ---------------------------------------------------------------------------
TEST_CASE("value construction and canonical form") {
    CHECK(type_of(vnat(3))->kind == Ty::Kind::Ground);
    CHECK(show(vnat(3)) == "3");
    CHECK(show(bool_value(false)) == "0b");
    CHECK(show(bool_value(true)) == "1b");

    ValuePtr s = vset({2, 7, 3});
    REQUIRE(s->elems.size() == 3);
    CHECK(s->elems[0]->nat == 2);
    CHECK(s->elems[1]->nat == 3);
    CHECK(s->elems[2]->nat == 7);
    CHECK(equal(s, vset({7, 3, 2, 3})));
    CHECK_THROWS_AS(set_value(N(), {}), modelcheck_error);
    CHECK_THROWS_AS(set_value(B(), {vnat(1)}), modelcheck_error);

    // fun_value normalizes its defining term
    ValuePtr f = vfun("(lam n N (app (lam m N m) n))");
    CHECK(equal(f->def, tp("(lam n N n)")));
    CHECK_THROWS_AS(fun_value(tp("(num 3)")), modelcheck_error);
    CHECK_THROWS_AS(fun_value(var("g", NN())), modelcheck_error);

    CHECK(compare(vnat(2), vnat(5)) < 0);
    CHECK(equal(eval(to_term(s)), s));
}

// ---------------------------------------------------------------------------
// Evaluation.
// ---------------------------------------------------------------------------
TEST_CASE("evaluation of ground programs") {
    CHECK(eval(tp("(app (maxset) (set N (num 2) (num 7) (num 3)))"))->nat == 7);
    CHECK(eval(tp("(app (rec N) (num 3) (num 0) (lam n N (lam r N (succ r))))"))->nat == 3);
    // Cond branches: boolean 0 selects the first branch
    CHECK(eval(tp("(app (cond N) (bool 1) (num 4) (num 9))"))->nat == 9);
    CHECK(eval(tp("(app (cond N) (bool 0) (num 4) (num 9))"))->nat == 4);

    ValuePtr s = eval(tp("(set N (num 2) (num 7) (num 3))"));
    CHECK(equal(s, vset({2, 3, 7})));

    CHECK_THROWS_AS(eval(var("x", N())), modelcheck_error);
    CHECK(eval(var("x", N()), {{"x", vnat(5)}})->nat == 5);

    CHECK(vapply(vfun("(lam n N (succ n))"), vnat(4))->nat == 5);

    Budgets tiny;
    tiny.step_budget = 1;
    CHECK_THROWS_AS(
        eval(tp("(app (rec N) (num 6) (num 0) (lam n N (lam r N (succ r))))"), {}, tiny),
        budget_error);
}

TEST_CASE("recursor evaluation agrees with an independent iteration oracle") {
    struct Step {
        TermPtr term;
        std::function<std::uint64_t(std::uint64_t, std::uint64_t)> fn;
    };
    std::vector<Step> steps = {
        {tp("(lam n N (lam r N (succ r)))"),
         [](std::uint64_t, std::uint64_t r) { return r + 1; }},
        {tp("(lam n N (lam r N n))"), [](std::uint64_t i, std::uint64_t) { return i; }},
        {lam("n", N(), lam("r", N(), app(add_term(), {var("n", N()), var("r", N())}))),
         [](std::uint64_t i, std::uint64_t r) { return i + r; }},
        {lam("n", N(),
             lam("r", N(), app(max_term(N()), {app(pred_term(), var("n", N())), var("r", N())}))),
         [](std::uint64_t i, std::uint64_t r) { return std::max(i == 0 ? 0 : i - 1, r); }},
    };
    for (const auto& st : steps)
        for (std::uint64_t n = 0; n <= 5; ++n)
            for (std::uint64_t z : {std::uint64_t{0}, std::uint64_t{2}}) {
                TermPtr t = app(con(ConstKind::Rec, {N()}), {numeral(n), numeral(z), st.term});
                CHECK(eval(t)->nat == rec_oracle(n, z, st.fn));
            }
}

// ---------------------------------------------------------------------------
// Universes.
// ---------------------------------------------------------------------------
TEST_CASE("generated universes") {
    Universe u;
    const auto& nats = u.values(N());
    REQUIRE(nats.size() == 8);
    CHECK(nats.front()->nat == 0);
    CHECK(nats.back()->nat == 7);
    CHECK_FALSE(u.exhaustive(N()));

    CHECK(u.values(B()).size() == 2);
    CHECK(u.exhaustive(B()));

    const auto& bsets = u.values(star(B()));
    CHECK(bsets.size() == 3); // {0b}, {1b}, {0b,1b}
    CHECK(u.exhaustive(star(B())));

    const auto& nsets = u.values(star(N()));
    CHECK(nsets.size() == 8 + 28 + 56);
    CHECK(equal(nsets.front(), vset({0})));
    CHECK_FALSE(u.exhaustive(star(N())));

    CHECK(u.values(func(B(), B())).size() == 4);
    CHECK(u.exhaustive(func(B(), B())));
    CHECK(u.values(func(N(), B())).size() == 256); // 2^8 tabulations
    CHECK_FALSE(u.exhaustive(func(N(), B())));
    CHECK(u.values(func(B(), N())).size() == 64);

    CHECK_THROWS_WITH_AS(u.values(ground("X")), doctest::Contains("no universe configured"),
                         modelcheck_error);
}

TEST_CASE("function universe grammar covers identity, successor and constants") {
    Universe u;
    const auto& fns = u.values(NN());
    CHECK(fns.size() <= u.budgets.max_type_universe);
    auto has_table = [&](const std::function<std::uint64_t(std::uint64_t)>& g) {
        for (const auto& f : fns) {
            bool all = true;
            for (std::uint64_t k = 0; k <= 7 && all; ++k)
                all = vapply(f, vnat(k))->nat == g(k);
            if (all) return true;
        }
        return false;
    };
    CHECK(has_table([](std::uint64_t k) { return k; }));     // identity
    CHECK(has_table([](std::uint64_t k) { return k + 1; })); // successor
    CHECK(has_table([](std::uint64_t) { return std::uint64_t{5}; }));
    CHECK(has_table([](std::uint64_t k) { return std::max(k, std::uint64_t{3}); }));
    CHECK(has_table([](std::uint64_t k) { return k + 2; })); // a composition

    // pairwise distinct on probes
    std::set<std::string> sigs;
    for (const auto& f : fns) {
        std::string sig;
        for (std::uint64_t k = 0; k <= 7; ++k) sig += std::to_string(vapply(f, vnat(k))->nat) + ",";
        CHECK(sigs.insert(sig).second);
    }
}

TEST_CASE("universe configuration") {
    Universe u = parse_universe("(universe (max-nat 3) (max-set 2) (seed 9) (steps 50000))");
    CHECK(u.budgets.max_nat == 3);
    CHECK(u.budgets.max_set_size == 2);
    CHECK(u.budgets.seed == 9);
    CHECK(u.budgets.step_budget == 50000);
    CHECK(u.values(N()).size() == 4);
    CHECK(u.values(star(N())).size() == 4 + 6);

    Universe v = parse_universe("(universe (type N exhaustive (values (num 0) (num 1))))");
    CHECK(v.values(N()).size() == 2);
    CHECK(v.exhaustive(N()));
    // an exhaustive range can refute an existential; a generated one cannot
    FormulaPtr f = exists("x", N(), term_eq(var("x", N()), numeral(5)));
    CHECK(check(f, v).fails());
    Universe w;
    CHECK(check(exists("x", N(), term_eq(var("x", N()), numeral(12))), w).outcome ==
          Outcome::Exhausted);

    CHECK_THROWS_WITH_AS(parse_universe("(universe (frob 3))"),
                         doctest::Contains("unknown universe key"), modelcheck_error);
    CHECK_THROWS_AS(parse_universe("(universe (max-nat x))"), modelcheck_error);
    CHECK_THROWS_AS(parse_universe("(universe (type N (values)))"), modelcheck_error);
}

// ---------------------------------------------------------------------------
// Formula checking.
// ---------------------------------------------------------------------------
TEST_CASE("checking ground formulas") {
    Universe u;
    CHECK(check(bot(), u).fails());
    CHECK(check(top(), u).holds());
    CHECK(check(top(), u).exact);

    CHECK(check(term_eq(numeral(3), numeral(3)), u).exact);
    CHECK(check(term_eq(numeral(3), numeral(4)), u).fails());
    CHECK(check(nat_leq(numeral(3), numeral(5)), u).exact);
    CHECK(check(nat_leq(numeral(5), numeral(3)), u).fails());

    CHECK(check(nat_leq(var("x", N()), numeral(3)), u, {{"x", vnat(2)}}).holds());

    // connectives
    CHECK(check(conj(top(), nat_leq(numeral(1), numeral(2))), u).exact);
    CHECK(check(conj(top(), bot()), u).fails());
    CHECK(check(imp(bot(), bot()), u).exact);
    CHECK(check(imp(top(), bot()), u).fails());
    CHECK(check(disj(term_eq(numeral(0), numeral(1)), term_eq(numeral(1), numeral(1))), u).exact);
    CHECK(check(disj(bot(), bot()), u).fails());
}

TEST_CASE("checking quantifiers over universes") {
    Universe u;
    TermPtr x = var("x", N());

    // bounded quantifiers are exact
    CHECK(check(num_forall("x", numeral(3), nat_leq(x, numeral(3))), u).exact);
    CHECK(check(num_exists("x", numeral(3), term_eq(x, numeral(5))), u).fails());

    // unbounded quantifiers are universe-relative
    CheckResult r = check(forall("x", N(), nat_leq(x, numeral(7))), u);
    CHECK(r.holds());
    CHECK_FALSE(r.exact);

    r = check(forall("x", N(), nat_leq(x, numeral(3))), u);
    REQUIRE(r.fails());
    REQUIRE(r.counterexample.size() == 1);
    CHECK(r.counterexample[0].var == "x");
    CHECK(r.counterexample[0].val->nat == 4);

    CHECK(check(exists("x", N(), term_eq(x, numeral(5))), u).exact); // witness found
    CHECK(check(exists("x", N(), term_eq(x, numeral(12))), u).outcome == Outcome::Exhausted);

    // an exhaustive range refutes
    TermPtr i = var("i", B());
    CHECK(check(exists("i", B(), term_eq(i, bool_lit(1))), u).exact);
    CHECK(check(exists("i", B(), conj(term_eq(i, bool_lit(0)), term_eq(i, bool_lit(1)))), u)
              .fails());

    // set-bounded quantifiers range exactly over the set
    FormulaPtr sf = set_forall("n", tp("(set N (num 1) (num 2))"),
                               nat_leq(var("n", N()), numeral(2)));
    CHECK(check(sf, u).exact);
    r = check(set_forall("n", tp("(set N (num 1) (num 2))"), nat_leq(var("n", N()), numeral(1))),
              u);
    REQUIRE(r.fails());
    CHECK(r.counterexample[0].var == "n");
    CHECK(r.counterexample[0].val->nat == 2);

    CHECK(check(set_mem(numeral(2), tp("(set N (num 1) (num 2))")), u).exact);
    CHECK(check(set_mem(numeral(3), tp("(set N (num 1) (num 2))")), u).fails());

    // restricted quantifiers desugar
    FormulaPtr bf = bforall("i", B(), term_eq(var("i", B()), bool_lit(0)),
                            term_eq(var("i", B()), bool_lit(0)));
    CHECK(check(bf, u).exact);

    // a universe-verified premise cannot certify a failing conclusion
    CHECK(check(imp(forall("x", N(), nat_leq(x, numeral(12))), bot()), u).outcome ==
          Outcome::Exhausted);

    // uninterpreted material is an error, not a verdict
    CHECK_THROWS_WITH_AS(check(atom("R", {}), u), doctest::Contains("interpret"),
                         modelcheck_error);
    CHECK_THROWS_WITH_AS(check(itype(numeral(0)), u), doctest::Contains("interpret"),
                         modelcheck_error);
}

TEST_CASE("function equality is probe-based") {
    Universe u;
    // same normal form: exact without probing
    CHECK(check(term_eq(tp("(lam n N (succ n))"), tp("(lam n N (succ n))")), u).exact);

    // distinct normal forms, equal on every probe of a non-exhaustive domain
    TermPtr maxnn = lam("n", N(), app(max_term(N()), {var("n", N()), var("n", N())}));
    CheckResult r = check(term_eq(maxnn, tp("(lam n N n)")), u);
    CHECK(r.outcome == Outcome::Exhausted);
    CHECK(r.note.find("probes") != std::string::npos);

    // distinct normal forms over the exhaustive Boolean domain: exact
    TermPtr f = tp("(lam i B (app (cond N) i (num 2) (num 3)))");
    TermPtr g = lam("i", B(),
                    app(max_term(N()),
                        {app(con(ConstKind::Cond, {N()}),
                             {var("i", B()), numeral(2), numeral(3)}),
                         numeral(0)}));
    CHECK(check(term_eq(f, g), u).exact);
    TermPtr h = tp("(lam i B (app (cond N) i (num 2) (num 4)))");
    r = check(term_eq(f, h), u);
    REQUIRE(r.fails());
    CHECK(r.note.find("at argument") != std::string::npos);

    // genuine pointwise difference refutes despite the open-ended domain
    CHECK(check(term_eq(tp("(lam n N n)"), tp("(lam n N (num 0))")), u).fails());

    // membership of a function in a set of functions
    TermPtr idset = app(con(ConstKind::Singleton, {NN()}), tp("(lam n N n)"));
    CHECK(check(set_mem(tp("(lam n N (num 0))"), idset), u).fails());
    CHECK(check(set_mem(maxnn, idset), u).outcome == Outcome::Exhausted);
}

// ---------------------------------------------------------------------------
// Majorizability.
// ---------------------------------------------------------------------------
TEST_CASE("shadow types") {
    CHECK(equal(*shadow_type(N()), N()));
    CHECK_FALSE(shadow_type(B()).has_value());
    CHECK(equal(*shadow_type(star(N())), star(N())));
    CHECK(equal(*shadow_type(func(B(), N())), N()));       // bounded domain drops
    CHECK(equal(*shadow_type(func(N(), N())), func(N(), N())));
    CHECK_FALSE(shadow_type(func(N(), B())).has_value());  // bounded codomain
    CHECK_THROWS_AS(shadow_type(ground("X")), modelcheck_error);
    CHECK_THROWS_AS(shadow_type(star(B())), modelcheck_error);
}

TEST_CASE("majorizability at ground and set types") {
    Universe u;
    CHECK(bezem_leq_check(N(), vnat(3), vnat(5), u).exact);
    CheckResult r = bezem_leq_check(N(), vnat(5), vnat(3), u);
    REQUIRE(r.fails());
    CHECK(r.note == "5 <= 3 is false");

    CHECK(bezem_leq_check(star(N()), vset({2, 5}), vset({5}), u).exact);
    r = bezem_leq_check(star(N()), vset({2, 5}), vset({4}), u);
    REQUIRE(r.fails());
    REQUIRE(r.counterexample.size() == 1);
    CHECK(r.counterexample[0].var == "u");
    CHECK(r.counterexample[0].val->nat == 5);

    // agreement with the independent oracle on random sets
    std::mt19937 rng(7);
    for (int it = 0; it < 200; ++it) {
        auto draw = [&]() {
            std::vector<std::uint64_t> xs;
            std::size_t k = 1 + rng() % 3;
            for (std::size_t i = 0; i < k; ++i) xs.push_back(rng() % 8);
            return xs;
        };
        std::vector<std::uint64_t> xs = draw(), as = draw();
        std::vector<ValuePtr> xv, av;
        for (auto n : xs) xv.push_back(vnat(n));
        for (auto n : as) av.push_back(vnat(n));
        CheckResult rr = bezem_leq_check(star(N()), set_value(N(), xv), set_value(N(), av), u);
        CHECK(rr.outcome != Outcome::Exhausted);
        CHECK(rr.exact); // ground comparisons are never universe-limited
        CHECK(rr.holds() == star_leq_oracle(xs, as));
    }
}

TEST_CASE("majorizability at function types") {
    Universe u;
    // the identity is not majorized by the zero function, first failure at 1
    CheckResult r = bezem_leq_check(NN(), vfun("(lam n N n)"), vfun("(lam n N (num 0))"), u);
    REQUIRE(r.fails());
    REQUIRE(r.counterexample.size() == 2);
    CHECK(r.counterexample[0].var == "x");
    CHECK(r.counterexample[0].val->nat == 1);
    CHECK(r.counterexample[1].var == "a");
    CHECK(r.counterexample[1].val->nat == 1);
    CHECK(show(r) == "fails at [x = 1, a = 1]: 1 <= 0 is false");

    r = bezem_leq_check(NN(), vfun("(lam n N (succ n))"), vfun("(lam n N n)"), u);
    REQUIRE(r.fails());
    CHECK(r.counterexample[0].val->nat == 0);

    r = bezem_leq_check(NN(), vfun("(lam n N n)"), vfun("(lam n N (succ n))"), u);
    CHECK(r.holds());
    CHECK_FALSE(r.exact); // argument ranges are universe-limited

    // bounded domain: the bound is a plain value of the codomain shadow
    ValuePtr fb = vfun("(lam i B (app (cond N) i (num 2) (num 3)))");
    CHECK(bezem_leq_check(func(B(), N()), fb, vnat(5), u).exact);
    r = bezem_leq_check(func(B(), N()), fb, vnat(2), u);
    REQUIRE(r.fails());
    CHECK(r.counterexample[0].var == "x");
    CHECK(r.counterexample[0].val->one == true);

    CHECK_THROWS_WITH_AS(bezem_leq_check(B(), bool_value(true), bool_value(true), u),
                         doctest::Contains("undefined at bounded type"), modelcheck_error);
    CHECK_THROWS_WITH_AS(bezem_leq_check(func(B(), N()), fb, fb, u),
                         doctest::Contains("shadow type"), modelcheck_error);
}

TEST_CASE("monotone values") {
    Universe u;
    CheckResult r = monotone_check(NN(), vfun("(lam n N n)"), u);
    CHECK(r.holds());
    CHECK_FALSE(r.exact);

    // truncated subtraction from 5 is antitone: 5-.0 = 5 > 5-.1 = 4
    TermPtr m5 = lam("n", N(), app(monus_term(), {numeral(5), var("n", N())}));
    r = monotone_check(NN(), fun_value(m5), u);
    REQUIRE(r.fails());
    REQUIRE(r.counterexample.size() == 2);
    CHECK(r.counterexample[0].var == "x");
    CHECK(r.counterexample[0].val->nat == 0);
    CHECK(r.counterexample[1].var == "a");
    CHECK(r.counterexample[1].val->nat == 1);

    CHECK(monotone_check(func(N(), star(N())),
                         fun_value(con(ConstKind::Singleton, {N()})), u)
              .holds());

    CHECK_THROWS_WITH_AS(monotone_check(func(B(), N()), vnat(0), u),
                         doctest::Contains("self-shadowed"), modelcheck_error);
}

TEST_CASE("majorizability laws on universe samples") {
    Budgets tb;
    tb.max_nat = 4;
    Universe u(tb);

    // ground: right self-majorization, transitivity, the max law
    for (std::uint64_t x = 0; x <= 4; ++x)
        for (std::uint64_t a = 0; a <= 4; ++a) {
            if (!(x <= a)) continue;
            CHECK(bezem_leq_check(N(), vnat(a), vnat(a), u).holds());
            for (std::uint64_t y = 0; y <= 4; ++y)
                for (std::uint64_t b = 0; b <= 4; ++b) {
                    if (!(y <= b)) continue;
                    std::uint64_t mab = std::max(a, b);
                    CHECK(bezem_leq_check(N(), vnat(x), vnat(mab), u).holds());
                    CHECK(bezem_leq_check(N(), vnat(std::max(x, y)), vnat(mab), u).holds());
                }
        }
    // the term-level max agrees with the meta-level max
    CHECK(eval(app(max_term(N()), {numeral(2), numeral(6)}))->nat == 6);

    // sets: right self-majorization and transitivity
    const auto& sets = u.values(star(N()));
    for (const auto& x : sets)
        for (const auto& a : sets) {
            if (!bezem_leq_check(star(N()), x, a, u).holds()) continue;
            CHECK(bezem_leq_check(star(N()), a, a, u).holds());
            for (const auto& b : sets) {
                if (!bezem_leq_check(star(N()), a, b, u).holds()) continue;
                CHECK(bezem_leq_check(star(N()), x, b, u).holds());
            }
        }

    // functions: sample the universe
    const auto& fns = u.values(NN());
    std::vector<ValuePtr> fs(fns.begin(), fns.begin() + std::min<std::size_t>(fns.size(), 8));
    auto leqb = [&](const ValuePtr& p, const ValuePtr& q) {
        return bezem_leq_check(NN(), p, q, u).holds();
    };
    auto maxf = [&](const ValuePtr& p, const ValuePtr& q) {
        return eval(app(max_term(NN()), {to_term(p), to_term(q)}));
    };
    for (const auto& x : fs)
        for (const auto& a : fs) {
            if (!leqb(x, a)) continue;
            CHECK(leqb(a, a)); // right self-majorization
            for (const auto& b : fs) {
                if (!leqb(a, b)) continue;
                CHECK(leqb(x, b)); // transitivity
            }
            for (const auto& y : fs)
                for (const auto& b : fs) {
                    if (!leqb(y, b)) continue;
                    ValuePtr mab = maxf(a, b);
                    CHECK(leqb(x, mab));
                    CHECK(leqb(maxf(x, y), mab)); // the max law
                }
        }
}

TEST_CASE("set operations are monotone") {
    Budgets tb;
    tb.max_nat = 1;
    tb.max_set_size = 2;
    Universe u(tb);

    CHECK(monotone_check(func(N(), star(N())), fun_value(con(ConstKind::Singleton, {N()})), u)
              .holds());
    CHECK(monotone_check(func(star(N()), func(star(N()), star(N()))),
                         fun_value(con(ConstKind::Union, {N()})), u)
              .holds());
    CHECK(monotone_check(func(star(N()), func(func(N(), star(N())), star(N()))),
                         fun_value(con(ConstKind::BigUnion, {N(), N()})), u)
              .holds());
    CHECK(monotone_check(func(star(N()), N()), fun_value(con(ConstKind::MaxSet)), u).holds());
}

TEST_CASE("failures persist when the universe grows") {
    Universe small;
    Budgets bb;
    bb.max_nat = 15;
    bb.max_set_size = 4;
    Universe big(bb);

    TermPtr x = var("x", N());
    std::vector<FormulaPtr> pool = {
        forall("x", N(), nat_leq(x, numeral(3))),
        exists("x", N(), term_eq(x, numeral(9))),
        imp(forall("x", N(), nat_leq(x, numeral(12))), bot()),
        conj(top(), forall("x", N(), nat_leq(x, numeral(3)))),
        num_exists("y", numeral(3), term_eq(var("y", N()), numeral(5))),
        set_forall("n", tp("(set N (num 0) (num 1) (num 2))"),
                   nat_leq(var("n", N()), numeral(1))),
        exists("x", N(), term_eq(x, numeral(3))),
        forall("s", star(N()),
               nat_leq(app(con(ConstKind::MaxSet), var("s", star(N()))), numeral(3))),
    };
    for (const auto& f : pool) {
        CheckResult rs = check(f, small);
        if (rs.fails()) CHECK(check(f, big).fails());
    }
    // and the specific transitions are as designed
    CHECK(check(pool[1], small).outcome == Outcome::Exhausted);
    CHECK(check(pool[1], big).holds());
    CHECK(check(pool[2], small).outcome == Outcome::Exhausted);
    CHECK(check(pool[2], big).holds());
    CHECK(check(pool[2], big).exact);
}

// ---------------------------------------------------------------------------
// Extraction verification.
// ---------------------------------------------------------------------------
namespace {

// Test relation Low(x) with one positive witness and no counter-witness:
// Low(x; a;) reads x <= a.
BaseInterpretation low_base() {
    BaseInterpretation b = preset("cp");
    InfoRelation r;
    r.args = {nat()};
    r.tplus = {nat()};
    r.tminus = {};
    r.schema = nat_leq(arg_hole(0, nat()), wit_hole(0, nat()));
    check_info_relation(r);
    b.relations["Low"] = r;
    return b;
}

Theory low_theory() {
    Theory th = arith_theory();
    th.declare_relation({"Low", {nat()}});
    return th;
}

} // namespace

TEST_CASE("verifying the identity extraction") {
    Theory th = low_theory();
    BaseInterpretation base = low_base();
    InterpOptions opts;

    FormulaPtr A = atom("Low", {var("x", N())});
    InterpretedFormula fi = uinterp(A, base, opts);
    REQUIRE(fi.a_vars.size() == 1);
    REQUIRE(fi.b_vars.empty());

    DerivPtr d = dparse("(id (rel Low (var x N)))");

    Extraction ex;
    ex.mode = ExtractMode::Plain;
    ex.base_tag = "cp";
    ex.s = {{}};
    ex.t = {lam("p", N(), var("p", N()))};

    Universe u;
    VerifyReport rep = verify_extraction(th, d, base, ex, u);
    CHECK(rep.all_holds());
    CHECK(rep.instances == 64); // witness grid x free-variable grid
    CHECK(rep.fails == 0);
    CHECK(rep.exhausted == 0);
    CHECK_FALSE(rep.sampled);
    CHECK(machine_summary(rep).find("result=holds\n") == 0);
    CHECK(show(rep).find("sequent:") != std::string::npos);

    // shape errors are diagnosed before any checking
    Extraction bad = ex;
    bad.t = {};
    CHECK_THROWS_WITH_AS(verify_extraction(th, d, base, bad, u),
                         doctest::Contains("witnesses"), modelcheck_error);
    bad = ex;
    bad.t = {lam("p", N(), var("q", N()))};
    CHECK_THROWS_WITH_AS(verify_extraction(th, d, base, bad, u), doctest::Contains("closed"),
                         modelcheck_error);
    bad = ex;
    bad.t = {lam("p", B(), var("p", B()))};
    CHECK_THROWS_WITH_AS(verify_extraction(th, d, base, bad, u),
                         doctest::Contains("expected"), modelcheck_error);
    bad = ex;
    bad.q = {{}};
    CHECK_THROWS_WITH_AS(verify_extraction(th, d, base, bad, u),
                         doctest::Contains("membership"), modelcheck_error);

    // sampling kicks in on demand and is seed-deterministic
    Budgets sb;
    sb.max_instances = 10;
    Universe su(sb);
    VerifyReport srep = verify_extraction(th, d, base, ex, su);
    CHECK(srep.sampled);
    CHECK(srep.instances == 10);
    CHECK(srep.all_holds());
    VerifyReport srep2 = verify_extraction(th, d, base, ex, su);
    CHECK(machine_summary(srep) == machine_summary(srep2));
}

TEST_CASE("contraction needs the union of both collectors") {
    Theory th = low_theory();
    BaseInterpretation base = low_base();
    InterpOptions opts;

    // D = Low(x) -> Low(x): one positive function witness, one negative
    FormulaPtr D = imp(atom("Low", {var("x", N())}), atom("Low", {var("x", N())}));
    InterpretedFormula di = uinterp(D, base, opts);
    REQUIRE(di.a_vars.size() == 1);
    REQUIRE(di.b_vars.size() == 1);
    REQUIRE(equal(di.a_vars[0].ty, NN()));
    REQUIRE(equal(di.b_vars[0].ty, N()));
    InterpretedFormula ddi = uinterp(conj(D, D), base, opts);
    REQUIRE(ddi.a_vars.size() == 2);
    REQUIRE(ddi.b_vars.size() == 2);

    // D |- D /\ D, proved through the duplicated context D, D |- D /\ D
    DerivPtr d = dparse(
        "(contract 0 (andr (id (imp (rel Low (var x N)) (rel Low (var x N))))"
        " (id (imp (rel Low (var x N)) (rel Low (var x N))))))");

    auto proj = lam("p", NN(), var("p", NN()));
    std::vector<std::pair<std::string, TyPtr>> params = {
        {"p", NN()}, {"d1", N()}, {"d2", N()}};
    TermPtr sing1 = app(con(ConstKind::Singleton, {N()}), var("d1", N()));
    TermPtr sing2 = app(con(ConstKind::Singleton, {N()}), var("d2", N()));

    Extraction good;
    good.mode = ExtractMode::Plain;
    good.base_tag = "cp";
    good.t = {proj, proj};
    good.s = {{lam(params, app(con(ConstKind::Union, {N()}), {sing1, sing2}))}};

    Extraction corrupt = good;
    corrupt.s = {{lam(params, sing1)}}; // drops the second copy's demands

    Budgets tb;
    tb.max_nat = 3;
    Universe u(tb);

    VerifyReport ok = verify_extraction(th, d, base, good, u);
    CHECK(ok.all_holds());
    CHECK(ok.instances > 0);

    VerifyReport broken = verify_extraction(th, d, base, corrupt, u);
    CHECK(broken.fails > 0);
    REQUIRE(!broken.problems.empty());
    CHECK(broken.problems[0].result.outcome == Outcome::Fails);
    CHECK(!broken.problems[0].assignment.empty());
    CHECK(machine_summary(broken).find("result=fails\n") == 0);
}

TEST_CASE("relativized verification supplies membership premises") {
    Theory th = arith_theory();
    BaseInterpretation base = preset("cp");
    InterpOptions opts;

    DerivPtr d = dparse("(eqrefl (var x N))");

    InterpretedFormula mi = uinterp(itype(var("x", N())), base, opts);
    std::vector<TyPtr> ac_tys, acd_tys;
    for (const auto& av : mi.a_vars) ac_tys.push_back(av.ty);
    acd_tys = ac_tys; // the succedent x == x has no counter-witnesses

    Extraction ex;
    ex.mode = ExtractMode::Relativized;
    ex.base_tag = "cp";
    ex.q.emplace_back();
    for (const auto& bv : mi.b_vars) {
        std::vector<std::pair<std::string, TyPtr>> params;
        for (std::size_t i = 0; i < acd_tys.size(); ++i)
            params.emplace_back("c" + std::to_string(i), acd_tys[i]);
        TermPtr body = app(con(ConstKind::Singleton, {bv.ty}),
                           default_term(bv.ty, TypeRegistry{}));
        ex.q.back().push_back(params.empty() ? body : lam(params, body));
    }

    Universe u;
    VerifyReport rep = verify_extraction(th, d, base, ex, u);
    CHECK(rep.all_holds());
    CHECK(rep.instances > 0);
    CHECK(rep.mode == "i");
}

// ---------------------------------------------------------------------------
// Continuity moduli.
// ---------------------------------------------------------------------------
TEST_CASE("modulus search finds the support of a point-reading functional") {
    Universe u;
    // Phi f = f 3 + f 17
    TermPtr phi = lam("f", NN(),
                      app(add_term(), {app(var("f", NN()), numeral(3)),
                                       app(var("f", NN()), numeral(17))}));
    ValuePtr id = vfun("(lam n N n)");

    ModulusResult r = find_modulus(phi, id, ModulusMode::Eq, u, 20);
    REQUIRE(r.modulus.has_value());
    CHECK(equal(*r.modulus, vset({3, 17})));
    CHECK(!r.note.empty());

    r = find_modulus(phi, id, ModulusMode::Leq, u, 20);
    REQUIRE(r.modulus.has_value());
    CHECK(equal(*r.modulus, vset({3, 17})));
}

TEST_CASE("modulus search degenerate and budget-limited cases") {
    Universe u;
    ValuePtr id = vfun("(lam n N n)");

    TermPtr cphi = lam("f", NN(), numeral(5));
    ModulusResult r = find_modulus(cphi, id, ModulusMode::Eq, u, 7);
    REQUIRE(r.modulus.has_value());
    CHECK(equal(*r.modulus, vset({0})));
    r = find_modulus(cphi, id, ModulusMode::Leq, u, 7);
    REQUIRE(r.modulus.has_value());
    CHECK(equal(*r.modulus, vset({0})));

    // Phi f = f (f 0): reading at 0 pins the second application too
    TermPtr phi2 = lam("f", NN(), app(var("f", NN()), app(var("f", NN()), numeral(0))));
    r = find_modulus(phi2, id, ModulusMode::Eq, u, 7);
    REQUIRE(r.modulus.has_value());
    CHECK(equal(*r.modulus, vset({0})));

    // Phi f = f 12 reads beyond the search budget: no modulus, with a note
    TermPtr phi3 = lam("f", NN(), app(var("f", NN()), numeral(12)));
    r = find_modulus(phi3, id, ModulusMode::Eq, u, 7);
    CHECK_FALSE(r.modulus.has_value());
    CHECK(r.note.find("no modulus within budget") != std::string::npos);

    // Leq mode is one-sided: an antitone functional has no leq-modulus
    TermPtr phi4 = lam("f", NN(),
                       app(monus_term(), {numeral(10), app(var("f", NN()), numeral(0))}));
    ValuePtr c5 = vfun("(lam n N (num 5))");
    r = find_modulus(phi4, c5, ModulusMode::Leq, u, 7);
    CHECK_FALSE(r.modulus.has_value());
    r = find_modulus(phi4, c5, ModulusMode::Eq, u, 7);
    REQUIRE(r.modulus.has_value());
    CHECK(equal(*r.modulus, vset({0})));

    CHECK_THROWS_AS(find_modulus(var("g", func(NN(), N())), id, ModulusMode::Eq, u, 7),
                    modelcheck_error);
    CHECK_THROWS_AS(find_modulus(tp("(lam n N n)"), id, ModulusMode::Eq, u, 7),
                    modelcheck_error);
    CHECK_THROWS_AS(find_modulus(lam("f", NN(), numeral(0)), vnat(3), ModulusMode::Eq, u, 7),
                    modelcheck_error);
}
