#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wit/logic.hpp"

using namespace wit;

namespace {

TermPtr nv(const std::string& x) { return var(x, nat()); }
TermPtr nm(std::uint64_t n) { return numeral(n); }

FormulaPtr fparse(const std::string& s) { return parse_formula(s); }

DerivPtr dparse(const std::string& s) { return derivation_from_sexpr(sexpr::parse(s)); }

// Conclusion of a derivation, rendered, under the given theory.
std::string derived(const Theory& th, const std::string& proof) {
    return show(check_derivation(th, dparse(proof)).seq);
}

} // namespace

TEST_CASE("formula constructors validate types") {
    CHECK_THROWS_AS(term_eq(nm(0), bool_lit(0)), logic_error);
    CHECK_THROWS_AS(nat_leq(nm(0), bool_lit(0)), logic_error);
    CHECK_THROWS_AS(int_maj(bool_lit(0), bool_lit(1)), logic_error); // B not arithmetical
    CHECK_NOTHROW(int_maj(nv("f"), nv("g")));
    CHECK_NOTHROW(int_maj(var("f", func(nat(), nat())), var("g", func(nat(), nat()))));
    CHECK_THROWS_AS(set_mem(nm(0), nm(1)), logic_error);
    CHECK_NOTHROW(set_mem(nm(0), var("S", star(nat()))));
    CHECK_NOTHROW(bezem_leq(nv("x"), nv("a")));                  // dagger N = N
    CHECK_THROWS_AS(bezem_leq(bool_lit(0), bool_lit(1)), logic_error); // B is bounded
    CHECK_THROWS_AS(bezem_leq(var("S", star(nat())), var("T", star(nat()))), logic_error);
    CHECK_THROWS_AS(num_forall("k", bool_lit(0), bot()), logic_error);
    CHECK_THROWS_AS(set_forall("k", nm(0), bot()), logic_error);
}

TEST_CASE("rendering") {
    CHECK(show(fparse("(imp (and (leq (num 0) (num 1)) (bot)) (eq (num 2) (num 2)))")) ==
          "0 <= 1 /\\ false -> 2 == 2");
    CHECK(show(fparse("(imp (bot) (imp (bot) (bot)))")) == "false -> false -> false");
    CHECK(show(fparse("(imp (imp (bot) (bot)) (bot))")) == "(false -> false) -> false");
    CHECK(show(fparse("(and (and (bot) (bot)) (bot))")) == "false /\\ false /\\ false");
    CHECK(show(fparse("(and (bot) (and (bot) (bot)))")) == "false /\\ (false /\\ false)");
    CHECK(show(fparse("(forall n N (leq (num 0) n))")) == "forall n^N. 0 <= n");
    CHECK(show(fparse("(exists n N (eq n (num 3)))")) == "exists n^N. n == 3");
    CHECK(show(fparse("(and (forall n N (leq n n)) (bot))")) ==
          "(forall n^N. n <= n) /\\ false");
    CHECK(show(fparse("(bforall n N (leq n (var m N)) (eq n (var m N)))")) ==
          "forall n^N | n <= m. n == m");
    CHECK(show(fparse("(bexists n N (and (leq n n) (bot)) (bot))")) ==
          "exists n^N | (n <= n /\\ false). false");
    CHECK(show(atom("P", {nv("n"), nm(0)})) == "P(n, 0)");
    CHECK(show(itype(nv("x"))) == "I(x)");
    CHECK(show(bezem_leq(nv("x"), nv("a"))) == "x <=B a");
    CHECK(show(int_maj(nv("x"), nv("y"))) == "x <|B y");
    CHECK(show(set_forall("b", var("S", star(nat())), term_eq(var("b", nat()), nm(0)))) ==
          "forall b in S. b == 0");
    CHECK(show(num_forall("k", nv("n"), nat_leq(var("k", nat()), nv("n")))) ==
          "forall k <= n. k <= n");
    CHECK(show(num_exists("k", nm(4), bot())) == "exists k <= 4. false");
}

TEST_CASE("disjunction is defined by Boolean case split") {
    FormulaPtr f = fparse("(or (eq (num 0) (num 0)) (bot))");
    CHECK(show(f) == "exists i^B. (i == 0b -> 0 == 0) /\\ (i == 1b -> false)");
    // The case variable avoids captured names: i free in a kid pushes to i0.
    FormulaPtr g = expand_or(term_eq(var("i", nat()), nm(0)), bot());
    CHECK(show(g) == "exists i0^B. (i0 == 0b -> i == 0) /\\ (i0 == 1b -> false)");
    // (not ...) and (iff ...) are sugar as well.
    CHECK(show(fparse("(not (bot))")) == "false -> false");
    CHECK(show(fparse("(iff (bot) (leq (num 0) (num 0)))")) ==
          "(false -> 0 <= 0) /\\ (0 <= 0 -> false)");
}

TEST_CASE("display disjunction is a target-side connective") {
    // (disj ...) keeps the two branches as written; it binds between -> and /\.
    FormulaPtr f = fparse("(disj (eq (num 0) (num 0)) (bot))");
    CHECK(f->kind == FKind::Or);
    CHECK(show(f) == "0 == 0 \\/ false");
    CHECK(show(disj(bot(), conj(bot(), bot()))) == "false \\/ false /\\ false");
    CHECK(show(disj(disj(bot(), bot()), bot())) == "false \\/ false \\/ false");
    CHECK(show(disj(bot(), disj(bot(), bot()))) == "false \\/ (false \\/ false)");
    CHECK(show(imp(disj(bot(), bot()), bot())) == "false \\/ false -> false");
    CHECK(!is_source_formula(f));
    CHECK(sexpr::show(formula_to_sexpr(f)) == "(disj (eq (num 0) (num 0)) (bot))");
    CHECK(equal(fparse(sexpr::show(formula_to_sexpr(f))), f));
    Theory th = arith_theory();
    std::map<std::string, TyPtr> frees;
    CHECK_THROWS_WITH_AS(typecheck_formula(th, f, frees, /*allow_target=*/false),
                         doctest::Contains("not a source-language construct"), logic_error);
    typecheck_formula(th, f, frees, /*allow_target=*/true);
}

TEST_CASE("free variables and substitution") {
    FormulaPtr f = fparse("(forall n N (leq n (var m N)))");
    auto fv = free_vars(f);
    REQUIRE(fv.size() == 1);
    CHECK(fv.count("m") == 1);
    CHECK(show(fv["m"]) == "N");
    CHECK(free_in("m", f));
    CHECK(!free_in("n", f));

    // Plain substitution.
    CHECK(show(subst(f, "m", nm(7))) == "forall n^N. n <= 7");
    // Substituting for the bound name leaves the formula alone.
    CHECK(equal(subst(f, "n", nm(7)), f));
    // Capture avoidance: n := m forces the binder to step aside.
    CHECK(show(subst(fparse("(exists k N (eq k (var n N)))"), "n", nv("k"))) ==
          "exists k'^N. k' == k");
    // The set bound of a set quantifier lives outside the binder scope.
    FormulaPtr sf = set_forall("x", app(con(ConstKind::Singleton, {nat()}), nv("x")),
                               term_eq(nv("x"), nm(0)));
    auto sfv = free_vars(sf);
    REQUIRE(sfv.size() == 1);
    CHECK(sfv.count("x") == 1);
    CHECK(show(subst(sf, "x", nm(5))) == "forall x in {5}. x == 0");
}

TEST_CASE("formulas round-trip through the surface syntax") {
    std::vector<FormulaPtr> samples = {
        bot(),
        top(),
        atom("P", {}),
        term_eq(nv("n"), nm(0)),
        nat_leq(nm(1), nv("n")),
        int_maj(var("f", func(nat(), nat())), var("g", func(nat(), nat()))),
        bezem_leq(nv("x"), nv("a")),
        set_mem(nv("b"), var("S", star(nat()))),
        itype(nv("x")),
        conj(bot(), top()),
        imp(bot(), nat_leq(nm(0), nm(0))),
        forall("n", nat(), nat_leq(nv("n"), nv("n"))),
        exists("i", boolean(), term_eq(var("i", boolean()), bool_lit(0))),
        bforall("n", nat(), nat_leq(nv("n"), nv("m")), term_eq(nv("n"), nv("m"))),
        bexists("n", nat(), nat_leq(nv("n"), nm(4)), bot()),
        set_forall("b", var("S", star(nat())), term_eq(var("b", nat()), nm(0))),
        num_forall("k", nv("n"), nat_leq(var("k", nat()), nv("n"))),
        num_exists("k", nm(4), bot()),
    };
    for (const auto& f : samples) {
        FormulaPtr back = formula_from_sexpr(formula_to_sexpr(f));
        CHECK(equal(back, f));
        CHECK(compare(back, f) == 0);
    }
    CHECK(compare(bot(), top()) != 0);
    CHECK_THROWS_AS(fparse("(frobnicate)"), logic_error);
    CHECK_THROWS_AS(fparse("(eq (num 0))"), logic_error);
}

TEST_CASE("relativization guards quantifiers and fixes everything else") {
    // Quantifier-free formulas are their own relativization.
    FormulaPtr qf = fparse("(imp (eq (num 0) (num 0)) (leq (num 1) (num 2)))");
    CHECK(equal(relativize(qf), qf));
    CHECK(is_quantifier_free(qf));

    FormulaPtr all = fparse("(forall n N (leq n n))");
    CHECK(show(relativize(all)) == "forall n^N. I(n) -> n <= n");
    FormulaPtr ex = fparse("(exists n N (eq n (num 2)))");
    CHECK(show(relativize(ex)) == "exists n^N. I(n) /\\ n == 2");
    FormulaPtr ball = fparse("(bforall n N (leq n (var m N)) (eq n (var m N)))");
    CHECK(show(relativize(ball)) == "forall n^N. n <= m -> n == m");
    FormulaPtr bex = fparse("(bexists n N (leq n (var m N)) (eq n n))");
    CHECK(show(relativize(bex)) == "exists n^N. n <= m /\\ n == n");
    // Nesting: guards appear at every quantifier.
    FormulaPtr nest = fparse("(forall n N (exists m N (leq n m)))");
    CHECK(show(relativize(nest)) == "forall n^N. I(n) -> (exists m^N. I(m) /\\ n <= m)");
    CHECK_THROWS_AS(relativize(top()), logic_error);
    CHECK_THROWS_AS(relativize(set_mem(nm(0), var("S", star(nat())))), logic_error);
}

TEST_CASE("theories record relations and axioms") {
    Theory th = arith_theory();
    CHECK(th.axioms.size() == 9);
    CHECK(!th.has_intmaj);
    CHECK(show(th.axiom("leq-trans").formula) ==
          "forall n^N. forall m^N. forall k^N. n <= m /\\ m <= k -> n <= k");
    CHECK(show(th.axiom("succ-inj").formula) ==
          "forall n^N. forall m^N. S n == S m -> n == m");
    CHECK(th.axiom("bool-distinct").universal);
    CHECK_THROWS_AS(th.axiom("nope"), logic_error);
    CHECK_THROWS_AS(th.relation("P"), logic_error);

    th.declare_relation({"P", {nat(), boolean()}});
    CHECK_THROWS_AS(th.declare_relation({"P", {nat()}}), logic_error);
    CHECK(th.relation("P").arg_tys.size() == 2);

    // Axioms must be closed.
    CHECK_THROWS_AS(th.declare_axiom({"open", nat_leq(nv("n"), nv("n")), false}),
                    logic_error);
    // Universal axioms are witness-free by shape: no existentials, no atoms.
    CHECK_THROWS_AS(
        th.declare_axiom({"bad-uni", fparse("(exists n N (eq n n))"), true}),
        logic_error);
    CHECK_THROWS_AS(
        th.declare_axiom(
            {"bad-uni2", fparse("(forall n N (rel P n (bool 0)))"), true}),
        logic_error);
    CHECK_NOTHROW(
        th.declare_axiom({"ok-wit", fparse("(exists n N (eq n (num 0)))"), false}));

    Theory bfi = bfi_theory();
    CHECK(bfi.has_intmaj);
    CHECK(bfi.axioms.size() == 9);
}

TEST_CASE("formula typechecking") {
    Theory th = arith_theory();
    th.declare_relation({"P", {nat()}});
    auto ok = [&](const FormulaPtr& f, bool allow_target = false) {
        std::map<std::string, TyPtr> frees;
        typecheck_formula(th, f, frees, allow_target);
        return frees;
    };
    auto fv = ok(fparse("(forall n N (imp (rel P n) (rel P (var m N))))"));
    CHECK(fv.size() == 1);
    CHECK(fv.count("m") == 1);

    // Arity and argument types of registered relations.
    CHECK_THROWS_AS(ok(fparse("(rel P (num 0) (num 1))")), logic_error);
    CHECK_THROWS_AS(ok(fparse("(rel P (bool 0))")), logic_error);
    CHECK_THROWS_AS(ok(fparse("(rel Q (num 0))")), logic_error);

    // One free variable, one type.
    FormulaPtr clash = conj(term_eq(nv("n"), nm(0)),
                            term_eq(var("n", boolean()), bool_lit(0)));
    CHECK_THROWS_AS(ok(clash), logic_error);
    // Bound occurrences must match the binder type.
    FormulaPtr bad_bind = forall("n", nat(), term_eq(var("n", boolean()), bool_lit(0)));
    CHECK_THROWS_AS(ok(bad_bind), logic_error);
    // Shadowing is fine when types agree per scope.
    CHECK_NOTHROW(ok(fparse("(forall n N (and (leq n n) (forall n N (leq n n))))")));

    // Target constructs need the flag.
    CHECK_THROWS_AS(ok(top()), logic_error);
    CHECK_THROWS_AS(ok(itype(nm(0))), logic_error);
    CHECK_THROWS_AS(ok(set_mem(nm(0), var("S", star(nat())))), logic_error);
    CHECK_THROWS_AS(ok(num_forall("k", nm(3), bot())), logic_error);
    CHECK_NOTHROW(ok(top(), true));
    CHECK_NOTHROW(ok(itype(nm(0)), true));
    CHECK_NOTHROW(ok(set_forall("b", var("S", star(nat())),
                                term_eq(var("b", nat()), nm(0))),
                     true));
    // Intensional majorizability needs the extended theory.
    CHECK_THROWS_AS(ok(int_maj(nv("x"), nv("y"))), logic_error);
    Theory bfi = bfi_theory();
    std::map<std::string, TyPtr> frees;
    CHECK_NOTHROW(typecheck_formula(bfi, int_maj(nv("x"), nv("y")), frees));
}

TEST_CASE("checker: leaves") {
    Theory th = arith_theory();
    CHECK(derived(th, "(id (leq (var n N) (var n N)))") == "n <= n |- n <= n");
    CHECK(derived(th, "(botl (eq (num 0) (num 1)))") == "false |- 0 == 1");
    CHECK(derived(th, "(eqrefl (num 2))") == "|- 2 == 2");
    CHECK(derived(th, "(conv (app (lam k N (succ k)) (num 1)) (num 2))") ==
          "|- (\\k. S k) 1 == 2");
    CHECK(derived(th, "(axiom leq-refl)") == "|- forall n^N. n <= n");
    CHECK(derived(th, "(eqsubst k N (leq (num 0) k) (var n N) (succ (var n N)))") ==
          "0 <= n, n == S n |- 0 <= S n");
    CHECK(derived(th, "(boolelim i (eq i i))") ==
          "|- 0b == 0b /\\ 1b == 1b -> (forall i^B. i == i)");
    CHECK(derived(th, "(bqdef all lr n N (leq n (var m N)) (eq n (var m N)))") ==
          "|- (forall n^N | n <= m. n == m) -> (forall n^N. n <= m -> n == m)");
    CHECK(derived(th, "(bqdef all rl n N (leq n (var m N)) (eq n (var m N)))") ==
          "|- (forall n^N. n <= m -> n == m) -> (forall n^N | n <= m. n == m)");
    CHECK(derived(th, "(bqdef ex lr n N (leq n (num 4)) (eq n n))") ==
          "|- (exists n^N | n <= 4. n == n) -> (exists n^N. n <= 4 /\\ n == n)");

    Theory bfi = bfi_theory();
    CHECK(derived(bfi, "(intmaj-ax1)") ==
          "|- forall x^N. forall y^N. (x <|B y -> x <= y) /\\ (x <= y -> x <|B y)");
    CHECK(derived(bfi, "(intmaj-ax2 N N)") ==
          "|- forall f^(N -> N). forall g^(N -> N). f <|B g -> "
          "(forall x^N. forall y^N. x <|B y -> f x <|B g y /\\ g x <|B g y)");
    // The intensional relation is tied to the extended theory.
    CHECK_THROWS_AS(derived(th, "(intmaj-ax1)"), logic_error);
    CHECK_THROWS_AS(derived(th, "(id (intmaj (var x N) (var y N)))"), logic_error);
}

TEST_CASE("checker: structural and propositional rules") {
    Theory th = arith_theory();
    CHECK(derived(th, "(weaken (bot) 0 (eqrefl (num 0)))") == "false |- 0 == 0");
    CHECK(derived(th, "(weaken (bot) 1 (id (eq (num 0) (num 0))))") ==
          "0 == 0, false |- 0 == 0");
    CHECK(derived(th,
                  "(contract 0 (weaken (leq (var n N) (var n N)) 0"
                  " (id (leq (var n N) (var n N)))))") == "n <= n |- n <= n");
    CHECK(derived(th, "(swap 0 (weaken (bot) 1 (id (eq (num 0) (num 0)))))") ==
          "false, 0 == 0 |- 0 == 0");
    CHECK(derived(th, "(andl 0 (weaken (bot) 1 (id (leq (num 0) (num 1)))))") ==
          "0 <= 1 /\\ false |- 0 <= 1");
    CHECK(derived(th, "(andr (eqrefl (num 0)) (eqrefl (num 1)))") ==
          "|- 0 == 0 /\\ 1 == 1");
    CHECK(derived(th, "(impr (id (bot)))") == "|- false -> false");
    CHECK(derived(th, "(impl (eqrefl (num 0)) (id (bot)))") ==
          "0 == 0 -> false |- false");
    CHECK(derived(th, "(cut (eqrefl (num 0)) (id (eq (num 0) (num 0))))") == "|- 0 == 0");
    // Two-premise rules combine contexts multiplicatively.
    CHECK(derived(th,
                  "(cut (id (eq (num 0) (num 0)))"
                  " (weaken (bot) 1 (id (eq (num 0) (num 0)))))") ==
          "0 == 0, false |- 0 == 0");
}

TEST_CASE("checker: quantifier rules") {
    Theory th = arith_theory();
    CHECK(derived(th, "(forallr n N (eqrefl (var n N)))") == "|- forall n^N. n == n");
    CHECK(derived(th,
                  "(foralll (forall n N (leq n n)) (num 3)"
                  " (id (leq (num 3) (num 3))))") == "forall n^N. n <= n |- 3 <= 3");
    CHECK(derived(th,
                  "(existsr (exists n N (eq n (num 2))) (num 2) (eqrefl (num 2)))") ==
          "|- exists n^N. n == 2");
    CHECK(derived(th,
                  "(existsl n N (existsr (exists m N (eq m (num 0))) (var n N)"
                  " (id (eq (var n N) (num 0)))))") ==
          "exists n^N. n == 0 |- exists m^N. m == 0");
}

TEST_CASE("checker: induction") {
    Theory th = arith_theory();
    // |- forall n^N. n <= n, by induction from the order axioms.
    std::string base =
        "(cut (axiom leq-refl)"
        " (foralll (forall n N (leq n n)) (num 0) (id (leq (num 0) (num 0)))))";
    std::string mono =
        "(forall n N (forall m N (imp (leq n m) (leq (succ n) (succ m)))))";
    std::string step =
        "(forallr n N (impr"
        " (cut (axiom leq-succ-mono)"
        "  (foralll " + mono + " (var n N)"
        "   (foralll (forall m N (imp (leq (var n N) m)"
        "                             (leq (succ (var n N)) (succ m)))) (var n N)"
        "    (impl (id (leq (var n N) (var n N)))"
        "          (id (leq (succ (var n N)) (succ (var n N))))))))))";
    std::string proof = "(induction n (leq n n) " + base + " " + step + ")";
    CHECK(derived(th, proof) == "|- forall n^N. n <= n");
}

TEST_CASE("checker: intensional majorizability rule") {
    Theory bfi = bfi_theory();
    // |- \k.k <|B \k.k from the premise x <|B y |- id x <|B id y /\ id x <|B id y,
    // built by rewriting x == id x and y == id y into the identity hypothesis.
    std::string e1 =
        "(cut (conv (var x N) (app (lam k N k) (var x N)))"
        " (swap 0 (eqsubst u N (intmaj u (var y N))"
        "          (var x N) (app (lam k N k) (var x N)))))";
    std::string e2 =
        "(cut (conv (var y N) (app (lam k N k) (var y N)))"
        " (swap 0 (eqsubst v N (intmaj (app (lam k N k) (var x N)) v)"
        "          (var y N) (app (lam k N k) (var y N)))))";
    std::string e4 = "(contract 0 (andr (cut " + e1 + " " + e2 + ") (cut " + e1 + " " + e2 + ")))";
    std::string proof = "(intmaj-rule (lam k N k) (lam k N k) x y " + e4 + ")";
    CHECK(derived(bfi, proof) == "|- \\k. k <|B \\k. k");
    // The rule needs the premise variables gone from the conclusion.
    std::string bad = "(intmaj-rule (lam k N (var x N)) (lam k N (var x N)) x y " + e4 + ")";
    CHECK_THROWS_AS(derived(bfi, bad), logic_error);
}

TEST_CASE("checker: rejections carry the node path") {
    Theory th = arith_theory();
    auto fails_with = [&](const std::string& proof, const std::string& needle) {
        try {
            derived(th, proof);
            FAIL_CHECK("expected rejection of ", proof);
        } catch (const logic_error& e) {
            CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos,
                          "message was: ", e.what());
        }
    };
    fails_with("(forallr n N (id (leq (var n N) (var n N))))", "eigenvariable");
    fails_with("(existsl n N (id (eq (var n N) (num 0))))", "eigenvariable");
    fails_with("(contract 0 (weaken (bot) 0 (id (eq (num 0) (num 0)))))",
               "contract expects equal formulas");
    fails_with("(swap 5 (eqrefl (num 0)))", "swap index out of range");
    fails_with("(weaken (bot) 3 (eqrefl (num 0)))", "weaken index out of range");
    fails_with("(conv (num 0) (num 1))", "normal form");
    fails_with("(conv (num 0) (bool 0))", "conversion rhs");
    fails_with("(eqsubst u N (forall m N (leq u m)) (num 0) (num 1))",
               "quantifier-free");
    fails_with("(axiom nope)", "unknown axiom");
    fails_with("(id (top))", "not a source-language construct");
    fails_with("(id (mem (num 0) (var S N*)))", "not a source-language construct");
    fails_with("(foralll (forall n N (leq n n)) (num 3) (id (leq (num 2) (num 2))))",
               "instantiated hypothesis mismatch");
    fails_with("(foralll (leq (num 0) (num 0)) (num 3) (eqrefl (num 0)))",
               "needs a universal formula");
    fails_with("(existsr (exists n N (eq n (num 2))) (num 3) (eqrefl (num 2)))",
               "instantiated succedent mismatch");
    fails_with("(foralll (forall n N (leq n n)) (bool 0) (id (leq (num 3) (num 3))))",
               "instantiation term");
    fails_with("(cut (eqrefl (num 0)) (id (eq (num 1) (num 1))))",
               "cut formula mismatch");
    fails_with("(impr (eqrefl (num 0)))", "empty context");
    fails_with("(induction n (leq n (var m N)) (eqrefl (num 0)) (eqrefl (num 0)))",
               "parameter");
    fails_with(
        "(induction n (leq n n)"
        " (weaken (bot) 0 (cut (axiom leq-refl) (foralll (forall n N (leq n n))"
        "   (num 0) (id (leq (num 0) (num 0))))))"
        " (eqrefl (num 0)))",
        "empty contexts");
    fails_with("(induction n (leq n n) (eqrefl (num 0)) (eqrefl (num 0)))",
               "base case mismatch");
    // Wrong premise count is caught structurally at parse or check time.
    CHECK_THROWS_AS(dparse("(cut (eqrefl (num 0)))"), logic_error);
    CHECK_THROWS_AS(dparse("(id)"), logic_error);
    CHECK_THROWS_AS(dparse("(swap x (eqrefl (num 0)))"), logic_error);
    CHECK_THROWS_AS(dparse("(frob (eqrefl (num 0)))"), logic_error);
    // Paths locate the failing node.
    try {
        derived(th, "(cut (eqrefl (num 0)) (cut (eqrefl (num 1)) (conv (num 0) (num 1))))");
        FAIL_CHECK("expected rejection");
    } catch (const logic_error& e) {
        CHECK(std::string(e.what()).find("proof/1/1") != std::string::npos);
    }
}

TEST_CASE("derivations round-trip through the surface syntax") {
    std::vector<std::string> proofs = {
        "(id (leq (var n N) (var n N)))",
        "(eqsubst k N (leq (num 0) k) (var n N) (succ (var n N)))",
        "(boolelim i (eq i i))",
        "(bqdef ex rl n N (leq n (num 4)) (eq n n))",
        "(weaken (bot) 0 (eqrefl (num 0)))",
        "(andr (eqrefl (num 0)) (eqrefl (num 1)))",
        "(forallr n N (eqrefl (var n N)))",
        "(foralll (forall n N (leq n n)) (num 3) (id (leq (num 3) (num 3))))",
        "(existsl n N (existsr (exists m N (eq m (num 0))) (var n N)"
        " (id (eq (var n N) (num 0)))))",
    };
    for (const auto& p : proofs) {
        DerivPtr d = dparse(p);
        std::string printed = sexpr::show(derivation_to_sexpr(d));
        DerivPtr back = dparse(printed);
        CHECK(sexpr::show(derivation_to_sexpr(back)) == printed);
    }
}

TEST_CASE("check files tie a stated conclusion to a proof") {
    std::string good =
        "(check (theory arith)"
        " (conclusion (seq (ctx) (eq (num 2) (num 2))))"
        " (proof (eqrefl (num 2))))";
    CHECK(show(check_file(parse_check_file(good)).seq) == "|- 2 == 2");

    std::string stated_off =
        "(check (theory arith)"
        " (conclusion (seq (ctx) (eq (num 3) (num 3))))"
        " (proof (eqrefl (num 2))))";
    CHECK_THROWS_AS(check_file(parse_check_file(stated_off)), logic_error);

    // Declared relations and axioms are available to the proof.
    std::string with_decls =
        "(check (theory arith"
        "         (rel P (N))"
        "         (axiom p-zero witnessed (rel P (num 0))))"
        " (conclusion (seq (ctx) (rel P (num 0))))"
        " (proof (axiom p-zero)))";
    CHECK(show(check_file(parse_check_file(with_decls)).seq) == "|- P(0)");

    CHECK_THROWS_AS(parse_check_file("(check (theory arith))"), logic_error);
    CHECK_THROWS_AS(parse_check_file(
                        "(check (theory wrong) (conclusion (seq (ctx) (bot)))"
                        " (proof (id (bot))))"),
                    logic_error);
    // Sequent syntax round-trip.
    Sequent s = sequent_from_sexpr(sexpr::parse("(seq (ctx (bot)) (leq (num 0) (num 1)))"));
    CHECK(show(s) == "false |- 0 <= 1");
    CHECK(equal(sequent_from_sexpr(sequent_to_sexpr(s)), s));
}
