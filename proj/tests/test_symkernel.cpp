#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "legweb/elim.hpp"
#include "legweb/poly.hpp"

using namespace legweb;
using namespace legweb::sym;

namespace {

SymbolId sym_a0() { return intern("a0", 1, Origin::Deformation); }
SymbolId sym_b1() { return intern("b1", 2, Origin::Deformation); }
SymbolId sym_b3() { return intern("b3", 2, Origin::Deformation); }
SymbolId sym_A0() { return intern("A0", 1, Origin::Invariant); }

Poly P(const std::string& s) { return parse_poly(s); }

// Small random polynomials over a fixed symbol pool for property tests.
Poly random_poly(std::mt19937& rng) {
    static const SymbolId pool[3] = {sym_a0(), sym_b1(), sym_b3()};
    std::uniform_int_distribution<int> nterms(0, 4), coef(-4, 4), expo(0, 2);
    Poly p;
    int n = nterms(rng);
    for (int t = 0; t < n; ++t) {
        Poly term = Poly::constant(coef(rng));
        for (SymbolId s : pool) term = term * Poly::variable(s, expo(rng));
        p += term;
    }
    return p;
}

} // namespace

TEST_CASE("poly arithmetic on the worked examples") {
    CHECK(P("(a0+b1)*(a0-b1)") == P("a0^2 - b1^2"));
    CHECK((P("a0+b1") * Poly::zero()).is_zero());
    CHECK(P("(b1+b3)^2 - (b1^2 + 2*b1*b3)") == P("b3^2"));
}

TEST_CASE("ring axioms hold exactly on random polynomials") {
    std::mt19937 rng(12345);
    for (int i = 0; i < 200; ++i) {
        Poly p = random_poly(rng), q = random_poly(rng), r = random_poly(rng);
        CHECK((p + q) * r == p * r + q * r);
        CHECK(p * (q * r) == (p * q) * r);
        CHECK(p * q == q * p);
        CHECK(p + q == q + p);
        CHECK((p - p).is_zero());
    }
}

TEST_CASE("substitution is exact and homomorphic") {
    SymbolId R = intern("Rsub", 2, Origin::Invariant);
    std::map<SymbolId, Poly> half_a0sq{{R, P("a0^2") * rat(1, 2)}};
    CHECK((Poly::variable(sym_a0()).pow(2) - rat(2) * Poly::variable(R))
              .substitute(half_a0sq)
              .is_zero());
    CHECK(P("b1^2").substitute({{sym_b1(), P("b3")}}) == P("b3^2"));

    std::mt19937 rng(99);
    for (int i = 0; i < 100; ++i) {
        Poly p = random_poly(rng), q = random_poly(rng);
        // keep the binding acyclic: the replacement avoids the bound symbol
        Poly value = random_poly(rng).substitute({{sym_b1(), P("a0 - 2*b3")}});
        std::map<SymbolId, Poly> b{{sym_b1(), value}};
        CHECK((p * q).substitute(b) == p.substitute(b) * q.substitute(b));
        CHECK((p + q).substitute(b) == p.substitute(b) + q.substitute(b));
    }
}

TEST_CASE("cyclic binding sets are rejected") {
    std::map<SymbolId, Poly> cyc{{sym_b1(), P("b3")}, {sym_b3(), P("b1 + 1")}};
    CHECK_THROWS(P("b1").substitute(cyc));
    std::map<SymbolId, Poly> self{{sym_b1(), P("b1 + 1")}};
    CHECK_THROWS(P("b1").substitute(self));
    // acyclic chains pass
    std::map<SymbolId, Poly> tri{{sym_b1(), P("b3")}, {sym_b3(), P("a0")}};
    CHECK(P("b1").substitute(tri) == P("b3"));
}

TEST_CASE("collect by deformation variables") {
    std::vector<SymbolId> vars{sym_a0(), sym_b1(), sym_b3()};
    auto c = P("b1^2 + 2*b1*b3 + A0*a0").collect(vars);
    CHECK(c.degree == 2);
    CHECK(c.coefficients.at({0, 1, 1}) == Poly::constant(2));
    CHECK(c.coefficients.at({1, 0, 0}) == Poly::variable(sym_A0()));

    auto z = Poly::zero().collect(vars);
    CHECK(z.degree == -1);
    CHECK(z.coefficients.empty());
}

TEST_CASE("weight grading") {
    CHECK(std::get<int>(P("b1^2 + 2*b1*b3").weight()) == 4);
    CHECK(std::get<int>(P("a0^5 + 314/111*A0*a0^4").weight()) == 5);
    auto w = P("a0 + b1").weight();
    REQUIRE(std::holds_alternative<Poly::WeightWitness>(w));
    auto ww = std::get<Poly::WeightWitness>(w);
    CHECK(ww.weight_a != ww.weight_b);
}

TEST_CASE("canonical serialization") {
    CHECK(P("2*b1*b3 + b1^2").str() == "b1^2 + 2*b1*b3");
    CHECK(Poly::zero().str() == "0");
    CHECK(P("-11/2*A0*a0^2 + 3*a0*b1").str() == "-11/2*A0*a0^2 + 3*a0*b1");
    CHECK(parse_poly(P("a0^5 + 314/111*A0*a0^4 - 2*b1").str()) ==
          P("a0^5 + 314/111*A0*a0^4 - 2*b1"));
}

TEST_CASE("exact division and proportionality") {
    Poly prod = P("(b1-b3)*(4*b1+4*b3-11*a0^2)");
    auto q = divide_exact(prod, P("b1-b3"));
    REQUIRE(q.has_value());
    CHECK(*q == P("4*b1+4*b3-11*a0^2"));
    CHECK(!divide_exact(prod, P("b1+1")).has_value());
    CHECK(proportional(P("2*b1^2+4*b1*b3"), P("b1^2+2*b1*b3")));
    CHECK(!proportional(P("b1^2"), P("b1^2 + b1*b3")));
}

TEST_CASE("univariate gcd and rational roots") {
    SymbolId t = intern("tvar", 0, Origin::Invariant);
    Poly f = P("tvar^2 + 2*tvar");         // t(t+2)
    Poly g = P("tvar^2 + 3*tvar + 2");     // (t+1)(t+2)
    CHECK(gcd_univariate(f, g, t) == P("tvar + 2"));

    auto roots = rational_roots(P("2*tvar^3 - 3*tvar^2 - 3*tvar + 2"), t); // roots -1, 1/2, 2
    REQUIRE(roots.size() == 3);
    CHECK(roots[0] == rat(-1));
    CHECK(roots[1] == rat(1, 2));
    CHECK(roots[2] == rat(2));
}

TEST_CASE("resultant eliminates a shared variable") {
    // res_y(x - y, y - 2) = x - 2 up to sign
    SymbolId x = intern("resx", 0, Origin::Invariant);
    SymbolId y = intern("resy", 0, Origin::Invariant);
    Poly r = resultant(P("resx - resy"), P("resy - 2"), y);
    CHECK(proportional(r, P("resx - 2")));
    // resultant vanishes iff common root exists
    Poly r2 = resultant(P("resx^2 - 1"), P("resx - 1"), x);
    CHECK(r2.is_zero());
    Poly r3 = resultant(P("resx^2 - 1"), P("resx - 3"), x);
    CHECK(!r3.is_zero());
}

TEST_CASE("polynomial square root") {
    auto s = poly_sqrt(P("121*a0^4 - 176*a0^2*b3 + 64*b3^2"));
    REQUIRE(s.has_value());
    CHECK((*s) * (*s) == P("121*a0^4 - 176*a0^2*b3 + 64*b3^2"));
    CHECK(!poly_sqrt(P("a0^2 + b3")).has_value());
}

TEST_CASE("eliminate: trivial linear system") {
    auto desc = eliminate({P("b1 - b3"), P("b1 + b3")}, {sym_b1(), sym_b3()});
    CHECK(desc.zero_dimensional);
    REQUIRE(desc.points.size() == 1);
    CHECK(desc.points[0].coords.at(sym_b1()) == rat(0));
    CHECK(desc.points[0].coords.at(sym_b3()) == rat(0));
    std::string why;
    CHECK(verify_root_description(desc, {P("b1 - b3"), P("b1 + b3")}, &why));
}

TEST_CASE("eliminate: factored quadratic gives two components") {
    auto desc = eliminate({P("(b1-b3)*(4*b1+4*b3-11*a0^2)")}, {sym_b1()});
    CHECK(!desc.zero_dimensional);
    REQUIRE(desc.components.size() == 2);
    CHECK(desc.components[0].dimension == 2);
    CHECK(desc.components[1].dimension == 2);
}

TEST_CASE("eliminate: agreement with brute force on rational grids") {
    std::vector<SymbolId> vars{sym_a0(), sym_b1(), sym_b3()};
    std::vector<std::vector<Poly>> systems = {
        {P("(a0-1)*(a0+2)"), P("b1 - a0"), P("b3 + a0")},
        {P("a0^2 - 1"), P("b1^2 - 4"), P("b3")},
        {P("a0 - b1"), P("b1 - b3"), P("b3 - 2")},
    };
    for (auto& sys : systems) {
        auto desc = eliminate(sys, vars);
        CHECK(desc.zero_dimensional);
        std::string why;
        CHECK_MESSAGE(verify_root_description(desc, sys, &why), why);
        // brute force over a small rational grid
        std::vector<RootPoint> grid_roots;
        for (int ia = -4; ia <= 4; ++ia)
            for (int ib = -4; ib <= 4; ++ib)
                for (int ic = -4; ic <= 4; ++ic) {
                    std::map<SymbolId, Poly> sub{{vars[0], Poly::constant(ia)},
                                                 {vars[1], Poly::constant(ib)},
                                                 {vars[2], Poly::constant(ic)}};
                    bool all = true;
                    for (auto& p : sys)
                        if (!p.substitute(sub).is_zero()) all = false;
                    if (all) {
                        RootPoint pt;
                        pt.coords[vars[0]] = rat(ia);
                        pt.coords[vars[1]] = rat(ib);
                        pt.coords[vars[2]] = rat(ic);
                        grid_roots.push_back(pt);
                    }
                }
        CHECK(grid_roots.size() == desc.points.size());
        for (auto& g : grid_roots) {
            bool found = false;
            for (auto& p : desc.points)
                if (p.coords == g.coords) found = true;
            CHECK(found);
        }
    }
}

TEST_CASE("exponent overflow is a hard error") {
    CHECK_THROWS_AS(P("a0").pow(70000), std::overflow_error);
}
