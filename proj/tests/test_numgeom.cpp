#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "legweb/numgeom.hpp"

using namespace legweb;
using namespace legweb::numgeom;

TEST_CASE("contact pairing normalization and antisymmetry") {
    Vec4 e0{1, 0, 0, 0}, e2{0, 0, 1, 0};
    CHECK(contact_pair(e0, e2) == 1.0);
    CHECK(contact_pair(e2, e0) == -1.0);
    Vec4 x{0.3, -2.5, 7.0, 1.25};
    CHECK(contact_pair(x, x) == 0.0);
    // bilinearity, exact field
    RVec4 u{rat(1, 3), rat(-2), rat(5, 7), rat(0)};
    RVec4 v{rat(2), rat(1, 2), rat(-1), rat(4)};
    RVec4 w{rat(-1), rat(3), rat(2, 5), rat(1)};
    RVec4 uv;
    for (int i = 0; i < 4; ++i) uv[std::size_t(i)] = u[std::size_t(i)] + v[std::size_t(i)];
    CHECK(contact_pair(uv, w) == contact_pair(u, w) + contact_pair(v, w));
    CHECK(contact_pair(u, v) == -contact_pair(v, u));
}

TEST_CASE("pluecker image lands on the quadric") {
    Vec4 e0{1, 0, 0, 0}, e1{0, 1, 0, 0};
    auto q = plucker(e0, e1);
    REQUIRE(q.has_value());
    CHECK(q->p[0] == 1.0);
    CHECK(q->quadric_residual < 1e-12);
    // non-Lagrangian pair rejected
    Vec4 e2{0, 0, 1, 0};
    CHECK(!plucker(e0, e2).has_value());
    // exact-mode residual is exactly zero on the curve's Gauss image
    ParamCurve cubic = reference_cubic();
    for (long n : {-2L, -1L, 0L, 1L, 3L}) {
        Rat t = rat(n, 2);
        auto p = plucker_exact(cubic.eval(t), cubic.eval_derivative(t));
        CHECK(legweb::is_zero(quadric_residual_exact(p)));
    }
}

TEST_CASE("reference cubic is Legendrian of degree 3") {
    ParamCurve cubic = reference_cubic();
    CHECK(cubic.degree() == 3);
    CHECK(cubic.is_legendrian());
    for (auto& c : cubic.legendrian_residual()) CHECK(legweb::is_zero(c));
    // the control curve is not Legendrian
    CHECK(!load_curve("rational-normal-cubic").is_legendrian());
}

TEST_CASE("web roots at the distinguished point") {
    ParamCurve cubic = reference_cubic();
    Vec4 x{1, 2, 6, -11};
    auto s = web_roots(cubic, x);
    REQUIRE(s.has_value());
    CHECK(std::abs(s->roots[0] - 1) < 1e-10);
    CHECK(std::abs(s->roots[1] - 2) < 1e-10);
    CHECK(std::abs(s->roots[2] - 3) < 1e-10);
    for (double r : s->residuals) CHECK(r < 1e-10);

    // the curve point lies in its own contact plane
    Vec4 origin{1, 0, 0, 0};
    std::vector<double> inc = cubic.incidence(origin);
    double at0 = inc.empty() ? 0.0 : inc[0];
    CHECK(at0 == 0.0);

    // exact mode
    RVec4 xr{Rat(1), Rat(2), Rat(6), Rat(-11)};
    auto roots = web_roots_exact(cubic, xr);
    REQUIRE(roots.has_value());
    CHECK((*roots)[0] == Rat(1));
    CHECK((*roots)[1] == Rat(2));
    CHECK((*roots)[2] == Rat(3));
}

TEST_CASE("near-multiple roots are rejected with a reason") {
    ParamCurve cubic = reference_cubic();
    // (t-1)^2 (t-2) = t^3 - 4 t^2 + 5 t - 2: x1 = 4/3, x3 = 5, x2 = 2
    Vec4 x{1, 4.0 / 3.0, 2, 5};
    std::string reason;
    auto s = web_roots(cubic, x, WebOptions{}, &reason);
    CHECK(!s.has_value());
    CHECK(!reason.empty());
}

TEST_CASE("first integrals are leaf constants") {
    ParamCurve cubic = reference_cubic();
    auto s = web_roots(cubic, Vec4{1, 2, 6, -11});
    REQUIRE(s.has_value());
    for (int leaf = 0; leaf < 3; ++leaf) {
        auto dev0 = first_integral_check(cubic, *s, leaf, 0.0);
        REQUIRE(dev0.has_value());
        CHECK(*dev0 == 0.0);
        for (double step : {0.1, 0.5, 0.9}) {
            auto dev = first_integral_check(cubic, *s, leaf, step);
            REQUIRE(dev.has_value());
            CHECK(*dev < 1e-9);
        }
    }
    // control: stepping off the leaf moves the root
    Vec4 y = s->x;
    y[1] += 0.001;
    auto moved = web_roots(cubic, y);
    REQUIRE(moved.has_value());
    double d = std::abs(moved->roots[0] - s->roots[0]);
    CHECK(d > 1e-4);
}

TEST_CASE("concurrency point inverts the web roots") {
    ParamCurve cubic = reference_cubic();
    auto c = concurrency_point(cubic.eval(1), cubic.eval(2), cubic.eval(3));
    CHECK(c.kernel_dim == 1);
    CHECK(projective_distance(c.point, Vec4{1, 2, 6, -11}) < 1e-10);

    // degenerate: repeated point drops the rank
    auto d = concurrency_point(cubic.eval(1), cubic.eval(1), cubic.eval(3));
    CHECK(d.kernel_dim == 2);

    // exact mode
    auto ex = concurrency_point_exact(cubic.eval(Rat(1)), cubic.eval(Rat(2)),
                                      cubic.eval(Rat(3)));
    REQUIRE(ex.has_value());
    // proportional to (1, 2, 6, -11)
    RVec4 expect{Rat(1), Rat(2), Rat(6), Rat(-11)};
    Rat lambda;
    bool found = false;
    for (int i = 0; i < 4; ++i)
        if (!found && !legweb::is_zero((*ex)[std::size_t(i)])) {
            lambda = (*ex)[std::size_t(i)] / expect[std::size_t(i)];
            found = true;
        }
    REQUIRE(found);
    for (int i = 0; i < 4; ++i)
        CHECK((*ex)[std::size_t(i)] == lambda * expect[std::size_t(i)]);

    // round trip on random samples
    std::mt19937_64 rng(4242);
    auto unit = [&]() { return double(rng() >> 11) * 0x1.0p-53; };
    int done = 0;
    while (done < 100) {
        Vec4 x{1, 2, 6, -11};
        for (int i = 0; i < 3; ++i) x[std::size_t(i)] += 0.4 * (2 * unit() - 1);
        auto s = web_roots(cubic, x);
        if (!s) continue;
        ++done;
        auto cc = concurrency_point(cubic.eval(s->roots[0]), cubic.eval(s->roots[1]),
                                    cubic.eval(s->roots[2]));
        CHECK(cc.kernel_dim == 1);
        CHECK(projective_distance(cc.point, s->x) < 1e-9);
    }
}

TEST_CASE("rank experiment on the reference cubic") {
    RankConfig cfg;
    cfg.samples = 220; // smaller run for the unit suite; acceptance runs 500
    RankResult rr = rank_estimate(reference_cubic(), cfg);
    CHECK(rr.kernel_dim == 3);
    CHECK(rr.separation >= 1e3);
    CHECK(rr.samples_used == 220);
    REQUIRE(int(rr.spectrum.size()) == rr.columns);

    // the incidence parameters alone are independent coordinates: the t-only
    // family has no kernel at any degree
    RankConfig pc = cfg;
    pc.basis = RelationBasis::CurveParameter;
    pc.samples = 80;
    RankResult pr = rank_estimate(reference_cubic(), pc);
    CHECK(pr.kernel_dim == 0);

    // degree 0: constants only, no relation
    RankConfig c0 = pc;
    c0.degree = 0;
    c0.samples = 60;
    RankResult r0 = rank_estimate(reference_cubic(), c0);
    CHECK(r0.kernel_dim == 0);

    // determinism: same seed, same spectrum bytes
    RankResult rr2 = rank_estimate(reference_cubic(), cfg);
    REQUIRE(rr.spectrum.size() == rr2.spectrum.size());
    for (std::size_t i = 0; i < rr.spectrum.size(); ++i)
        CHECK(rr.spectrum[i] == rr2.spectrum[i]);
}

TEST_CASE("trace diagnostics") {
    RankConfig cfg;
    cfg.samples = 220;
    ParamCurve cubic = reference_cubic();
    RankResult rr = rank_estimate(cubic, cfg);
    REQUIRE(rr.kernel_dim >= 1);
    TraceResult tr = trace_test(cubic, cfg, rr.kernel_vectors[0], rr);
    double kernel_level = rr.spectrum[rr.spectrum.size() - std::size_t(rr.kernel_dim)] /
                          rr.spectrum.front();
    CHECK(tr.max_residual <= 10 * kernel_level * tr.scale + 1e-9 * tr.scale);

    TraceResult ones = trace_test_global(cubic, cfg, {1.0});
    CHECK(ones.max_residual > 1e-3 * ones.scale);

    TraceResult zero = trace_test_global(cubic, cfg, {0.0});
    CHECK(zero.max_residual == 0.0);
}
