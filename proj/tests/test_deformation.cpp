#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "legweb/deformation.hpp"

using namespace legweb;
using namespace legweb::deform;
using sym::Poly;

TEST_CASE("closure of the deformation structure equations") {
    const Pipeline& pl = pipeline();
    INFO((pl.closure.residuals.empty() ? std::string("no residuals")
                                       : pl.closure.residuals.front()));
    CHECK(pl.closure.solve_consistent);
    CHECK(pl.closure.theta_wedge_ok);
    CHECK(pl.closure.delta_components_ok);
    CHECK(pl.closure.dd_a0_ok);
    CHECK(pl.closure.trivial_ok);
    CHECK(pl.closure.da0_leading_ok);
    CHECK(pl.closure.idempotent_ok);
    CHECK(pl.closure.closed_ok);
    CHECK(pl.closure.span_ok);
}

TEST_CASE("solved theta derivatives match the quoted leading parts") {
    const Pipeline& pl = pipeline();
    CHECK(pl.closure.lead_b1_0_ok);
    CHECK(pl.closure.rem_b1_0_ok);
    CHECK(pl.closure.lead_b3_0_ok);
    CHECK(pl.closure.rem_b3_0_ok);
    CHECK(pl.closure.lead_c9_ok);
    CHECK(pl.closure.rem_c9_ok);
}

TEST_CASE("compatibility system: degrees, leading parts, weights") {
    const CompatSystem& cs = compat_system();
    for (auto& n : cs.notes) MESSAGE(n);
    CHECK(cs.deg_b1 == 4);
    CHECK(cs.deg_b3 == 4);
    CHECK(cs.deg_quintic == 5);
    CHECK(cs.deg_quartic == 4);
    CHECK(cs.lead_b1_ok);
    CHECK(cs.lead_b3_ok);
    CHECK(cs.lead_quintic_ok);
    CHECK(cs.lead_quartic_ok);
    CHECK(cs.leads_fresh_free);
    CHECK(cs.weights_ok);
    CHECK(cs.ddb1_other_components_zero);
    CHECK(cs.delta01_in_ideal);
    CHECK(cs.delta03_in_ideal);
}

TEST_CASE("flat point: reduction, solve, bounds") {
    FlatReduce fr = flat_reduce();
    for (int i = 0; i < 3; ++i) {
        INFO("poly ", i, ": ", fr.polys[std::size_t(i)].str());
        CHECK(fr.proportional_ok[std::size_t(i)]);
    }
    FlatSolve fs = flat_solve();
    CHECK(fs.only_origin);
    CHECK(fs.certificate_ok);
    CHECK(fs.grid_ok);
    CHECK(fs.drop_one_positive_dim);

    Bounds b = bounds();
    CHECK(b.all_webs == 81);
    CHECK(b.nonzero_invariant == 65);
    CHECK(b.no_common_linear_factor);
}

TEST_CASE("rigidity at a flat point") {
    Rigidity rg = rigidity_check(rigidity_theorem_orders());
    for (auto& s : rg.surviving) MESSAGE("surviving: ", s);
    CHECK(rg.matches_flat);
}

TEST_CASE("compat system golden snapshots") {
    const CompatSystem& cs = compat_system();
    struct Item {
        const char* file;
        const Poly* poly;
    } items[] = {
        {"compat_eq_b1.txt", &cs.eq_b1},
        {"compat_eq_b3.txt", &cs.eq_b3},
        {"compat_eq_quintic.txt", &cs.eq_quintic},
        {"compat_eq_quartic.txt", &cs.eq_quartic},
    };
    const std::string dir = std::string(LEGWEB_DATA_DIR) + "/../tests/golden/";
    const bool update = std::getenv("LEGWEB_UPDATE_GOLDEN") != nullptr;
    for (auto& it : items) {
        std::string path = dir + it.file;
        if (update) {
            std::ofstream out(path);
            out << it.poly->str() << "\n";
            continue;
        }
        std::ifstream in(path);
        REQUIRE_MESSAGE(in.good(), "missing golden file ", path,
                        " (set LEGWEB_UPDATE_GOLDEN=1 to create)");
        std::string text;
        std::getline(in, text);
        CHECK_MESSAGE(text == it.poly->str(), "snapshot drift in ", it.file);
    }
}
