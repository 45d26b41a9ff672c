#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "legweb/elim.hpp"
#include "legweb/models.hpp"
#include "legweb/report.hpp"

namespace legweb::deform {

using forms::DerivationTable;
using forms::Form;
using forms::MatrixForm;
using sym::Poly;
using sym::SymbolId;

struct ClosureReport {
    bool theta_wedge_ok = false; // the three defect-wedge equations after step 0 only
    bool delta_components_ok = false; // (1,3), (3,1), (1,1) vanish after the chain
    bool dd_a0_ok = false;
    bool solve_consistent = false;
    std::vector<std::string> residuals;
    bool trivial_ok = false;     // chained delta vanishes at a0 = b1 = b3 = 0
    bool da0_leading_ok = false; // d a0 = -4(b1 w1 - b3 w2) mod theta, a0
    bool idempotent_ok = false;
    bool closed_ok = false; // a0, b1, b3 derivatives involve no other deformation symbols
    bool span_ok = false;   // w1/w2 coefficients of delta span <a0, b1, b3>
    // solved theta-derivatives and closure coefficient
    Poly b1_0, b3_0, c9;
    bool lead_b1_0_ok = false, lead_b3_0_ok = false, lead_c9_ok = false;
    bool rem_b1_0_ok = false, rem_b3_0_ok = false, rem_c9_ok = false;
    std::string lead_notes;
};

struct Pipeline {
    models::Model base;  // normalized model with the b0-theta relation imposed
    MatrixForm delta_raw;
    MatrixForm delta; // fully chained
    std::vector<std::pair<SymbolId, Poly>> chain;
    DerivationTable table; // invariants plus closed a0/b1/b3 entries
    ClosureReport closure;
    std::map<std::string, Poly> leads;
};

// Built once per process; every subsequent query reuses it.
const Pipeline& pipeline();

// Sequential application of the (acyclic) chain until no bound symbol is left.
Poly apply_chain(const Poly& p, const std::vector<std::pair<SymbolId, Poly>>& chain);
Form apply_chain(const Form& f, const std::vector<std::pair<SymbolId, Poly>>& chain);

struct CompatSystem {
    Poly eq_b1, eq_b3, eq_quintic, eq_quartic;
    std::string quintic_source, quartic_source; // defect component provenance
    int deg_b1 = 0, deg_b3 = 0, deg_quintic = 0, deg_quartic = 0;
    bool degrees_ok = false;
    bool lead_b1_ok = false, lead_b3_ok = false;
    bool lead_quintic_ok = false, lead_quartic_ok = false;
    bool leads_fresh_free = false;
    bool polys_fresh_free = false;
    int w_b1 = 0, w_b3 = 0, w_quintic = 0, w_quartic = 0;
    bool weights_ok = false;
    bool ddb1_other_components_zero = false;
    bool delta01_in_ideal = false, delta03_in_ideal = false;
    std::vector<std::string> notes;
};
const CompatSystem& compat_system();

// Remainder and cofactors of division by the pair (eq_b1 killing b1^2, eq_b3
// killing b3^2): p = u eq1 + v eq3 + remainder.
struct PairReduction {
    Poly remainder, u, v;
};
PairReduction reduce_mod_pair(const Poly& p, const Poly& eq1, const Poly& eq3);

// Ideal membership via division, trying both reduction orientations.
bool pair_membership(const Poly& p, const Poly& eq1, const Poly& eq3);

// Flat-point evaluation: every symbol other than a0, b1, b3 goes to zero.
Poly flatten(const Poly& p);

struct FlatReduce {
    std::array<Poly, 3> polys; // eq_b1 - eq_b3, eq_b1, eq_quintic at the flat point
    std::array<bool, 3> proportional_ok{};
    std::array<std::string, 3> expected;
};
FlatReduce flat_reduce();

struct FlatSolve {
    sym::RootDescription roots;
    bool only_origin = false;
    bool certificate_ok = false;
    bool grid_ok = false;
    bool drop_one_positive_dim = false; // dropping the quintic leaves a curve
};
FlatSolve flat_solve();

struct Bounds {
    int all_webs = 0, nonzero_invariant = 0;
    bool expected_ok = false;       // (81, 65)
    bool no_common_linear_factor = false;
};
Bounds bounds();

struct Rigidity {
    bool matches_flat = false;
    std::vector<std::string> surviving; // non-flat terms left by the vanishing orders
};
Rigidity rigidity_check(const std::map<SymbolId, int>& vanishing_orders);

// The vanishing orders of the flat-point rigidity theorem. Order n zeroes the
// symbol and its registered derivatives of order < n.
std::map<SymbolId, int> rigidity_theorem_orders();

void run_deformation_suite(report::Report& rep);

} // namespace legweb::deform
