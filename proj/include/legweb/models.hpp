#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "legweb/dataload.hpp"
#include "legweb/form.hpp"
#include "legweb/report.hpp"

namespace legweb::models {

using forms::DerivationTable;
using forms::Form;
using forms::MatrixForm;
using sym::Poly;
using sym::SymbolId;

// Block shape of the symplectic algebra: beta and gamma blocks symmetric,
// lower-right block the negative transpose of the upper-left.
struct ShapeResult {
    bool pass = false;
    std::string witness; // first failing entry and its discrepancy
};
ShapeResult check_sp2(const MatrixForm& m);

struct Model {
    MatrixForm phi;
    DerivationTable table; // scalar entries plus solved coframe differentials
    std::map<std::string, Poly> binds;
    std::vector<SymbolId> modtheta_fresh;
    std::map<std::string, std::array<Poly, 4>> points;
};

// Normalized model of a generic linear Legendrian 3-web. With impose_b00 the
// dependent theta-derivative of B0 is bound to its relation; without it the
// coefficient stays a free symbol.
Model load_normalized_model(bool impose_b00 = true);

// The same matrix with every invariant sent to zero (homogeneous model).
Model flat_model();

// Hyperplane-section model, written in the web torsions R, S, T.
Model build_hyperplane_model();

// Abstract 3-web coframe equations (R, S, T, L, K).
DerivationTable load_web_coframe();

// Deformed connection of the exceptional web, modulo a0^2 = 2R. The a0
// derivative is not part of the data; verify_phi_prime solves for it.
Model load_cubic_dual_raw();

// Rewrite a0^2 -> 2R (normal form modulo the defining relation).
Poly reduce_a0sq(const Poly& p);
Form reduce_a0sq(const Form& f);

// Exact solve of symbols that occur linearly with rational coefficients.
struct LinearSolve {
    bool consistent = true;
    bool solved_all = false;
    std::map<SymbolId, Poly> solution;
    std::vector<std::string> conflicts;
};
LinearSolve solve_linear_symbols(const std::vector<Poly>& equations,
                                 const std::vector<SymbolId>& unknowns);

// Weight-homogeneity audit of every table entry / matrix entry.
std::vector<std::string> validate_table_weights(const DerivationTable& t);
std::vector<std::string> validate_matrix_weights(const MatrixForm& m);

struct PhiPrimeResult {
    bool shape_ok = false;
    bool defect_ok = false;       // all 16 entries vanish mod the relation
    bool consistent_solve = true; // one da0 satisfies every component
    Form da0;
    std::vector<std::string> conflicts;
    std::vector<std::string> residuals; // nonzero entries, serialized
    bool torsion_ok = false;            // S = -T = 2R and matching R slots
    Poly S_val, T_val, R_val1, R_val2;
    Model completed; // table includes the solved a0 entry
};
PhiPrimeResult verify_phi_prime();

struct QuadricsResult {
    bool evaluations_ok = false; // 9 point evaluations vanish mod the relation
    std::array<std::array<bool, 3>, 3> eval_ok{}; // [quadric][point]
    std::vector<std::string> evaluation_failures;
    bool legendrian_ok = false; // each ruling point traces a Legendrian curve
    std::vector<std::string> legendrian_residuals;
    bool covariant_ok = false; // d of each quadric stays in the span
    std::vector<std::string> covariant_residuals;
    std::vector<std::string> lambda; // connection coefficients as num/den text
};
QuadricsResult verify_quadrics();

struct PlanesResult {
    bool kernel_is_z0 = false;
    std::string kernel; // kernel vector, serialized
    bool perturbation_moves_kernel = false;
    int degenerate_kernel_dim = 0; // at a0 = 0
};
PlanesResult intersect_planes_check();

// Suite runners used by the CLI and the acceptance tests.
void run_structure_suite(report::Report& rep);
void run_maxrank_suite(report::Report& rep);
void run_cubic_suite(report::Report& rep);

} // namespace legweb::models
