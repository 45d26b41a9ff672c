#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "legweb/poly.hpp"

namespace legweb::sym {

// Resultant of f and g with respect to v (Sylvester determinant, computed
// fraction-free). Throws if either polynomial is zero.
Poly resultant(const Poly& f, const Poly& g, SymbolId v);

// Monic gcd in Q[v]; both inputs must be univariate in v.
Poly gcd_univariate(const Poly& a, const Poly& b, SymbolId v);

// Exact polynomial square root, if one exists.
std::optional<Poly> poly_sqrt(const Poly& p);

// All rational roots (with multiplicity stripped) of a univariate p over Q.
std::vector<Rat> rational_roots(const Poly& p, SymbolId v);

// Numeric roots of a univariate polynomial with rational coefficients
// (Durand-Kerner; used only to report non-rational eliminant roots).
std::vector<std::complex<double>> numeric_roots(const Poly& p, SymbolId v);

// Zero-set preserving factor split. Degree <= 2 in each main variable is
// split when the discriminant is an exact square; monomial and rational
// content are stripped; full factorization over Q for univariate inputs.
std::vector<Poly> factor_for_elim(const Poly& p, const std::vector<SymbolId>& vars);

struct RootPoint {
    std::map<SymbolId, Rat> coords;
    bool exact = true;
    std::map<SymbolId, std::complex<double>> approx; // set when exact = false
    bool operator==(const RootPoint& o) const { return coords == o.coords && exact == o.exact; }
};

// Positive-dimensional solution component: defining equations after the
// triangular bindings of the branch were folded back in.
struct Component {
    std::vector<Poly> equations;
    int dimension = 0;
};

struct ElimStep {
    std::string kind;   // "factor", "branch", "bind", "eliminant", "infeasible", ...
    std::string detail; // canonical text payload
};

struct RootDescription {
    bool zero_dimensional = false;
    std::vector<RootPoint> points;
    std::vector<Component> components;
    std::vector<ElimStep> trace;
    std::vector<std::string> notes;
};

struct ElimOptions {
    std::size_t max_branches = 4096;
};

// Common complex zero set of a small polynomial system in the given
// variables; symbols outside `vars` act as parameters. Positive-dimensional
// parts are reported as components, never dropped.
RootDescription eliminate(const std::vector<Poly>& system, const std::vector<SymbolId>& vars,
                          const ElimOptions& opts = {});

// Replays the certificate: every reported point must satisfy the system, and
// every component's equations must divide a system member's branch.
bool verify_root_description(const RootDescription& desc, const std::vector<Poly>& system,
                             std::string* why = nullptr);

} // namespace legweb::sym
