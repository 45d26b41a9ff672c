#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "legweb/poly.hpp"

namespace legweb::forms {

using legweb::Rat;
using sym::Poly;
using sym::SymbolId;

// Fixed coframe, in canonical wedge order.
enum Coframe : int { CF_W1 = 0, CF_W2 = 1, CF_TH = 2, CF_R0 = 3 };
inline constexpr int kCoframeWeight[4] = {1, 1, 2, 0};
inline constexpr const char* kCoframeName[4] = {"w1", "w2", "th", "r0"};

// Wedge monomial as a bitmask over the 4 coframe elements.
using Mask = std::uint8_t;

int mask_grade(Mask m);
int mask_weight(Mask m);
// 0 when the masks overlap, otherwise the sign of sorting a|b into canonical
// order.
int wedge_sign(Mask a, Mask b);
Mask make_mask(std::initializer_list<Coframe> elems);
std::string mask_str(Mask m);

// Exterior-algebra element over the coframe with Poly coefficients. Mixed
// grades are allowed; grade-5 truncation is automatic (only 4 generators).
class Form {
  public:
    Form() = default;
    static Form zero() { return Form(); }
    static Form scalar(const Poly& p);
    static Form coframe(Coframe c);
    static Form monomial(Mask m, const Poly& coef);

    bool is_zero() const { return comps_.empty(); }
    const std::map<Mask, Poly>& components() const { return comps_; }
    Poly coefficient(Mask m) const;

    Form operator+(const Form& o) const;
    Form operator-(const Form& o) const;
    Form operator-() const;
    Form& operator+=(const Form& o);
    Form& operator-=(const Form& o);
    Form operator*(const Poly& p) const; // scalar (grade-0) multiplication
    Form operator*(const Rat& c) const;
    bool operator==(const Form& o) const { return comps_ == o.comps_; }
    bool operator!=(const Form& o) const { return !(*this == o); }

    // -1 for the zero form; otherwise the grade if homogeneous, -2 if mixed.
    int grade() const;
    bool homogeneous_of_grade(int g) const;

    // Scaling weight of a form: poly weight minus wedge weight, when common
    // across all terms.
    std::variant<int, std::string> weight() const;

    Form substitute(const std::map<SymbolId, Poly>& bindings) const;
    std::vector<SymbolId> scalar_support() const;

    std::string str() const;

    void add(Mask m, const Poly& p);

  private:
    std::map<Mask, Poly> comps_;
};

Form wedge(const Form& a, const Form& b);
inline Form operator*(const Poly& p, const Form& f) { return f * p; }

// Extraction with canonical sign normalization (masks are canonical).
Poly extract(const Form& a, Mask monomial);

struct FreshRecord {
    SymbolId base;
    SymbolId created;
    int direction;
};

// Exterior derivatives of scalars and of the coframe. Symbols without an
// entry receive, on demand, a generic fresh entry
//   dX = -weight(X) X r0 + X_1 w1 + X_2 w2 + X_0 th
// and the creation is logged.
class DerivationTable {
  public:
    DerivationTable() = default;

    void set_entry(SymbolId s, const Form& df);
    bool has_entry(SymbolId s) const;
    const Form& entry(SymbolId s) const; // applies the fresh policy
    void set_coframe_d(const std::array<Form, 4>& d);
    const std::array<Form, 4>& coframe_d() const { return coframe_d_; }
    void set_fresh_enabled(bool on) { fresh_enabled_ = on; }

    const std::vector<FreshRecord>& fresh_log() const { return fresh_log_; }
    std::vector<SymbolId> entry_symbols() const;

  private:
    mutable std::unordered_map<SymbolId, Form> entries_;
    std::array<Form, 4> coframe_d_{};
    bool fresh_enabled_ = true;
    mutable std::vector<FreshRecord> fresh_log_;
};

// Exterior derivative: Leibniz over wedge, table entries on scalars, frozen
// coframe differentials on generators.
Form d(const Form& a, const DerivationTable& table);

// 4x4 matrix of forms with wedge-matrix multiplication.
struct MatrixForm {
    std::array<std::array<Form, 4>, 4> e{};

    Form& at(int i, int j) { return e[std::size_t(i)][std::size_t(j)]; }
    const Form& at(int i, int j) const { return e[std::size_t(i)][std::size_t(j)]; }

    MatrixForm operator+(const MatrixForm& o) const;
    MatrixForm operator-(const MatrixForm& o) const;
    bool operator==(const MatrixForm& o) const;
    bool is_zero() const;
    MatrixForm substitute(const std::map<SymbolId, Poly>& bindings) const;
    std::string str() const;
};

MatrixForm mwedge(const MatrixForm& a, const MatrixForm& b);
MatrixForm d(const MatrixForm& m, const DerivationTable& table);

// d(phi) + phi ^ phi.
MatrixForm mc_defect(const MatrixForm& phi, const DerivationTable& table);

// d(dphi) + dphi^phi + phi^dphi + dphi^dphi.
MatrixForm deformation_defect(const MatrixForm& phi, const MatrixForm& dphi,
                              const DerivationTable& table);

// d(d(x)) for a scalar symbol with a table entry.
Form ddzero_residual(SymbolId x, const DerivationTable& table);

// Coframe differentials forced by the vanishing of the defect entries in the
// tautological column: d w1 = -(phi^phi)[1][0], d w2 = -(phi^phi)[3][0],
// 2 d th = -(phi^phi)[2][0], d r0 = -(phi^phi)[0][0].
std::array<Form, 4> solve_coframe_differentials(const MatrixForm& phi);

// Form expression parser: poly syntax plus the coframe names w1, w2, th, r0
// combined multiplicatively (a*w1 means a wedge w1).
Form parse_form(const std::string& text);

} // namespace legweb::forms
