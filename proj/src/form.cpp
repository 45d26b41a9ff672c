#include "legweb/form.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

namespace legweb::forms {

int mask_grade(Mask m) { return std::popcount(unsigned(m)); }

int mask_weight(Mask m) {
    int w = 0;
    for (int i = 0; i < 4; ++i)
        if (m & (1u << i)) w += kCoframeWeight[i];
    return w;
}

int wedge_sign(Mask a, Mask b) {
    if (a & b) return 0;
    // count inversions: pairs (i in a, j in b) with i > j
    int inv = 0;
    for (int i = 0; i < 4; ++i) {
        if (!(a & (1u << i))) continue;
        for (int j = 0; j < i; ++j)
            if (b & (1u << j)) ++inv;
    }
    return (inv % 2) ? -1 : 1;
}

Mask make_mask(std::initializer_list<Coframe> elems) {
    Mask m = 0;
    for (Coframe c : elems) {
        if (m & (1u << c)) throw std::invalid_argument("repeated coframe element in wedge");
        m |= Mask(1u << c);
    }
    return m;
}

std::string mask_str(Mask m) {
    if (m == 0) return "1";
    std::string out;
    for (int i = 0; i < 4; ++i) {
        if (m & (1u << i)) {
            if (!out.empty()) out += ".";
            out += kCoframeName[i];
        }
    }
    return out;
}

Form Form::scalar(const Poly& p) {
    Form f;
    f.add(0, p);
    return f;
}

Form Form::coframe(Coframe c) {
    Form f;
    f.add(Mask(1u << c), Poly::constant(1));
    return f;
}

Form Form::monomial(Mask m, const Poly& coef) {
    Form f;
    f.add(m, coef);
    return f;
}

Poly Form::coefficient(Mask m) const {
    auto it = comps_.find(m);
    return it == comps_.end() ? Poly::zero() : it->second;
}

void Form::add(Mask m, const Poly& p) {
    if (p.is_zero()) return;
    auto [it, inserted] = comps_.emplace(m, p);
    if (!inserted) {
        it->second += p;
        if (it->second.is_zero()) comps_.erase(it);
    }
}

Form Form::operator+(const Form& o) const {
    Form r = *this;
    r += o;
    return r;
}

Form& Form::operator+=(const Form& o) {
    for (auto& [m, p] : o.comps_) add(m, p);
    return *this;
}

Form Form::operator-(const Form& o) const {
    Form r = *this;
    r -= o;
    return r;
}

Form& Form::operator-=(const Form& o) {
    for (auto& [m, p] : o.comps_) add(m, -p);
    return *this;
}

Form Form::operator-() const {
    Form r;
    for (auto& [m, p] : comps_) r.comps_.emplace(m, -p);
    return r;
}

Form Form::operator*(const Poly& p) const {
    Form r;
    for (auto& [m, q] : comps_) r.add(m, q * p);
    return r;
}

Form Form::operator*(const Rat& c) const { return *this * Poly::constant(c); }

int Form::grade() const {
    if (comps_.empty()) return -1;
    int g = mask_grade(comps_.begin()->first);
    for (auto& [m, p] : comps_)
        if (mask_grade(m) != g) return -2;
    return g;
}

bool Form::homogeneous_of_grade(int g) const {
    for (auto& [m, p] : comps_)
        if (mask_grade(m) != g) return false;
    return true;
}

std::variant<int, std::string> Form::weight() const {
    std::optional<int> w;
    for (auto& [m, p] : comps_) {
        auto pw = p.weight();
        if (std::holds_alternative<Poly::WeightWitness>(pw)) {
            auto& ww = std::get<Poly::WeightWitness>(pw);
            return std::string("inhomogeneous coefficient of ") + mask_str(m) + ": " +
                   ww.a.str() + " (w=" + std::to_string(ww.weight_a) + ") vs " + ww.b.str() +
                   " (w=" + std::to_string(ww.weight_b) + ")";
        }
        if (p.is_zero()) continue;
        int fw = std::get<int>(pw) - mask_weight(m);
        if (!w)
            w = fw;
        else if (*w != fw)
            return std::string("mixed form weight ") + std::to_string(*w) + " vs " +
                   std::to_string(fw) + " at " + mask_str(m);
    }
    return w.value_or(0);
}

Form Form::substitute(const std::map<SymbolId, Poly>& bindings) const {
    Form r;
    for (auto& [m, p] : comps_) r.add(m, p.substitute(bindings));
    return r;
}

std::vector<SymbolId> Form::scalar_support() const {
    std::set<SymbolId> s;
    for (auto& [m, p] : comps_)
        for (SymbolId x : p.support()) s.insert(x);
    return {s.begin(), s.end()};
}

std::string Form::str() const {
    if (comps_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [m, p] : comps_) {
        if (!first) os << " + ";
        first = false;
        if (m == 0)
            os << "(" << p.str() << ")";
        else
            os << "(" << p.str() << ")*" << mask_str(m);
    }
    return os.str();
}

Form wedge(const Form& a, const Form& b) {
    Form r;
    for (auto& [ma, pa] : a.components()) {
        for (auto& [mb, pb] : b.components()) {
            int s = wedge_sign(ma, mb);
            if (s == 0) continue;
            Poly c = pa * pb;
            if (s < 0) c = -c;
            r.add(Mask(ma | mb), c);
        }
    }
    return r;
}

Poly extract(const Form& a, Mask monomial) { return a.coefficient(monomial); }

void DerivationTable::set_entry(SymbolId s, const Form& df) { entries_[s] = df; }

bool DerivationTable::has_entry(SymbolId s) const { return entries_.count(s) > 0; }

const Form& DerivationTable::entry(SymbolId s) const {
    auto it = entries_.find(s);
    if (it != entries_.end()) return it->second;
    if (!fresh_enabled_)
        throw std::logic_error("no derivation entry for symbol '" + sym::symbol_name(s) +
                               "' and fresh policy disabled");
    auto& reg = sym::SymbolRegistry::instance();
    int w = reg.weight(s); // weight must be known to build the generic entry
    Form df = Form::monomial(Mask(1u << CF_R0), Poly::variable(s) * rat(-w));
    const int dirs[3] = {1, 2, 0};
    const Coframe cfs[3] = {CF_W1, CF_W2, CF_TH};
    for (int k = 0; k < 3; ++k) {
        SymbolId ds = reg.derivative(s, dirs[k], sym::Origin::FreshDerivative);
        fresh_log_.push_back(FreshRecord{s, ds, dirs[k]});
        df.add(Mask(1u << cfs[k]), Poly::variable(ds));
    }
    auto [jt, ok] = entries_.emplace(s, std::move(df));
    return jt->second;
}

void DerivationTable::set_coframe_d(const std::array<Form, 4>& d) { coframe_d_ = d; }

std::vector<SymbolId> DerivationTable::entry_symbols() const {
    std::vector<SymbolId> out;
    for (auto& [s, f] : entries_) out.push_back(s);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// d of a pure wedge monomial via Leibniz on its factors.
Form d_mask(Mask m, const DerivationTable& table) {
    Form r;
    int sign = 1;
    for (int i = 0; i < 4; ++i) {
        if (!(m & (1u << i))) continue;
        Mask rest = Mask(m & ~(1u << i));
        Form piece = wedge(table.coframe_d()[std::size_t(i)],
                           Form::monomial(rest, Poly::constant(1)));
        r += (sign > 0) ? piece : -piece;
        sign = -sign;
    }
    return r;
}

Form d_scalar(const Poly& p, const DerivationTable& table) {
    Form r;
    for (SymbolId s : p.support()) {
        Poly dp = p.partial(s);
        if (dp.is_zero()) continue;
        r += table.entry(s) * dp;
    }
    return r;
}

} // namespace

Form d(const Form& a, const DerivationTable& table) {
    Form r;
    for (auto& [m, p] : a.components()) {
        r += wedge(d_scalar(p, table), Form::monomial(m, Poly::constant(1)));
        r += d_mask(m, table) * p;
    }
    return r;
}

MatrixForm MatrixForm::operator+(const MatrixForm& o) const {
    MatrixForm r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.at(i, j) = at(i, j) + o.at(i, j);
    return r;
}

MatrixForm MatrixForm::operator-(const MatrixForm& o) const {
    MatrixForm r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.at(i, j) = at(i, j) - o.at(i, j);
    return r;
}

bool MatrixForm::operator==(const MatrixForm& o) const {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (!(at(i, j) == o.at(i, j))) return false;
    return true;
}

bool MatrixForm::is_zero() const {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (!at(i, j).is_zero()) return false;
    return true;
}

MatrixForm MatrixForm::substitute(const std::map<SymbolId, Poly>& bindings) const {
    MatrixForm r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.at(i, j) = at(i, j).substitute(bindings);
    return r;
}

std::string MatrixForm::str() const {
    std::ostringstream os;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (!at(i, j).is_zero())
                os << "[" << i << "][" << j << "] = " << at(i, j).str() << "\n";
    return os.str();
}

MatrixForm mwedge(const MatrixForm& a, const MatrixForm& b) {
    MatrixForm r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Form acc;
            for (int k = 0; k < 4; ++k) acc += wedge(a.at(i, k), b.at(k, j));
            r.at(i, j) = std::move(acc);
        }
    return r;
}

MatrixForm d(const MatrixForm& m, const DerivationTable& table) {
    MatrixForm r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.at(i, j) = d(m.at(i, j), table);
    return r;
}

MatrixForm mc_defect(const MatrixForm& phi, const DerivationTable& table) {
    return d(phi, table) + mwedge(phi, phi);
}

MatrixForm deformation_defect(const MatrixForm& phi, const MatrixForm& dphi,
                              const DerivationTable& table) {
    return d(dphi, table) + mwedge(dphi, phi) + mwedge(phi, dphi) + mwedge(dphi, dphi);
}

Form ddzero_residual(SymbolId x, const DerivationTable& table) {
    return d(table.entry(x), table);
}

std::array<Form, 4> solve_coframe_differentials(const MatrixForm& phi) {
    MatrixForm pp = mwedge(phi, phi);
    std::array<Form, 4> out;
    out[CF_W1] = -pp.at(1, 0);
    out[CF_W2] = -pp.at(3, 0);
    out[CF_TH] = -(pp.at(2, 0) * rat(1, 2));
    out[CF_R0] = -pp.at(0, 0);
    return out;
}

// ---------------------------------------------------------------------------
// Form parser: reuse the poly tokenizer by splitting on wedge-free structure.
// Accepted syntax: sums of products where each product may contain at most
// the coframe names as factors (in any position); '.' also acts as a wedge
// between coframe names for the serialized format.

namespace {

int coframe_index(const std::string& name) {
    for (int i = 0; i < 4; ++i)
        if (name == kCoframeName[i]) return i;
    return -1;
}

struct FormParser {
    const std::string& s;
    std::size_t pos = 0;
    explicit FormParser(const std::string& t) : s(t) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw std::invalid_argument("form parse error at " + std::to_string(pos) + " in '" + s +
                                    "': " + msg);
    }

    Form parse_expr() {
        Form acc = parse_term();
        while (true) {
            if (eat('+'))
                acc += parse_term();
            else if (eat('-'))
                acc -= parse_term();
            else
                break;
        }
        return acc;
    }

    Form parse_term() {
        Form acc = parse_factor();
        while (true) {
            skip_ws();
            if (pos < s.size() && (s[pos] == '*' || s[pos] == '.')) {
                ++pos;
                acc = wedge(acc, parse_factor());
            } else {
                break;
            }
        }
        return acc;
    }

    Form parse_factor() {
        Form base = parse_primary();
        if (eat('^')) {
            skip_ws();
            std::size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (start == pos) fail("expected exponent");
            int e = std::stoi(s.substr(start, pos - start));
            auto scalar = base.coefficient(0);
            if (!base.homogeneous_of_grade(0)) fail("exponent on non-scalar form");
            base = Form::scalar(scalar.pow(e));
        }
        return base;
    }

    Form parse_primary() {
        skip_ws();
        if (eat('(')) {
            Form inner = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (eat('-')) return -parse_primary();
        if (eat('+')) return parse_primary();
        if (pos >= s.size()) fail("unexpected end");
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            std::string num = s.substr(start, pos - start);
            skip_ws();
            if (pos < s.size() && s[pos] == '/') {
                std::size_t save = pos;
                ++pos;
                skip_ws();
                if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
                    std::size_t dstart = pos;
                    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
                        ++pos;
                    return Form::scalar(Poly::constant(
                        rat_from_string(num + "/" + s.substr(dstart, pos - dstart))));
                }
                pos = save;
            }
            return Form::scalar(Poly::constant(rat_from_string(num)));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                ++pos;
            std::string name = s.substr(start, pos - start);
            int cf = coframe_index(name);
            if (cf >= 0) return Form::coframe(Coframe(cf));
            return Form::scalar(Poly::variable(sym::intern(name)));
        }
        fail("unexpected character");
    }
};

} // namespace

Form parse_form(const std::string& text) {
    FormParser p(text);
    Form out = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return out;
}

} // namespace legweb::forms
