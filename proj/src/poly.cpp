#include "legweb/poly.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

namespace legweb::sym {

namespace {
constexpr int kMaxExponent = 1 << 16;

void check_exponent(long e) {
    if (e < 0) throw std::invalid_argument("negative exponent");
    if (e > kMaxExponent) throw std::overflow_error("monomial exponent overflow");
}
} // namespace

int Monomial::degree() const {
    int d = 0;
    for (auto& [s, e] : factors) d += e;
    return d;
}

int Monomial::degree_in(const std::vector<SymbolId>& vars) const {
    int d = 0;
    for (auto& [s, e] : factors)
        if (std::find(vars.begin(), vars.end(), s) != vars.end()) d += e;
    return d;
}

int Monomial::exponent_of(SymbolId s) const {
    for (auto& [t, e] : factors)
        if (t == s) return e;
    return 0;
}

bool Monomial::divides(const Monomial& other) const {
    for (auto& [s, e] : factors)
        if (other.exponent_of(s) < e) return false;
    return true;
}

Monomial Monomial::operator*(const Monomial& other) const {
    Monomial r;
    std::size_t i = 0, j = 0;
    while (i < factors.size() || j < other.factors.size()) {
        if (j == other.factors.size() ||
            (i < factors.size() && factors[i].first < other.factors[j].first)) {
            r.factors.push_back(factors[i++]);
        } else if (i == factors.size() || other.factors[j].first < factors[i].first) {
            r.factors.push_back(other.factors[j++]);
        } else {
            long e = long(factors[i].second) + other.factors[j].second;
            check_exponent(e);
            r.factors.emplace_back(factors[i].first, int(e));
            ++i, ++j;
        }
    }
    return r;
}

Monomial Monomial::operator/(const Monomial& other) const {
    Monomial r;
    std::size_t j = 0;
    for (auto& [s, e] : factors) {
        int sub = 0;
        while (j < other.factors.size() && other.factors[j].first < s) ++j;
        if (j < other.factors.size() && other.factors[j].first == s) sub = other.factors[j].second;
        if (sub > e) throw std::logic_error("monomial division not exact");
        if (e - sub > 0) r.factors.emplace_back(s, e - sub);
    }
    return r;
}

std::vector<std::pair<std::string, int>> monomial_named_factors(const Monomial& m) {
    std::vector<std::pair<std::string, int>> named;
    named.reserve(m.factors.size());
    for (auto& [s, e] : m.factors) named.emplace_back(symbol_name(s), e);
    std::sort(named.begin(), named.end());
    return named;
}

std::string Monomial::str() const {
    if (factors.empty()) return "1";
    std::ostringstream os;
    bool first = true;
    for (auto& [name, e] : monomial_named_factors(*this)) {
        if (!first) os << "*";
        first = false;
        os << name;
        if (e != 1) os << "^" << e;
    }
    return os.str();
}

bool MonoCmp::operator()(const Monomial& a, const Monomial& b) const {
    int da = a.degree(), db = b.degree();
    if (da != db) return da > db;
    std::size_t i = 0;
    while (i < a.factors.size() && i < b.factors.size()) {
        if (a.factors[i].first != b.factors[i].first)
            return a.factors[i].first < b.factors[i].first;
        if (a.factors[i].second != b.factors[i].second)
            return a.factors[i].second > b.factors[i].second;
        ++i;
    }
    return false; // equal degrees with identical prefix exhausts both
}

Poly Poly::constant(const Rat& c) {
    Poly p;
    if (!legweb::is_zero(c)) p.terms_.emplace(Monomial{}, c);
    return p;
}

Poly Poly::variable(SymbolId s, int exp) {
    check_exponent(exp);
    Poly p;
    if (exp == 0) return constant(1);
    Monomial m;
    m.factors.emplace_back(s, exp);
    p.terms_.emplace(std::move(m), rat(1));
    return p;
}

bool Poly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.factors.empty());
}

std::optional<Rat> Poly::as_constant() const {
    if (terms_.empty()) return rat(0);
    if (terms_.size() == 1 && terms_.begin()->first.factors.empty()) return terms_.begin()->second;
    return std::nullopt;
}

void Poly::add_term(const Monomial& m, const Rat& c) {
    if (legweb::is_zero(c)) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (legweb::is_zero(it->second)) terms_.erase(it);
    }
}

Poly Poly::operator-() const {
    Poly r;
    for (auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r = *this;
    r += o;
    return r;
}

Poly& Poly::operator+=(const Poly& o) {
    for (auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Poly Poly::operator-(const Poly& o) const {
    Poly r = *this;
    r -= o;
    return r;
}

Poly& Poly::operator-=(const Poly& o) {
    for (auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

Poly Poly::operator*(const Poly& o) const {
    Poly r;
    for (auto& [m1, c1] : terms_)
        for (auto& [m2, c2] : o.terms_) r.add_term(m1 * m2, c1 * c2);
    return r;
}

Poly Poly::operator*(const Rat& c) const {
    if (legweb::is_zero(c)) return Poly();
    Poly r;
    for (auto& [m, k] : terms_) r.terms_.emplace(m, k * c);
    return r;
}

Poly Poly::pow(int e) const {
    check_exponent(e);
    Poly acc = Poly::constant(1);
    Poly base = *this;
    while (e > 0) {
        if (e & 1) acc = acc * base;
        base = (e >>= 1) ? base * base : base;
    }
    return acc;
}

const Monomial& Poly::leading_monomial() const {
    if (terms_.empty()) throw std::logic_error("leading monomial of zero polynomial");
    return terms_.begin()->first;
}

Rat Poly::leading_coefficient() const {
    if (terms_.empty()) return rat(0);
    return terms_.begin()->second;
}

int Poly::total_degree() const {
    int d = -1;
    for (auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
}

int Poly::degree_in(SymbolId v) const {
    int d = 0;
    for (auto& [m, c] : terms_) d = std::max(d, m.exponent_of(v));
    return d;
}

int Poly::degree_in(const std::vector<SymbolId>& vars) const {
    int d = terms_.empty() ? -1 : 0;
    for (auto& [m, c] : terms_) d = std::max(d, m.degree_in(vars));
    return d;
}

bool Poly::contains_symbol(SymbolId s) const {
    for (auto& [m, c] : terms_)
        if (m.exponent_of(s) > 0) return true;
    return false;
}

std::vector<SymbolId> Poly::support() const {
    std::set<SymbolId> s;
    for (auto& [m, c] : terms_)
        for (auto& [sym, e] : m.factors) s.insert(sym);
    return {s.begin(), s.end()};
}

Poly Poly::substitute(const std::map<SymbolId, Poly>& bindings) const {
    // Reject cyclic binding sets: edge X -> Y when Y is bound and occurs in
    // the replacement of X.
    {
        std::map<SymbolId, int> state; // 0 unseen, 1 active, 2 done
        std::vector<SymbolId> stack;
        auto visit = [&](auto&& self, SymbolId x) -> void {
            state[x] = 1;
            auto it = bindings.find(x);
            if (it != bindings.end()) {
                for (SymbolId y : it->second.support()) {
                    if (!bindings.count(y)) continue;
                    if (state[y] == 1)
                        throw std::invalid_argument("cyclic binding set at symbol '" +
                                                    symbol_name(y) + "'");
                    if (state[y] == 0) self(self, y);
                }
            }
            state[x] = 2;
        };
        for (auto& [x, p] : bindings)
            if (state[x] == 0) visit(visit, x);
    }

    Poly result;
    for (auto& [m, c] : terms_) {
        Poly term = Poly::constant(c);
        for (auto& [s, e] : m.factors) {
            auto it = bindings.find(s);
            Poly base = (it != bindings.end()) ? it->second : Poly::variable(s);
            term = term * base.pow(e);
        }
        result += term;
    }
    return result;
}

Poly Poly::partial(SymbolId v) const {
    Poly r;
    for (auto& [m, c] : terms_) {
        int e = m.exponent_of(v);
        if (e == 0) continue;
        Monomial q;
        for (auto& [s, k] : m.factors) {
            if (s == v) {
                if (k > 1) q.factors.emplace_back(s, k - 1);
            } else {
                q.factors.emplace_back(s, k);
            }
        }
        r.add_term(q, c * rat(e));
    }
    return r;
}

std::vector<Poly> Poly::coefficients_in(SymbolId v) const {
    std::vector<Poly> out(std::size_t(degree_in(v)) + 1);
    for (auto& [m, c] : terms_) {
        int e = m.exponent_of(v);
        Monomial q;
        for (auto& [s, k] : m.factors)
            if (s != v) q.factors.emplace_back(s, k);
        out[std::size_t(e)].add_term(q, c);
    }
    return out;
}

Poly::Collected Poly::collect(const std::vector<SymbolId>& vars) const {
    Collected out;
    for (auto& [m, c] : terms_) {
        std::vector<int> key(vars.size(), 0);
        Monomial rest;
        for (auto& [s, e] : m.factors) {
            auto it = std::find(vars.begin(), vars.end(), s);
            if (it != vars.end())
                key[std::size_t(it - vars.begin())] = e;
            else
                rest.factors.emplace_back(s, e);
        }
        out.coefficients[key].add_term(rest, c);
        int d = 0;
        for (int e : key) d += e;
        out.degree = std::max(out.degree, d);
    }
    return out;
}

int monomial_weight(const Monomial& m) {
    int w = 0;
    auto& reg = SymbolRegistry::instance();
    for (auto& [s, e] : m.factors) w += reg.weight(s) * e;
    return w;
}

std::variant<int, Poly::WeightWitness> Poly::weight() const {
    if (terms_.empty()) return 0;
    auto it = terms_.begin();
    int w0 = monomial_weight(it->first);
    const Monomial& first = it->first;
    for (++it; it != terms_.end(); ++it) {
        int w = monomial_weight(it->first);
        if (w != w0) return WeightWitness{first, it->first, w0, w};
    }
    return w0;
}

std::string Poly::str() const {
    if (terms_.empty()) return "0";
    // Canonical order for serialization: degree descending, then name-lex on
    // the factor list. Independent of symbol registration order.
    std::vector<std::pair<const Monomial*, const Rat*>> order;
    order.reserve(terms_.size());
    for (auto& [m, c] : terms_) order.emplace_back(&m, &c);
    std::sort(order.begin(), order.end(), [](auto& a, auto& b) {
        int da = a.first->degree(), db = b.first->degree();
        if (da != db) return da > db;
        auto na = monomial_named_factors(*a.first);
        auto nb = monomial_named_factors(*b.first);
        for (std::size_t i = 0; i < na.size() && i < nb.size(); ++i) {
            if (na[i].first != nb[i].first) return na[i].first < nb[i].first;
            if (na[i].second != nb[i].second) return na[i].second > nb[i].second;
        }
        return na.size() < nb.size();
    });
    std::ostringstream os;
    bool first = true;
    for (auto& [mp, cp] : order) {
        const Monomial& m = *mp;
        const Rat& c = *cp;
        Rat a = c;
        if (first) {
            if (sgn(a) < 0) {
                os << "-";
                a = -a;
            }
        } else {
            os << (sgn(a) < 0 ? " - " : " + ");
            if (sgn(a) < 0) a = -a;
        }
        first = false;
        if (m.factors.empty()) {
            os << rat_to_string(a);
        } else {
            if (a != rat(1)) os << rat_to_string(a) << "*";
            os << m.str();
        }
    }
    return os.str();
}

bool proportional(const Poly& p, const Poly& q) {
    if (p.is_zero() || q.is_zero()) return p.is_zero() && q.is_zero();
    return p * q.leading_coefficient() == q * p.leading_coefficient();
}

std::optional<Poly> divide_exact(const Poly& num, const Poly& den) {
    if (den.is_zero()) return std::nullopt;
    Poly r = num;
    Poly q;
    const Monomial& dl = den.leading_monomial();
    const Rat dc = den.leading_coefficient();
    while (!r.is_zero()) {
        const Monomial& rl = r.leading_monomial();
        if (!dl.divides(rl)) return std::nullopt;
        Monomial qm = rl / dl;
        Rat qc = r.leading_coefficient() / dc;
        Poly step;
        step.add_term(qm, qc);
        q += step;
        r -= step * den;
    }
    return q;
}

// ---------------------------------------------------------------------------
// Expression parser

namespace {

struct Parser {
    const std::string& s;
    std::size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

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

    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw std::invalid_argument("parse error at offset " + std::to_string(pos) + " in '" + s +
                                    "': " + msg);
    }

    Poly parse_expr() {
        Poly acc = parse_term();
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

    Poly parse_term() {
        Poly acc = parse_factor();
        while (eat('*')) acc = acc * parse_factor();
        return acc;
    }

    Poly parse_factor() {
        Poly base = parse_primary();
        if (eat('^')) {
            skip_ws();
            std::size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (start == pos) fail("expected integer exponent");
            base = base.pow(std::stoi(s.substr(start, pos - start)));
        }
        return base;
    }

    Poly parse_primary() {
        skip_ws();
        if (eat('(')) {
            Poly inner = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (eat('-')) return -parse_primary();
        if (eat('+')) return parse_primary();
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num = read_digits();
            if (peek() == '/') {
                std::size_t save = pos;
                ++pos;
                skip_ws();
                if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
                    std::string den = read_digits();
                    return Poly::constant(rat_from_string(num + "/" + den));
                }
                pos = save;
            }
            return Poly::constant(rat_from_string(num));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                ++pos;
            return Poly::variable(intern(s.substr(start, pos - start)));
        }
        fail("unexpected character");
    }

    std::string read_digits() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        return s.substr(start, pos - start);
    }
};

} // namespace

Poly parse_poly(const std::string& text) {
    Parser p(text);
    Poly out = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return out;
}

} // namespace legweb::sym
