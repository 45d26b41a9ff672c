#include "legweb/elim.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace legweb::sym {

namespace {

std::vector<Poly> sylvester_free_coeffs(const Poly& p, SymbolId v) { return p.coefficients_in(v); }

// Fraction-free determinant (Bareiss). Entries are exact polys; every
// division in the sweep is exact over an integral domain.
Poly bareiss_det(std::vector<std::vector<Poly>> m) {
    const std::size_t n = m.size();
    if (n == 0) return Poly::constant(1);
    Poly prev = Poly::constant(1);
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k].is_zero()) {
            std::size_t swap_row = k + 1;
            while (swap_row < n && m[swap_row][k].is_zero()) ++swap_row;
            if (swap_row == n) return Poly::zero();
            std::swap(m[k], m[swap_row]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                Poly num = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                auto q = divide_exact(num, prev);
                if (!q) throw std::logic_error("bareiss: inexact division");
                m[i][j] = *q;
            }
            m[i][k] = Poly::zero();
        }
        prev = m[k][k];
    }
    Poly det = m[n - 1][n - 1];
    return sign < 0 ? -det : det;
}

} // namespace

Poly resultant(const Poly& f, const Poly& g, SymbolId v) {
    if (f.is_zero() || g.is_zero()) throw std::invalid_argument("resultant of zero polynomial");
    auto a = sylvester_free_coeffs(f, v);
    auto b = sylvester_free_coeffs(g, v);
    const std::size_t m = a.size() - 1, n = b.size() - 1;
    if (m == 0 && n == 0) return Poly::constant(1);
    if (m == 0) return a[0].pow(int(n));
    if (n == 0) return b[0].pow(int(m));
    const std::size_t dim = m + n;
    std::vector<std::vector<Poly>> s(dim, std::vector<Poly>(dim, Poly::zero()));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c <= m; ++c) s[r][r + c] = a[m - c];
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c <= n; ++c) s[n + r][r + c] = b[n - c];
    return bareiss_det(std::move(s));
}

Poly gcd_univariate(const Poly& a, const Poly& b, SymbolId v) {
    auto check = [&](const Poly& p) {
        for (SymbolId s : p.support())
            if (s != v) throw std::invalid_argument("gcd_univariate: not univariate in " +
                                                    symbol_name(v) + ": " + p.str());
    };
    check(a);
    check(b);
    Poly x = a, y = b;
    while (!y.is_zero()) {
        // remainder of x by y in Q[v]
        Poly r = x;
        auto yc = y.coefficients_in(v);
        int dy = int(yc.size()) - 1;
        Rat ylc = yc[std::size_t(dy)].leading_coefficient();
        while (!r.is_zero() && r.degree_in(v) >= dy) {
            auto rc = r.coefficients_in(v);
            int dr = int(rc.size()) - 1;
            Rat c = rc[std::size_t(dr)].leading_coefficient() / ylc;
            r -= y * Poly::variable(v, dr - dy) * c;
        }
        x = y;
        y = r;
    }
    if (x.is_zero()) return x;
    // monic normalization
    auto xc = x.coefficients_in(v);
    Rat lc = xc.back().leading_coefficient();
    return x * (rat(1) / lc);
}

std::optional<Poly> poly_sqrt(const Poly& p) {
    if (p.is_zero()) return Poly::zero();
    // Greedy leading-term descent: s_{k+1} = s_k + lt(p - s_k^2) / (2 lt(s_k)).
    const Monomial& lm = p.leading_monomial();
    Monomial half;
    for (auto& [s, e] : lm.factors) {
        if (e % 2) return std::nullopt;
        half.factors.emplace_back(s, e / 2);
    }
    Rat lc = p.leading_coefficient();
    if (sgn(lc) < 0) return std::nullopt;
    mpz_class num_root, den_root;
    if (!mpz_perfect_square_p(lc.get_num().get_mpz_t()) ||
        !mpz_perfect_square_p(lc.get_den().get_mpz_t()))
        return std::nullopt;
    mpz_sqrt(num_root.get_mpz_t(), lc.get_num().get_mpz_t());
    mpz_sqrt(den_root.get_mpz_t(), lc.get_den().get_mpz_t());
    Poly s;
    s.add_term(half, Rat(num_root, den_root));
    for (std::size_t guard = 0; guard < 4 * p.term_count() + 8; ++guard) {
        Poly r = p - s * s;
        if (r.is_zero()) return s;
        const Monomial& rl = r.leading_monomial();
        Monomial sl = s.leading_monomial();
        if (!sl.divides(rl)) return std::nullopt;
        Poly corr;
        corr.add_term(rl / sl, r.leading_coefficient() / (rat(2) * s.leading_coefficient()));
        s += corr;
    }
    return std::nullopt;
}

std::vector<Rat> rational_roots(const Poly& p, SymbolId v) {
    for (SymbolId s : p.support())
        if (s != v)
            throw std::invalid_argument("rational_roots: polynomial not univariate in " +
                                        symbol_name(v));
    std::vector<Rat> roots;
    Poly q = p;
    if (q.is_zero()) return roots;
    auto coeffs = q.coefficients_in(v);
    // strip v^k content
    std::size_t low = 0;
    while (low < coeffs.size() && coeffs[low].is_zero()) ++low;
    if (low > 0) {
        roots.push_back(rat(0));
        std::vector<Poly> shifted(coeffs.begin() + long(low), coeffs.end());
        q = Poly::zero();
        for (std::size_t i = 0; i < shifted.size(); ++i)
            q += shifted[i] * Poly::variable(v, int(i));
        coeffs = q.coefficients_in(v);
    }
    if (q.is_constant()) return roots;

    // clear denominators -> integer coefficients
    mpz_class den_lcm = 1;
    for (auto& c : coeffs) {
        if (c.is_zero()) continue;
        mpz_class d = c.as_constant()->get_den();
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), d.get_mpz_t());
    }
    std::vector<mpz_class> zc(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        Rat c = coeffs[i].as_constant() ? *coeffs[i].as_constant() : rat(0);
        zc[i] = mpz_class(c.get_num() * den_lcm / c.get_den());
    }
    auto divisors = [](mpz_class n) {
        std::vector<mpz_class> out;
        if (n == 0) return out;
        n = abs(n);
        for (mpz_class d = 1; d * d <= n; ++d) {
            if (n % d == 0) {
                out.push_back(d);
                if (d * d != n) out.push_back(n / d);
            }
        }
        return out;
    };
    mpz_class a0 = zc.front(), an = zc.back();
    auto eval = [&](const Rat& x) {
        Rat acc = 0;
        for (auto it = zc.rbegin(); it != zc.rend(); ++it) acc = acc * x + Rat(*it);
        return acc;
    };
    for (auto& pnum : divisors(a0)) {
        for (auto& pden : divisors(an)) {
            for (int sign : {1, -1}) {
                Rat cand(sign * pnum, pden);
                cand.canonicalize();
                if (legweb::is_zero(eval(cand))) {
                    if (std::find(roots.begin(), roots.end(), cand) == roots.end())
                        roots.push_back(cand);
                }
            }
        }
    }
    std::sort(roots.begin(), roots.end(), [](const Rat& x, const Rat& y) { return x < y; });
    return roots;
}

std::vector<std::complex<double>> numeric_roots(const Poly& p, SymbolId v) {
    auto coeffs = p.coefficients_in(v);
    std::vector<std::complex<double>> c(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        c[i] = coeffs[i].as_constant() ? rat_to_double(*coeffs[i].as_constant()) : 0.0;
    const std::size_t n = c.size() - 1;
    std::vector<std::complex<double>> z(n);
    if (n == 0) return z;
    // Durand-Kerner from a de-resonated starting circle.
    for (std::size_t i = 0; i < n; ++i)
        z[i] = std::polar(1.0 + 0.1 * double(i), 0.9 + 2.0 * 3.14159265358979 * double(i) / double(n));
    auto eval = [&](std::complex<double> x) {
        std::complex<double> acc = 0;
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
        return acc;
    };
    for (int it = 0; it < 500; ++it) {
        double moved = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> denom = c.back();
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) denom *= (z[i] - z[j]);
            std::complex<double> step = eval(z[i]) / denom;
            z[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-14) break;
    }
    return z;
}

// ---------------------------------------------------------------------------
// Zero-set factor split

namespace {

Poly strip_rational_content(const Poly& p) {
    if (p.is_zero()) return p;
    return p * (rat(1) / p.leading_coefficient());
}

// Extracts per-symbol monomial content; returns the primitive part and
// appends one variable factor per extracted symbol.
Poly strip_monomial_content(const Poly& p, std::vector<Poly>& out_factors) {
    if (p.is_zero()) return p;
    std::map<SymbolId, int> min_exp;
    bool first = true;
    for (auto& [m, c] : p.terms()) {
        if (first) {
            for (auto& [s, e] : m.factors) min_exp[s] = e;
            first = false;
        } else {
            for (auto it = min_exp.begin(); it != min_exp.end();) {
                int e = m.exponent_of(it->first);
                if (e == 0)
                    it = min_exp.erase(it);
                else {
                    it->second = std::min(it->second, e);
                    ++it;
                }
            }
        }
    }
    Monomial content;
    for (auto& [s, e] : min_exp) {
        content.factors.emplace_back(s, e);
        out_factors.push_back(Poly::variable(s));
    }
    if (content.factors.empty()) return p;
    Poly stripped;
    for (auto& [m, c] : p.terms()) stripped.add_term(m / content, c);
    return stripped;
}

bool is_univariate(const Poly& p, SymbolId* var_out) {
    auto sup = p.support();
    if (sup.size() != 1) return false;
    *var_out = sup[0];
    return true;
}

// Full factorization over Q of a univariate polynomial into irreducible
// pieces as far as rational roots plus quadratic discriminants reach.
void factor_univariate(Poly p, SymbolId v, std::vector<Poly>& out) {
    p = strip_rational_content(p);
    for (const Rat& r : rational_roots(p, v)) {
        Poly lin = Poly::variable(v) - Poly::constant(r);
        while (true) {
            auto q = divide_exact(p, lin);
            if (!q) break;
            p = *q;
        }
        out.push_back(lin);
    }
    if (p.is_constant()) return;
    if (p.degree_in(v) == 2) {
        auto c = p.coefficients_in(v);
        Poly disc = c[1] * c[1] - rat(4) * c[2] * c[0];
        if (auto s = poly_sqrt(disc)) {
            Poly two_a = rat(2) * c[2];
            out.push_back(strip_rational_content(two_a * Poly::variable(v) + c[1] - *s));
            out.push_back(strip_rational_content(two_a * Poly::variable(v) + c[1] + *s));
            return;
        }
    }
    out.push_back(p); // irreducible for our purposes
}

} // namespace

std::vector<Poly> factor_for_elim(const Poly& p, const std::vector<SymbolId>& vars) {
    std::vector<Poly> out;
    if (p.is_zero()) return out;
    Poly q = strip_monomial_content(strip_rational_content(p), out);
    if (q.is_constant()) {
        if (out.empty()) out.push_back(q);
        return out;
    }
    SymbolId uni;
    if (is_univariate(q, &uni)) {
        factor_univariate(q, uni, out);
        return out;
    }
    // quadratic-in-one-main-variable split via exact-square discriminant
    for (SymbolId v : vars) {
        if (q.degree_in(v) != 2) continue;
        auto c = q.coefficients_in(v);
        Poly disc = c[1] * c[1] - rat(4) * c[2] * c[0];
        auto s = poly_sqrt(disc);
        if (!s) continue;
        if (!c[2].as_constant()) continue; // leading coefficient must be constant to split exactly
        Poly two_a = rat(2) * c[2];
        Poly f1 = two_a * Poly::variable(v) + c[1] - *s;
        Poly f2 = two_a * Poly::variable(v) + c[1] + *s;
        for (const Poly& f : {f1, f2}) {
            std::vector<Poly> sub = factor_for_elim(f, vars);
            out.insert(out.end(), sub.begin(), sub.end());
        }
        return out;
    }
    out.push_back(q);
    return out;
}

// ---------------------------------------------------------------------------
// Branch solver

namespace {

struct Branch {
    std::vector<Poly> eqs;
    std::map<SymbolId, Poly> bindings; // triangular, applied in insertion order
};

std::string poly_list_str(const std::vector<Poly>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "; " : "") << v[i].str();
    return os.str();
}

// Fold triangular bindings into a map usable for simultaneous substitution:
// later bindings are substituted into earlier ones.
std::map<SymbolId, Poly> resolve_bindings(const std::vector<std::pair<SymbolId, Poly>>& chain) {
    std::map<SymbolId, Poly> out;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
        out[it->first] = it->second.substitute(out);
    return out;
}

} // namespace

RootDescription eliminate(const std::vector<Poly>& system, const std::vector<SymbolId>& vars,
                          const ElimOptions& opts) {
    RootDescription desc;
    std::vector<Poly> nonzero;
    for (const Poly& p : system)
        if (!p.is_zero()) nonzero.push_back(p);

    std::set<SymbolId> ambient_set(vars.begin(), vars.end());
    for (const Poly& p : system)
        for (SymbolId s : p.support()) ambient_set.insert(s);
    const int ambient = int(ambient_set.size());

    if (nonzero.empty()) {
        Component whole;
        whole.dimension = ambient;
        desc.components.push_back(whole);
        desc.trace.push_back({"trivial", "system is identically zero"});
        desc.zero_dimensional = ambient == 0;
        return desc;
    }

    // Factor split of each equation.
    std::vector<std::vector<Poly>> factor_lists;
    for (const Poly& p : nonzero) {
        auto f = factor_for_elim(p, vars);
        desc.trace.push_back({"factor", p.str() + "  ->  " + poly_list_str(f)});
        if (f.empty()) f.push_back(Poly::constant(1)); // nonzero constant: infeasible marker
        factor_lists.push_back(std::move(f));
    }

    std::size_t branch_count = 1;
    for (auto& f : factor_lists) {
        branch_count *= f.size();
        if (branch_count > opts.max_branches) throw std::runtime_error("eliminate: branch explosion");
    }

    // Worklist of branches; process each by triangular reduction.
    std::vector<Branch> work;
    {
        std::vector<std::size_t> idx(factor_lists.size(), 0);
        while (true) {
            Branch b;
            for (std::size_t i = 0; i < factor_lists.size(); ++i)
                b.eqs.push_back(factor_lists[i][idx[i]]);
            work.push_back(std::move(b));
            std::size_t k = 0;
            while (k < idx.size() && ++idx[k] == factor_lists[k].size()) idx[k++] = 0;
            if (k == idx.size()) break;
        }
    }

    std::vector<std::pair<std::vector<std::pair<SymbolId, Poly>>, std::vector<Poly>>> outcomes;
    std::set<std::string> seen_outcomes;

    auto record_outcome = [&](const std::vector<std::pair<SymbolId, Poly>>& chain,
                              const std::vector<Poly>& residual) {
        std::ostringstream key;
        for (auto& [s, p] : chain) key << symbol_name(s) << "=" << p.str() << "|";
        key << "//";
        for (auto& p : residual) key << p.str() << "|";
        if (seen_outcomes.insert(key.str()).second) outcomes.emplace_back(chain, residual);
    };

    struct Frame {
        std::vector<Poly> eqs;
        std::vector<std::pair<SymbolId, Poly>> chain;
    };
    std::vector<Frame> stack;
    for (auto& b : work) stack.push_back(Frame{b.eqs, {}});

    std::size_t guard = 0;
    while (!stack.empty()) {
        if (++guard > 64 * opts.max_branches) throw std::runtime_error("eliminate: loop guard");
        Frame fr = std::move(stack.back());
        stack.pop_back();

        // normalize
        bool infeasible = false;
        std::vector<Poly> eqs;
        for (Poly& p : fr.eqs) {
            if (p.is_zero()) continue;
            if (auto c = p.as_constant()) {
                if (!legweb::is_zero(*c)) {
                    infeasible = true;
                    break;
                }
                continue;
            }
            eqs.push_back(strip_rational_content(p));
        }
        if (infeasible) {
            desc.trace.push_back({"infeasible", poly_list_str(fr.eqs)});
            continue;
        }
        // dedupe
        std::sort(eqs.begin(), eqs.end(),
                  [](const Poly& a, const Poly& b) { return a.str() < b.str(); });
        eqs.erase(std::unique(eqs.begin(), eqs.end()), eqs.end());

        if (eqs.empty()) {
            record_outcome(fr.chain, {});
            continue;
        }

        // 1) lone main variable factor -> bind to zero
        bool advanced = false;
        for (std::size_t i = 0; i < eqs.size() && !advanced; ++i) {
            for (SymbolId v : vars) {
                if (eqs[i] == Poly::variable(v)) {
                    std::map<SymbolId, Poly> sub{{v, Poly::zero()}};
                    Frame next;
                    next.chain = fr.chain;
                    next.chain.emplace_back(v, Poly::zero());
                    for (std::size_t j = 0; j < eqs.size(); ++j)
                        if (j != i) next.eqs.push_back(eqs[j].substitute(sub));
                    stack.push_back(std::move(next));
                    advanced = true;
                    break;
                }
            }
        }
        if (advanced) continue;

        // 2) equation linear in a main variable with constant coefficient
        for (std::size_t i = 0; i < eqs.size() && !advanced; ++i) {
            for (SymbolId v : vars) {
                if (eqs[i].degree_in(v) != 1) continue;
                auto c = eqs[i].coefficients_in(v);
                auto lead = c[1].as_constant();
                if (!lead || legweb::is_zero(*lead)) continue;
                Poly value = c[0] * (rat(-1) / *lead);
                std::map<SymbolId, Poly> sub{{v, value}};
                Frame next;
                next.chain = fr.chain;
                next.chain.emplace_back(v, value);
                for (std::size_t j = 0; j < eqs.size(); ++j)
                    if (j != i) next.eqs.push_back(eqs[j].substitute(sub));
                stack.push_back(std::move(next));
                advanced = true;
                break;
            }
        }
        if (advanced) continue;

        // 3) univariate equation in a main variable: branch over its factors
        for (std::size_t i = 0; i < eqs.size() && !advanced; ++i) {
            SymbolId v;
            if (!is_univariate(eqs[i], &v)) continue;
            if (std::find(vars.begin(), vars.end(), v) == vars.end()) continue;
            std::vector<Poly> facs;
            factor_univariate(eqs[i], v, facs);
            desc.trace.push_back({"eliminant", symbol_name(v) + ": " + eqs[i].str()});
            for (const Poly& f : facs) {
                if (f.degree_in(v) == 1) {
                    auto c = f.coefficients_in(v);
                    Poly value = c[0] * (rat(-1) / *c[1].as_constant());
                    std::map<SymbolId, Poly> sub{{v, value}};
                    Frame next;
                    next.chain = fr.chain;
                    next.chain.emplace_back(v, value);
                    for (std::size_t j = 0; j < eqs.size(); ++j)
                        if (j != i) next.eqs.push_back(eqs[j].substitute(sub));
                    stack.push_back(std::move(next));
                } else {
                    // non-rational roots: keep the irreducible factor as a
                    // certificate and note its numeric roots in the trace
                    Frame next;
                    next.chain = fr.chain;
                    next.eqs.push_back(f);
                    for (std::size_t j = 0; j < eqs.size(); ++j)
                        if (j != i) next.eqs.push_back(eqs[j]);
                    std::ostringstream approx;
                    approx << f.str() << " ~ roots";
                    for (auto z : numeric_roots(f, v))
                        approx << " (" << z.real() << (z.imag() < 0 ? "" : "+")
                               << z.imag() << "i)";
                    desc.trace.push_back({"numeric", approx.str()});
                    record_outcome(next.chain, next.eqs);
                }
            }
            advanced = true;
        }
        if (advanced) continue;

        // 4) resultant fallback: eliminate a main variable shared by two eqs
        for (SymbolId v : vars) {
            std::vector<std::size_t> holding;
            for (std::size_t i = 0; i < eqs.size(); ++i)
                if (eqs[i].degree_in(v) > 0) holding.push_back(i);
            if (holding.size() < 2) continue;
            const Poly& f = eqs[holding[0]];
            const Poly& g = eqs[holding[1]];
            Poly res = resultant(f, g, v);
            desc.trace.push_back({"resultant", symbol_name(v) + ": res(" + f.str() + ", " + g.str() +
                                                   ") = " + res.str()});
            Frame next;
            next.chain = fr.chain;
            next.eqs = eqs;
            next.eqs.erase(next.eqs.begin() + long(holding[1]));
            if (!res.is_zero()) {
                next.eqs.push_back(res);
                stack.push_back(std::move(next));
            } else {
                // common factor: certify via gcd if univariate-compatible, else report
                record_outcome(fr.chain, eqs);
            }
            advanced = true;
            break;
        }
        if (advanced) continue;

        // nothing reducible: record as residual component
        record_outcome(fr.chain, eqs);
    }

    // Convert outcomes to points/components.
    std::set<std::string> seen_points, seen_components;
    for (auto& [chain, residual] : outcomes) {
        auto resolved = resolve_bindings(chain);
        bool all_rational = residual.empty();
        RootPoint pt;
        if (all_rational) {
            for (SymbolId s : ambient_set) {
                auto it = resolved.find(s);
                if (it == resolved.end()) {
                    all_rational = false;
                    break;
                }
                auto c = it->second.as_constant();
                if (!c) {
                    all_rational = false;
                    break;
                }
                pt.coords[s] = *c;
            }
        }
        if (all_rational) {
            // verify against original system exactly
            std::map<SymbolId, Poly> sub;
            for (auto& [s, c] : pt.coords) sub[s] = Poly::constant(c);
            bool ok = true;
            for (const Poly& p : system)
                if (!p.substitute(sub).is_zero()) ok = false;
            if (!ok) {
                desc.notes.push_back("candidate point rejected by exact verification");
                continue;
            }
            std::ostringstream key;
            for (auto& [s, c] : pt.coords) key << symbol_name(s) << "=" << rat_to_string(c) << ",";
            if (seen_points.insert(key.str()).second) desc.points.push_back(pt);
            std::ostringstream tr;
            tr << "point " << key.str();
            desc.trace.push_back({"point", tr.str()});
        } else {
            Component comp;
            for (auto& [s, val] : resolved)
                comp.equations.push_back(Poly::variable(s) - val);
            for (const Poly& p : residual) comp.equations.push_back(p);
            comp.dimension = std::max(0, ambient - int(comp.equations.size()));
            std::ostringstream key;
            for (auto& e : comp.equations) key << e.str() << ";";
            if (seen_components.insert(key.str()).second) {
                desc.trace.push_back({"component", key.str()});
                desc.components.push_back(std::move(comp));
            }
        }
    }
    desc.zero_dimensional = desc.components.empty();
    return desc;
}

bool verify_root_description(const RootDescription& desc, const std::vector<Poly>& system,
                             std::string* why) {
    for (const RootPoint& pt : desc.points) {
        if (!pt.exact) continue;
        std::map<SymbolId, Poly> sub;
        for (auto& [s, c] : pt.coords) sub[s] = Poly::constant(c);
        for (const Poly& p : system) {
            if (!p.substitute(sub).is_zero()) {
                if (why) *why = "point fails equation " + p.str();
                return false;
            }
        }
    }
    for (const Component& comp : desc.components) {
        // A component certificate must be consistent: substituting its
        // triangular part into the system yields polynomials in the ideal of
        // the residual equations; we check the weaker sanity condition that
        // no equation reduces to a nonzero constant.
        std::map<SymbolId, Poly> sub;
        for (const Poly& e : comp.equations) {
            // detect "v - value" shape
            for (SymbolId s : e.support()) {
                if (e.degree_in(s) == 1) {
                    auto c = e.coefficients_in(s);
                    if (c[1] == Poly::constant(1) && !c[0].contains_symbol(s)) {
                        sub[s] = -c[0];
                        break;
                    }
                }
            }
        }
        for (const Poly& p : system) {
            Poly r = p.substitute(sub);
            if (auto c = r.as_constant(); c && !legweb::is_zero(*c)) {
                if (why) *why = "component certificate contradicts equation " + p.str();
                return false;
            }
        }
    }
    return true;
}

} // namespace legweb::sym
