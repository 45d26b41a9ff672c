#include "legweb/dataload.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace legweb::data {

using forms::CF_R0;
using forms::CF_TH;
using forms::Form;
using forms::Mask;
using sym::Origin;
using sym::Poly;
using sym::SymbolId;
using sym::SymbolRegistry;

std::string data_file(const std::string& name) {
    const char* env = std::getenv("LEGWEB_DATA_DIR");
    std::string dir = env ? env : LEGWEB_DATA_DIR;
    return dir + "/" + name;
}

namespace {

struct RawEntry {
    std::string name;
    Form form;
    bool modtheta = false;
};

Origin origin_from(const std::string& s) {
    if (s == "invariant") return Origin::Invariant;
    if (s == "deformation") return Origin::Deformation;
    if (s == "fresh") return Origin::FreshDerivative;
    throw std::invalid_argument("unknown symbol origin '" + s + "'");
}

// Weight of a derivative-suffixed name, when the base is resolvable.
bool try_name_weight(const std::string& name, int* out) {
    auto& reg = SymbolRegistry::instance();
    auto pos = name.rfind('_');
    if (pos == std::string::npos || pos + 2 != name.size()) return false;
    char d = name[pos + 1];
    if (d != '0' && d != '1' && d != '2') return false;
    auto base = reg.find(name.substr(0, pos));
    if (!base || !reg.weight_known(*base)) return false;
    *out = reg.weight(*base) + (d == '0' ? 2 : 1);
    return true;
}

} // namespace

ModelData load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);

    std::vector<RawEntry> raw_entries;
    std::vector<std::tuple<std::string, int, Origin>> manual_symbols;
    std::vector<std::pair<std::string, std::string>> raw_binds;
    std::vector<std::tuple<int, int, std::string>> raw_matrix;
    std::vector<std::pair<std::string, std::string>> raw_coframe;
    std::vector<std::tuple<int, std::string, std::string>> raw_chain;
    std::vector<std::pair<std::string, std::string>> raw_leads;
    std::vector<std::pair<std::string, std::string>> raw_points;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head)) continue;
        try {
            if (head == "symbol") {
                std::string name, kw1, kw2;
                int w;
                std::string orig;
                ls >> name >> kw1 >> w >> kw2 >> orig;
                if (kw1 != "weight" || kw2 != "origin")
                    throw std::invalid_argument("expected 'symbol NAME weight W origin O'");
                manual_symbols.emplace_back(name, w, origin_from(orig));
            } else if (head == "entry") {
                std::string name, op;
                ls >> name >> op;
                std::string rest;
                std::getline(ls, rest);
                if (op != "=" && op != "~")
                    throw std::invalid_argument("expected '=' or '~' after entry name");
                RawEntry e;
                e.name = name;
                e.modtheta = (op == "~");
                e.form = forms::parse_form(rest);
                raw_entries.push_back(std::move(e));
            } else if (head == "bind") {
                std::string name, op;
                ls >> name >> op;
                std::string rest;
                std::getline(ls, rest);
                if (op != "=") throw std::invalid_argument("expected '=' after bind name");
                raw_binds.emplace_back(name, rest);
            } else if (head == "phi") {
                int i, j;
                std::string op;
                ls >> i >> j >> op;
                std::string rest;
                std::getline(ls, rest);
                if (op != "=") throw std::invalid_argument("expected '=' after phi i j");
                raw_matrix.emplace_back(i, j, rest);
            } else if (head == "coframe") {
                std::string name, op;
                ls >> name >> op;
                std::string rest;
                std::getline(ls, rest);
                if (op != "=") throw std::invalid_argument("expected '=' after coframe name");
                raw_coframe.emplace_back(name, rest);
            } else if (head == "chain") {
                int step;
                std::string name, op;
                ls >> step >> name >> op;
                std::string rest;
                std::getline(ls, rest);
                if (op != "=") throw std::invalid_argument("expected '=' after chain binding");
                raw_chain.emplace_back(step, name, rest);
            } else if (head == "lead") {
                std::string name, op;
                ls >> name >> op;
                std::string rest;
                std::getline(ls, rest);
                if (op != "=") throw std::invalid_argument("expected '=' after lead name");
                raw_leads.emplace_back(name, rest);
            } else if (head == "point") {
                std::string name, op;
                ls >> name >> op;
                std::string rest;
                std::getline(ls, rest);
                if (op != "=") throw std::invalid_argument("expected '=' after point name");
                raw_points.emplace_back(name, rest);
            } else {
                throw std::invalid_argument("unknown statement '" + head + "'");
            }
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }

    auto& reg = SymbolRegistry::instance();
    ModelData out;

    for (auto& [name, w, orig] : manual_symbols) reg.intern(name, w, orig);

    // Weight assignment from the r0 coefficient of each entry: the canonical
    // shape is d X = -k X r0 + ..., which pins weight(X) = k.
    for (auto& e : raw_entries) {
        SymbolId x = sym::intern(e.name);
        Poly r0c = e.form.coefficient(Mask(1u << CF_R0));
        if (r0c.is_zero()) {
            if (!reg.weight_known(x)) reg.ensure_weight(x, 0);
            continue;
        }
        auto q = sym::divide_exact(r0c, Poly::variable(x));
        if (!q || !q->is_constant())
            throw std::runtime_error("entry for " + e.name +
                                     ": r0 coefficient is not a multiple of the symbol: " +
                                     r0c.str());
        Rat c = *q->as_constant();
        if (c.get_den() != 1 || sgn(c) > 0)
            throw std::runtime_error("entry for " + e.name + ": r0 coefficient " +
                                     rat_to_string(c) + " is not a nonpositive integer");
        reg.ensure_weight(x, int(-c.get_num().get_si()));
    }

    // Remaining weights from derivative-suffixed names, to a fixpoint.
    auto resolve_name_weights = [&reg]() {
        bool progress = true;
        while (progress) {
            progress = false;
            for (std::size_t id = 0; id < reg.size(); ++id) {
                SymbolId s = SymbolId(id);
                if (reg.weight_known(s)) continue;
                int w;
                if (try_name_weight(reg.name(s), &w)) {
                    reg.ensure_weight(s, w);
                    progress = true;
                }
            }
        }
    };
    resolve_name_weights();

    for (auto& e : raw_entries) {
        SymbolId x = sym::intern(e.name);
        Form f = e.form;
        if (e.modtheta) {
            SymbolId th = reg.derivative(x, 0, Origin::FreshDerivative);
            out.modtheta_fresh.push_back(th);
            f.add(Mask(1u << CF_TH), Poly::variable(th));
        }
        out.table.set_entry(x, f);
        out.entry_symbols.push_back(x);
    }
    for (auto& [name, text] : raw_binds) out.binds[name] = sym::parse_poly(text);
    if (!raw_matrix.empty()) {
        forms::MatrixForm m;
        for (auto& [i, j, text] : raw_matrix) {
            if (i < 0 || i > 3 || j < 0 || j > 3)
                throw std::runtime_error(path + ": matrix index out of range");
            m.at(i, j) = forms::parse_form(text);
        }
        out.matrix = m;
    }
    if (!raw_coframe.empty()) {
        std::array<Form, 4> cf{};
        for (auto& [name, text] : raw_coframe) {
            int idx = -1;
            for (int i = 0; i < 4; ++i)
                if (name == forms::kCoframeName[i]) idx = i;
            if (idx < 0) throw std::runtime_error(path + ": unknown coframe element " + name);
            cf[std::size_t(idx)] = forms::parse_form(text);
        }
        out.table.set_coframe_d(cf);
        out.has_coframe = true;
    }
    for (auto& [step, name, text] : raw_chain) {
        sym::intern(name); // weight resolves below via the derivative-name rule
        out.chain.emplace_back(step, name, sym::parse_poly(text));
    }
    for (auto& [name, text] : raw_leads) out.leads[name] = sym::parse_poly(text);
    for (auto& [name, text] : raw_points) {
        std::array<Poly, 4> vec;
        std::size_t start = 0, idx = 0;
        for (std::size_t i = 0; i <= text.size(); ++i) {
            if (i == text.size() || text[i] == ',') {
                if (idx >= 4) throw std::runtime_error(path + ": point " + name + " has too many components");
                vec[idx++] = sym::parse_poly(text.substr(start, i - start));
                start = i + 1;
            }
        }
        if (idx != 4) throw std::runtime_error(path + ": point " + name + " needs 4 components");
        out.points[name] = vec;
    }
    // chain/lead/point expressions can intern new derivative names
    resolve_name_weights();
    return out;
}

} // namespace legweb::data
