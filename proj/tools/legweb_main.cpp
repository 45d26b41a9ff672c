#include <CLI11.hpp>
#include <optional>
#include <fstream>
#include <iostream>

#include "legweb/deformation.hpp"
#include "legweb/models.hpp"
#include "legweb/numgeom.hpp"
#include "legweb/report.hpp"

namespace {

using legweb::report::Report;

std::optional<std::vector<double>> parse_csv_doubles(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    try {
        for (std::size_t i = 0; i <= text.size(); ++i) {
            if (i == text.size() || text[i] == ',') {
                std::size_t used = 0;
                std::string piece = text.substr(start, i - start);
                out.push_back(std::stod(piece, &used));
                if (used != piece.size()) return std::nullopt;
                start = i + 1;
            }
        }
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return out;
}

void emit(const Report& rep, const std::string& out_path, bool human, bool body_only) {
    std::string payload;
    if (body_only)
        payload = rep.body_bytes() + "\n";
    else if (human)
        payload = rep.human();
    else
        payload = rep.full().dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << payload;
    } else {
        std::ofstream out(out_path);
        out << payload;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"legweb: exact verification of linear Legendrian 3-web structure "
                 "equations and numeric experiments on dual webs"};
    app.require_subcommand(1);
    app.set_config("--config");

    std::string out_path;
    long seed = 1;
    bool human = false, body_only = false;
    std::vector<std::string> waived;
    app.add_option("--out", out_path, "write the report to a file instead of stdout");
    app.add_option("--seed", seed, "seed for all randomized sampling");
    app.add_flag("--human", human, "render the report as text (derived from the JSON body)");
    app.add_flag("--body-only", body_only, "emit only the deterministic report body");
    app.add_option("--waive", waived,
                   "check ids whose failure is tolerated (repeatable)")
        ->delimiter(',');

    // verify -----------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->fallthrough();
    std::string suite;
    verify->add_option("suite", suite, "structure | deformation | maxrank | cubic | all")
        ->required();

    // web ---------------------------------------------------------------
    auto* web = app.add_subcommand("web", "dual-web numeric computations");
    web->fallthrough();
    std::string action, point_str, t_str, field = "float", curve_name = "legendrian-cubic";
    std::string csv_path, svg_path;
    int samples = 500, degree = 6;
    double tolerance = 1e-8, radius = 0.04;
    web->add_option("action", action, "roots | concurrency | rank | trace")->required();
    web->add_option("--point", point_str, "homogeneous coordinates a,b,c,d");
    web->add_option("--t", t_str, "curve parameters t1,t2,t3");
    web->add_option("--curve", curve_name, "curve name from the curve file");
    web->add_option("--samples", samples, "sample count for rank/trace runs");
    web->add_option("--degree", degree, "polynomial degree of the relation basis");
    web->add_option("--tolerance", tolerance, "kernel threshold relative to sigma_max");
    web->add_option("--radius", radius, "sampling radius in the affine chart");
    web->add_option("--field", field, "float | rational");
    web->add_option("--csv", csv_path, "also write the sample table as CSV");
    web->add_option("--svg", svg_path, "also write the singular spectrum as SVG");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed()) {
            Report rep;
            rep.suite = suite;
            rep.seed = seed;
            rep.config["suite"] = suite;
            rep.config["seed"] = seed;
            if (suite == "structure") {
                legweb::models::run_structure_suite(rep);
            } else if (suite == "maxrank") {
                legweb::models::run_maxrank_suite(rep);
            } else if (suite == "cubic") {
                legweb::models::run_cubic_suite(rep);
            } else if (suite == "deformation") {
                legweb::deform::run_deformation_suite(rep);
            } else if (suite == "all") {
                legweb::models::run_structure_suite(rep);
                legweb::models::run_maxrank_suite(rep);
                legweb::models::run_cubic_suite(rep);
                legweb::deform::run_deformation_suite(rep);
            } else {
                std::cerr << "unknown suite: " << suite << "\n";
                return 2;
            }
            rep.apply_waivers(waived);
            emit(rep, out_path, human, body_only);
            return rep.exit_code();
        }

        // web subcommand
        using namespace legweb::numgeom;
        ParamCurve curve = load_curve(curve_name);
        RankConfig cfg;
        cfg.samples = samples;
        cfg.degree = degree;
        cfg.tau = tolerance;
        cfg.radius = radius;
        cfg.seed = std::uint64_t(seed);

        if (action == "roots") {
            if (point_str.empty()) {
                std::cerr << "web roots requires --point\n";
                return 2;
            }
            auto parsed = parse_csv_doubles(point_str);
            if (!parsed || parsed->size() != 4) {
                std::cerr << "--point needs 4 numeric coordinates\n";
                return 2;
            }
            auto& v = *parsed;
            if (field == "rational") {
                RVec4 x{legweb::rat_from_string(std::to_string(long(v[0]))),
                        legweb::rat_from_string(std::to_string(long(v[1]))),
                        legweb::rat_from_string(std::to_string(long(v[2]))),
                        legweb::rat_from_string(std::to_string(long(v[3])))};
                auto roots = web_roots_exact(curve, x);
                if (!roots) {
                    std::cerr << "incidence polynomial does not split over Q\n";
                    return 1;
                }
                for (int i = 0; i < 3; ++i)
                    std::cout << (i ? " " : "") << legweb::rat_to_string((*roots)[std::size_t(i)]);
                std::cout << "\n";
                return 0;
            }
            std::string reason;
            auto s = web_roots(curve, Vec4{v[0], v[1], v[2], v[3]}, WebOptions{}, &reason);
            if (!s) {
                std::cerr << "sample rejected: " << reason << "\n";
                return 1;
            }
            for (int i = 0; i < 3; ++i) std::cout << (i ? " " : "") << s->roots[std::size_t(i)];
            std::cout << "\n";
            return 0;
        }
        if (action == "concurrency") {
            if (t_str.empty()) {
                std::cerr << "web concurrency requires --t\n";
                return 2;
            }
            auto parsed_t = parse_csv_doubles(t_str);
            if (!parsed_t || parsed_t->size() != 3) {
                std::cerr << "--t needs 3 numeric parameters\n";
                return 2;
            }
            auto& ts = *parsed_t;
            if (field == "rational") {
                std::array<legweb::Rat, 3> tr;
                std::size_t start = 0, idx = 0;
                for (std::size_t i = 0; i <= t_str.size(); ++i)
                    if (i == t_str.size() || t_str[i] == ',')
                        tr[idx++] = legweb::rat_from_string(t_str.substr(start, i - start)),
                        start = i + 1;
                auto kernel = concurrency_point_exact(curve.eval(tr[0]), curve.eval(tr[1]),
                                                      curve.eval(tr[2]));
                if (!kernel) {
                    std::cerr << "degenerate configuration\n";
                    return 1;
                }
                legweb::Rat lead;
                for (auto& v : *kernel)
                    if (legweb::is_zero(lead) && !legweb::is_zero(v)) lead = v;
                for (int i = 0; i < 4; ++i)
                    std::cout << (i ? " : " : "")
                              << legweb::rat_to_string((*kernel)[std::size_t(i)] / lead);
                std::cout << "\n";
                return 0;
            }
            auto c = concurrency_point(curve.eval(ts[0]), curve.eval(ts[1]), curve.eval(ts[2]));
            if (c.kernel_dim != 1) {
                std::cerr << "degenerate configuration: kernel dimension " << c.kernel_dim
                          << "\n";
                return 1;
            }
            // scale so the first nonzero coordinate is 1
            double scale = 0;
            for (double x : c.point)
                if (scale == 0 && std::abs(x) > 1e-12) scale = x;
            for (int i = 0; i < 4; ++i)
                std::cout << (i ? " : " : "") << c.point[std::size_t(i)] / scale;
            std::cout << "\n";
            return 0;
        }
        if (action == "rank" || action == "trace") {
            Report rep;
            rep.suite = "web";
            rep.seed = seed;
            rep.config["samples"] = samples;
            rep.config["degree"] = degree;
            rep.config["tolerance"] = tolerance;
            rep.config["radius"] = radius;
            rep.config["curve"] = curve_name;
            run_web_suite(rep, cfg);
            if (!csv_path.empty()) {
                auto table = web_sample_table(curve, cfg);
                std::ofstream csv(csv_path);
                csv << "x0,x1,x2,x3,t1,t2,t3\n";
                csv.precision(17);
                for (auto& row : table) {
                    for (int i = 0; i < 7; ++i) csv << (i ? "," : "") << row[std::size_t(i)];
                    csv << "\n";
                }
            }
            if (!svg_path.empty()) {
                RankResult rr = rank_estimate(curve, cfg);
                std::ofstream svg(svg_path);
                svg << spectrum_svg(rr.spectrum);
            }
            emit(rep, out_path, human, body_only);
            return rep.exit_code();
        }
        std::cerr << "unknown web action: " << action << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
