#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "legweb/poly.hpp"
#include "legweb/report.hpp"

namespace legweb::numgeom {

using Vec4 = std::array<double, 4>;
using RVec4 = std::array<Rat, 4>;

// Symplectic pairing in Darboux form: u0 v2 - u2 v0 + u1 v3 - u3 v1.
double contact_pair(const Vec4& u, const Vec4& v);
Rat contact_pair(const RVec4& u, const RVec4& v);

// Largest-magnitude coordinate scaled to one.
Vec4 normalize_chart(const Vec4& x, int* chart = nullptr);
double projective_distance(const Vec4& a, const Vec4& b);

// Pluecker image of the Lagrangian plane spanned by x, y: coordinates
// (p01, p02, p03, p12, p23) on the quadric p01 p23 + p02^2 + p03 p12 = 0.
struct QuadricPoint {
    std::array<double, 5> p;
    double quadric_residual; // relative
};
std::optional<QuadricPoint> plucker(const Vec4& x, const Vec4& y, double tol = 1e-9);
std::array<Rat, 5> plucker_exact(const RVec4& x, const RVec4& y);
Rat quadric_residual_exact(const std::array<Rat, 5>& p);

// Polynomial curve t -> C^4 with exact rational coefficients.
struct ParamCurve {
    std::array<std::vector<Rat>, 4> coeffs; // per coordinate, ascending degree
    int degree() const;
    Vec4 eval(double t) const;
    Vec4 eval_derivative(double t) const;
    RVec4 eval(const Rat& t) const;
    RVec4 eval_derivative(const Rat& t) const;
    // Coefficients of the pairing of the curve with its derivative; the curve
    // is Legendrian exactly when all vanish.
    std::vector<Rat> legendrian_residual() const;
    bool is_legendrian() const;
    // Coefficients of t -> pairing(x, curve(t)).
    std::vector<double> incidence(const Vec4& x) const;
    std::vector<Rat> incidence(const RVec4& x) const;
};

// Named curves from the declarative curve file.
ParamCurve load_curve(const std::string& name);
ParamCurve reference_cubic(); // (1, t, t^3, -3 t^2)

struct WebOptions {
    double disc_tol = 1e-8; // on normalized coefficients
    double imag_tol = 1e-7;
    double newton_steps = 1;
};

struct WebSample {
    Vec4 x; // chart-normalized
    std::array<double, 3> roots;
    std::array<double, 3> residuals;
    double discriminant = 0;
};

// The three incidence parameters at x; rejects near-multiple or complex
// root configurations with a reason.
std::optional<WebSample> web_roots(const ParamCurve& curve, const Vec4& x,
                                   const WebOptions& opts = {}, std::string* reason = nullptr);

// Exact-mode roots; succeeds when the incidence polynomial splits over Q.
std::optional<std::array<Rat, 3>> web_roots_exact(const ParamCurve& curve, const RVec4& x);

// Moves along the leaf chord towards curve(roots[i]) by parameter s and
// reports |t_i(y) - t_i(x)|.
std::optional<double> first_integral_check(const ParamCurve& curve, const WebSample& sample,
                                           int leaf, double s, const WebOptions& opts = {});

struct ConcurrencyResult {
    Vec4 point;
    int kernel_dim;
    std::array<double, 3> singular_values;
};
ConcurrencyResult concurrency_point(const Vec4& p1, const Vec4& p2, const Vec4& p3,
                                    double tol = 1e-10);
// Exact kernel of the three contact planes; empty when the rank is not 3.
std::optional<RVec4> concurrency_point_exact(const RVec4& p1, const RVec4& p2, const RVec4& p3);

// Relation ansatz for the collocation. The incidence parameters t_i alone
// are a coordinate system (their elementary symmetric functions are linear
// in the chart), so closed combinations g_i(t_i) dt_i can only vanish
// trivially; detecting the web rank requires closed 1-forms on the full
// 2-dimensional leaf spaces, coordinatized by (t_i, lambda_i) with lambda_i
// the pencil coordinate of the leaf line at curve(t_i).
enum class RelationBasis { LeafSpace, CurveParameter };

struct RankConfig {
    int degree = 6;
    int samples = 500;
    double radius = 0.04;
    std::uint64_t seed = 1;
    double tau = 1e-8; // kernel threshold relative to the top singular value
    Vec4 base{1, 2, 6, -11};
    RelationBasis basis = RelationBasis::LeafSpace;
};

struct RankResult {
    int kernel_dim = -1;
    std::vector<double> spectrum; // descending
    double separation = 0;        // smallest kept / largest kernel value
    int samples_used = 0;
    int samples_dropped = 0;
    std::array<double, 3> base_roots{};
    std::array<double, 3> base_lambdas{};
    std::array<double, 3> scales{};
    std::array<double, 3> lambda_scales{};
    int columns = 0;
    std::vector<std::vector<double>> kernel_vectors; // coefficient vectors
};
RankResult rank_estimate(const ParamCurve& curve, const RankConfig& cfg);

struct TraceResult {
    double max_residual = 0;
    double scale = 0; // typical magnitude of the summands
    int samples_used = 0;
};
// Evaluates the candidate-relation covector over a seeded sample set; the
// coefficient layout matches the columns of rank_estimate for the same
// config (a kernel vector can be passed through directly).
TraceResult trace_test(const ParamCurve& curve, const RankConfig& cfg,
                       const std::vector<double>& coefficients, const RankResult& calib);
// Same with a single global polynomial g(t) in the monomial basis applied to
// every foliation.
TraceResult trace_test_global(const ParamCurve& curve, const RankConfig& cfg,
                              const std::vector<double>& g_monomial);

// Accepted samples as rows (x0..x3, t1, t2, t3), for CSV emission.
std::vector<std::array<double, 7>> web_sample_table(const ParamCurve& curve,
                                                    const RankConfig& cfg);

// Scatter of the singular spectrum on a log scale.
std::string spectrum_svg(const std::vector<double>& spectrum);

void run_web_suite(report::Report& rep, const RankConfig& cfg);

} // namespace legweb::numgeom
