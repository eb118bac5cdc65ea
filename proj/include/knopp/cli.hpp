#ifndef KNOPP_CLI_HPP
#define KNOPP_CLI_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "certify/holder.hpp"
#include "certify/l1.hpp"
#include "certify/report.hpp"
#include "certify/witness.hpp"
#include "knopp_series.hpp"
#include "pde/builders.hpp"
#include "pde/operators.hpp"
#include "pde/structure.hpp"

namespace knopp::cli
{

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2, kInconclusive = 3 };

inline int exit_code(Verdict v)
{
    switch (v) {
    case Verdict::Pass:
        return kPass;
    case Verdict::Fail:
        return kFail;
    case Verdict::Inconclusive:
        return kInconclusive;
    }
    return kFail;
}

class UsageError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Options shared by every command that works with a series.
struct SeriesOptions {
    std::string alpha;
    unsigned long nu = 0;
    long precision = kDefaultPrecision;
    std::uint64_t seed = 0;
    std::string output;

    SeriesParams params() const
    {
        if (alpha.find_first_of(".eE") != std::string::npos) {
            throw UsageError("alpha must be an exact rational p/q, got '" + alpha + "'");
        }
        return SeriesParams(parse_rational(alpha), nu, static_cast<mpfr_prec_t>(precision));
    }

    std::string header(const std::string &command) const
    {
        return std::string("knopp ") + kVersion + " command=" + command + " alpha=" + alpha +
               " nu=" + std::to_string(nu) + " precision=" + std::to_string(precision) + " seed=" +
               std::to_string(seed);
    }
};

inline void add_series_options(CLI::App *cmd, SeriesOptions &o)
{
    cmd->add_option("--alpha", o.alpha, "Hoelder exponent as an exact rational p/q in (0,1)")->required();
    cmd->add_option("--nu", o.nu, "lacunarity nu >= 1")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--precision", o.precision, "working precision in bits")
        ->capture_default_str()
        ->check(CLI::Range(2L, 1L << 20));
    cmd->add_option("--seed", o.seed, "seed of randomized sweeps")->capture_default_str();
    cmd->add_option("-o,--output", o.output, "output file (default: standard output)");
}

// Emits the whole output at once, to a file or to the given stream.
inline void emit(const std::string &path, const std::string &text, std::ostream &out)
{
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw UsageError("cannot open '" + path + "' for writing");
    }
    f << text;
    if (!f) {
        throw UsageError("failed writing '" + path + "'");
    }
}

inline Rational parse_positive(const std::string &text, const char *what)
{
    const auto q = parse_decimal(text);
    if (q <= 0) {
        throw UsageError(std::string(what) + " must be positive");
    }
    return q;
}

inline std::vector<double> parse_list(const std::string &text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            continue;
        }
        out.push_back(parse_decimal(item).get_d());
    }
    if (out.empty()) {
        throw UsageError("empty list '" + text + "'");
    }
    return out;
}

// ----- eval ---------------------------------------------------------------

struct EvalCommand {
    SeriesOptions series;
    std::string x;
    std::string eps = "1e-12";
    std::size_t term_cap = kDefaultTermCap;
    bool json = false;
};

inline int run_eval(const EvalCommand &c, std::ostream &out)
{
    const auto params = c.series.params();
    const auto x = parse_dyadic(c.x);
    const auto eps = parse_positive(c.eps, "eps");
    const auto r = eval_K(params, x, eps, EvalOptions{c.term_cap});
    std::ostringstream s;
    if (c.json) {
        Json j{{"kind", "eval"}, {"params", params_json(params)}, {"x", x.to_string()}};
        put_enclosure(j, "value", r.value);
        if (r.value.is_point()) {
            j["value_exact"] = to_string(r.value.lo_rational());
        }
        j["terms_used"] = r.terms_used;
        put_enclosure(j, "tail", r.tail_bound);
        j["precision_bits"] = c.series.precision;
        j["seed"] = c.series.seed;
        j["version"] = kVersion;
        write_jsonl(s, j);
    } else {
        s << "# " << c.series.header("eval") << '\n';
        s << "x = " << x.to_string() << '\n';
        s << "value = " << r.value.to_string() << '\n';
        if (r.value.is_point()) {
            s << "exact = " << to_string(r.value.lo_rational()) << '\n';
        }
        s << "terms_used = " << r.terms_used << '\n';
        s << "tail_bound = " << r.tail_bound.to_string() << '\n';
    }
    emit(c.series.output, s.str(), out);
    return kPass;
}

// ----- sample -------------------------------------------------------------

struct SampleCommand {
    SeriesOptions series;
    std::string interval = "0:2";
    std::size_t points = 4096;
    std::size_t terms = 50;
    std::string format = "csv";
};

// SVG 1.1 polyline through the enclosure midpoints.
inline void write_svg(std::ostream &os, const SampleSeries &s, const std::string &header)
{
    constexpr double W = 1000, Hh = 500, pad = 10;
    const double x0 = s.points.front().x.to_double();
    const double x1 = s.points.back().x.to_double();
    double y0 = 0, y1 = 0;
    for (const auto &p : s.points) {
        y1 = std::max(y1, p.value.hi_double());
        y0 = std::min(y0, p.value.lo_double());
    }
    if (y1 == y0) {
        y1 = y0 + 1;
    }
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 " << W << ' ' << Hh
       << "\" width=\"" << W << "\" height=\"" << Hh << "\">\n";
    os << "<desc>" << header << " x_range=" << std::setprecision(17) << x0 << ':' << x1 << " y_range=" << y0
       << ':' << y1 << "</desc>\n";
    os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
    os << std::fixed << std::setprecision(3);
    bool first = true;
    for (const auto &p : s.points) {
        const double px = pad + (W - 2 * pad) * (p.x.to_double() - x0) / (x1 - x0);
        const double py = Hh - pad - (Hh - 2 * pad) * (p.value.mid_double() - y0) / (y1 - y0);
        os << (first ? "" : " ") << px << ',' << py;
        first = false;
    }
    os << "\"/>\n</svg>\n";
}

inline int run_sample(const SampleCommand &c, std::ostream &out)
{
    const auto params = c.series.params();
    const auto colon = c.interval.find(':');
    if (colon == std::string::npos) {
        throw UsageError("interval must be a:b, got '" + c.interval + "'");
    }
    const auto a = parse_dyadic(c.interval.substr(0, colon));
    const auto b = parse_dyadic(c.interval.substr(colon + 1));
    if (!(a < b)) {
        throw UsageError("interval must satisfy a < b");
    }
    const auto series = sample_K(params, a, b, c.points, c.terms);
    const std::string header = c.series.header("sample") + " terms=" + std::to_string(c.terms) +
                               " points=" + std::to_string(c.points) + " interval=" + c.interval;
    std::ostringstream s;
    if (c.format == "svg") {
        write_svg(s, series, header);
    } else {
        write_csv(s, series, {header});
    }
    emit(c.series.output, s.str(), out);
    return kPass;
}

// ----- certify ------------------------------------------------------------

struct CertifyCommon {
    SeriesOptions series;
    long max_precision = kMaxRetryPrecision;
    bool items = false;
};

inline void add_certify_options(CLI::App *cmd, CertifyCommon &c)
{
    add_series_options(cmd, c.series);
    cmd->add_option("--max-precision", c.max_precision, "precision ceiling for retries of inconclusive runs")
        ->capture_default_str();
    cmd->add_flag("--items", c.items, "emit one JSON line per checked item");
}

struct HolderCommand {
    CertifyCommon common;
    std::size_t pairs = 10'000;
    int max_scale = 20;
    int offset_bits = 32;
};

inline int run_holder(const HolderCommand &c, std::ostream &out)
{
    const auto params = c.common.series.params();
    HolderSweepOptions opts;
    opts.pairs = c.pairs;
    opts.max_scale = c.max_scale;
    opts.offset_bits = c.offset_bits;
    opts.seed = c.common.series.seed;
    opts.keep_items = c.common.items;
    const auto pairs = holder_sample_pairs(opts);
    const auto cert = with_precision_retry(
        params, [&](const SeriesParams &p) { return holder_certificate(p, pairs, c.common.items); },
        c.common.max_precision);
    std::ostringstream s;
    write_jsonl(s, header_json("holder", cert.params, c.common.series.seed));
    for (const auto &r : cert.items) {
        write_jsonl(s, to_json(r, cert.params));
    }
    write_jsonl(s, summary_json(cert));
    emit(c.common.series.output, s.str(), out);
    return exit_code(cert.verdict);
}

struct WitnessCommand {
    CertifyCommon common;
    std::string beta = "1";
    std::size_t m_max = 8;
    std::size_t points = 256;
    int bits = 32;
};

inline int run_witness(const WitnessCommand &c, std::ostream &out)
{
    const auto params = c.common.series.params();
    const auto beta = parse_rational(c.beta);
    require_improvable(params, beta);
    const auto xs = random_dyadic_points(c.points, c.bits, c.common.series.seed);
    const auto sweep = with_precision_retry(
        params, [&](const SeriesParams &p) { return witness_sweep(p, beta, xs, c.m_max); }, c.common.max_precision);
    std::ostringstream s;
    write_jsonl(s, header_json("witness", sweep.params, c.common.series.seed));
    if (c.common.items) {
        for (const auto &r : sweep.items) {
            write_jsonl(s, to_json(r, sweep.params));
        }
    }
    write_jsonl(s, summary_json(sweep));
    emit(c.common.series.output, s.str(), out);
    return exit_code(sweep.verdict);
}

struct L1Command {
    CertifyCommon common;
    std::size_t m = 0;
    std::string M = "1";
    int depth = kDefaultRefinementDepth;
};

inline int run_l1(const L1Command &c, std::ostream &out)
{
    const auto params = c.common.series.params();
    require_improvable(params, Rational(1));
    const auto M = parse_dyadic(c.M);
    if (M < DyadicRational(1)) {
        throw UsageError("M must be at least 1");
    }
    const auto rep = with_precision_retry(
        params, [&](const SeriesParams &p) { return l1_lower_bound_check(p, c.m, M, c.depth); },
        c.common.max_precision);
    std::ostringstream s;
    write_jsonl(s, header_json("l1", rep.params, c.common.series.seed));
    write_jsonl(s, to_json(rep));
    emit(c.common.series.output, s.str(), out);
    return exit_code(rep.verdict);
}

struct TrendCommand {
    CertifyCommon common;
    std::string beta = "1";
    std::string x = "0";
    std::size_t m_max = 8;
};

inline int run_trend(const TrendCommand &c, std::ostream &out)
{
    const auto params = c.common.series.params();
    const auto beta = parse_rational(c.beta);
    const auto x = parse_dyadic(c.x);
    require_improvable(params, beta);
    const auto t = with_precision_retry(
        params, [&](const SeriesParams &p) { return divergence_trend(p, x, beta, c.m_max); }, c.common.max_precision);
    std::ostringstream s;
    write_jsonl(s, header_json("trend", t.params, c.common.series.seed));
    for (const auto &r : t.steps) {
        write_jsonl(s, to_json(r, t.params));
    }
    write_jsonl(s, summary_json(t));
    emit(c.common.series.output, s.str(), out);
    return exit_code(t.verdict);
}

// ----- pde ----------------------------------------------------------------

struct PdeCommon {
    std::string builder = "rhombus-113";
    std::string K;            // profile spec: knopp:p/q,nu | sine:amp | const:c | zero
    std::string scale = "1/4";
    double delta = 0.05;
    std::uint64_t seed = 0;
    std::string output;
    double tol = 1e-8;

    std::string header(const std::string &command) const
    {
        return std::string("knopp ") + kVersion + " command=" + command + " builder=" + builder +
               " K=" + (K.empty() ? "default" : K) + " scale=" + scale + " seed=" + std::to_string(seed);
    }
};

inline void add_pde_options(CLI::App *cmd, PdeCommon &c)
{
    cmd->add_option("--builder", c.builder, "rhombus-113 | planar-b8 | scalar-aronsson | aronsson-map | four-thirds | "
                                            "parabolic | affine")
        ->capture_default_str();
    cmd->add_option("--K", c.K, "profile: knopp:p/q,nu | sine:amplitude | const:c | zero");
    cmd->add_option("--scale", c.scale, "scale of a knopp profile (planar-b8)")->capture_default_str();
    cmd->add_option("--delta", c.delta, "margin below 1 of sup|F'| for primitive profiles")->capture_default_str();
    cmd->add_option("--seed", c.seed, "sampling seed")->capture_default_str();
    cmd->add_option("--tol", c.tol, "relative rank tolerance")->capture_default_str();
    cmd->add_option("-o,--output", c.output, "output file (default: standard output)");
}

namespace detail
{

inline SeriesParams parse_knopp_spec(const std::string &body)
{
    const auto comma = body.find(',');
    if (comma == std::string::npos) {
        throw UsageError("knopp profile must be knopp:p/q,nu");
    }
    SeriesOptions o;
    o.alpha = body.substr(0, comma);
    const auto nu = parse_rational(body.substr(comma + 1));
    if (!is_integer(nu) || nu < 1) {
        throw UsageError("knopp profile: nu must be a positive integer");
    }
    o.nu = nu.get_num().get_ui();
    return o.params();
}

// K-type profile (planar map)
inline pde::Profile1d value_profile(const PdeCommon &c, const std::string &fallback)
{
    const std::string spec = c.K.empty() ? fallback : c.K;
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "knopp") {
        return pde::knopp_profile(parse_knopp_spec(body), parse_decimal(c.scale).get_d());
    }
    if (kind == "sine") {
        return pde::sine_profile(parse_decimal(body).get_d());
    }
    if (kind == "const") {
        return pde::constant_profile(parse_decimal(body).get_d());
    }
    if (kind == "zero") {
        return pde::zero_profile();
    }
    throw UsageError("unknown profile '" + spec + "'");
}

// F-type profile (segment builders): knopp means the scaled primitive of K
inline pde::Profile1d primitive_profile(const PdeCommon &c, const std::string &fallback)
{
    const std::string spec = c.K.empty() ? fallback : c.K;
    if (spec.rfind("knopp:", 0) == 0) {
        return pde::scaled_knopp_primitive(parse_knopp_spec(spec.substr(6)), c.delta);
    }
    return value_profile(c, fallback);
}

inline pde::SegmentSpec default_segment()
{
    pde::SegmentSpec seg;
    seg.a = pde::Vec::Unit(2, 0);
    seg.b = pde::Vec::Unit(2, 1);
    seg.eta = (pde::Vec(2) << 1.0, 2.0).finished();
    return seg;
}

inline pde::Mat lattice_frame()
{
    const double c = std::sqrt(0.5);
    return (pde::Mat(2, 2) << c, -c, c, c).finished();
}

template <class Field>
Field values_only(Field f)
{
    if constexpr (std::is_same_v<Field, pde::ScalarField>) {
        f.gradient = nullptr;
    } else {
        f.jacobian = nullptr;
    }
    return f;
}

} // namespace detail

struct ResidualCommand {
    PdeCommon common;
    std::string h = "0.02,0.01,0.005";
    std::size_t points = 64;
};

inline int run_residual(const ResidualCommand &c, std::ostream &out)
{
    using namespace pde;
    const auto hs = parse_list(c.h);
    const auto &b = c.common.builder;
    const double h_max = *std::max_element(hs.begin(), hs.end());
    ResidualReport rep;
    if (b == "rhombus-113") {
        // value stencils along the lattice directions (1, +-1)/sqrt 2
        const Mat Q = detail::lattice_frame();
        const auto v = compose_orthogonal(detail::values_only(rhombus_map()), Q);
        const double r = std::numbers::pi - 4 * h_max - 0.05;
        auto xs = random_samples(Vec::Constant(2, -r), Vec::Constant(2, r), c.points, c.common.seed,
                                 Domain::custom([r](const Vec &p) { return std::abs(p(0) + p(1)) < r &&
                                                                            std::abs(p(0) - p(1)) < r; },
                                                "shrunk rhombus"));
        for (auto &x : xs) {
            x = (Q.transpose() * x).eval();
        }
        rep = residual_table("infinity_laplacian_vector", vector_laplacian_residual(v, c.common.tol), xs, hs);
    } else if (b == "four-thirds") {
        const auto u = detail::values_only(aronsson_four_thirds());
        auto xs = random_samples(Vec::Constant(2, 0.5), Vec::Constant(2, 1.5), c.points, c.common.seed);
        rep = residual_table("infinity_laplacian_scalar", scalar_laplacian_residual(u), xs, hs);
    } else if (b == "scalar-aronsson") {
        const auto seg = detail::default_segment();
        const auto u = build_scalar_aronsson_solution(seg, detail::primitive_profile(c.common, "sine:0.5"));
        auto xs = random_samples(Vec::Constant(2, -2), Vec::Constant(2, 2), c.points, c.common.seed);
        rep = residual_table("aronsson_scalar", aronsson_scalar_residual(flat_segment_hamiltonian(seg), u), xs, hs);
    } else if (b == "aronsson-map") {
        const auto seg = detail::default_segment();
        const auto u = build_aronsson_map(seg, detail::primitive_profile(c.common, "sine:0.5"));
        auto xs = random_samples(Vec::Constant(2, -2), Vec::Constant(2, 2), c.points, c.common.seed);
        rep = residual_table("aronsson_system",
                             aronsson_system_residual(rank_one_flat_hamiltonian(seg), u, c.common.tol), xs, hs);
    } else if (b == "planar-b8") {
        const auto u = build_planar_infinity_harmonic(detail::value_profile(c.common, "sine:0.5"));
        auto xs = random_samples(Vec::Constant(2, -2), Vec::Constant(2, 2), c.points, c.common.seed);
        rep = residual_table("infinity_laplacian_vector", vector_laplacian_residual(u, c.common.tol), xs, hs);
    } else {
        throw UsageError("pde residual: unsupported builder '" + b + "'");
    }
    std::ostringstream s;
    write_csv(s, rep, {c.common.header("pde residual") + " h=" + c.h + " points=" + std::to_string(c.points)});
    emit(c.common.output, s.str(), out);
    return kPass;
}

struct StructureCommand {
    PdeCommon common;
    std::size_t samples = 10'000;
    double box = 3;
};

inline int run_structure(const StructureCommand &c, std::ostream &out)
{
    using namespace pde;
    const auto &b = c.common.builder;
    const Vec lo = Vec::Constant(2, -c.box);
    const Vec hi = Vec::Constant(2, c.box);
    Json j{{"kind", "structure"}, {"builder", b}};
    bool ok = true;
    std::optional<Hamiltonian> H;
    std::optional<std::pair<Mat, Mat>> segment;
    VectorField u;
    std::optional<double> det_floor;
    if (b == "planar-b8") {
        const auto K = detail::value_profile(c.common, "knopp:1/2,2");
        u = build_planar_infinity_harmonic(K);
        det_floor = std::cos(2 * K.value_bound);
        j["K"] = K.name;
        j["K_sup_bound"] = K.value_bound;
    } else if (b == "rhombus-113") {
        u = rhombus_map();
    } else if (b == "parabolic") {
        u = parabolic_map();
    } else if (b == "aronsson-map" || b == "scalar-aronsson") {
        const auto seg = detail::default_segment();
        const auto F = detail::primitive_profile(c.common, "knopp:1/2,2");
        j["F"] = F.name;
        j["F_prime_bound"] = F.derivative_bound;
        if (b == "aronsson-map") {
            u = build_aronsson_map(seg, F);
            H = rank_one_flat_hamiltonian(seg);
            segment = {seg.matrix_a(), seg.matrix_b()};
        } else {
            u = as_vector_field(build_scalar_aronsson_solution(seg, F));
            H = flat_segment_hamiltonian(seg);
            segment = {Mat(seg.a.transpose()), Mat(seg.b.transpose())};
        }
    } else {
        throw UsageError("pde structure: unsupported builder '" + b + "'");
    }
    const auto xs = random_samples(lo, hi, c.samples, c.common.seed, u.domain);
    StructureOptions opts;
    opts.rank_tol = c.common.tol;
    const auto r = verify_first_order_structure(u, xs, H ? &*H : nullptr, opts);
    j["samples"] = r.samples;
    j["frob2_min"] = r.frob2_min;
    j["frob2_max"] = r.frob2_max;
    j["rank_min"] = r.rank_min;
    j["rank_max"] = r.rank_max;
    j["rank_ambiguous"] = r.rank_ambiguous;
    if (r.det_min) {
        j["det_min"] = *r.det_min;
    }
    if (H) {
        j["hamiltonian"] = H->name;
        j["H_min"] = r.H_min;
        j["H_max"] = r.H_max;
        j["HP_spread"] = r.HP_spread;
    }
    j["first_term_zero"] = r.first_term_zero;
    j["normal_term_zero"] = r.normal_term_zero;
    ok = r.positive();
    if (det_floor) {
        j["det_floor"] = *det_floor;
        const bool det_ok = r.det_min && *r.det_min >= *det_floor - 1e-12;
        j["det_certified"] = det_ok;
        ok = ok && det_ok;
    }
    if (segment) {
        const auto s = gradient_segment_check(u, xs, segment->first, segment->second);
        j["segment_t_min"] = s.t_min;
        j["segment_t_max"] = s.t_max;
        j["segment_distance_max"] = s.max_distance;
        j["segment_inside"] = s.inside;
        ok = ok && s.inside;
    }
    j["verdict"] = ok ? "pass" : "fail";
    std::ostringstream s;
    write_jsonl(s, Json{{"kind", "header"},
                        {"report", "structure"},
                        {"builder", b},
                        {"K", c.common.K.empty() ? "default" : c.common.K},
                        {"scale", c.common.scale},
                        {"seed", c.common.seed},
                        {"version", kVersion}});
    write_jsonl(s, j);
    emit(c.common.output, s.str(), out);
    return ok ? kPass : kFail;
}

struct PhaseCommand {
    PdeCommon common;
    std::size_t grid = 201;
    double margin = 0.1;
    double h = 1e-5;
    std::string format = "pgm";
};

inline int run_phase(const PhaseCommand &c, std::ostream &out)
{
    using namespace pde;
    const auto &b = c.common.builder;
    VectorField u;
    PhaseGrid grid;
    if (b == "rhombus-113") {
        u = rhombus_map();
        grid = rhombus_grid(c.grid, c.margin);
    } else {
        grid = PhaseGrid{-2, 2, -2, 2, c.grid, c.grid, {}};
        if (b == "aronsson-map") {
            u = build_aronsson_map(detail::default_segment(), detail::primitive_profile(c.common, "knopp:1/2,2"));
        } else if (b == "affine") {
            u = affine_map((Mat(2, 2) << 2, 1, 0, 1).finished(), Vec::Zero(2));
        } else if (b == "parabolic") {
            u = parabolic_map();
        } else {
            throw UsageError("pde phase: unsupported builder '" + b + "'");
        }
    }
    const auto map = phase_map(u, grid, c.h, c.common.tol);
    std::ostringstream h;
    h << c.common.header("pde phase") << " grid=" << c.grid << " tol=" << c.common.tol << " h=" << c.h
      << " codes: rank, 254 ambiguous, 255 outside";
    const std::vector<std::string> header{h.str()};
    std::ostringstream s;
    if (c.format == "csv") {
        write_csv(s, map, header);
    } else {
        write_pgm(s, map, header);
    }
    emit(c.common.output, s.str(), out);
    return kPass;
}

// ----- config file --------------------------------------------------------

// "key = value" lines; '#' starts a comment.
inline std::vector<std::pair<std::string, std::string>> read_config(const std::string &path)
{
    std::ifstream f(path);
    if (!f) {
        throw UsageError("cannot read config file '" + path + "'");
    }
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto t = std::string(knopp::detail::trim(line));
        if (t.empty()) {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        auto key = std::string(knopp::detail::trim(std::string_view(t).substr(0, eq)));
        auto value = std::string(knopp::detail::trim(std::string_view(t).substr(eq + 1)));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        while (!key.empty() && key.front() == '-') {
            key.erase(0, 1);
        }
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

// Inserts config entries known to the selected subcommand right after the
// subcommand words, so that explicit flags (parsed later) take precedence.
inline std::vector<std::string> apply_config(CLI::App &app, std::vector<std::string> args)
{
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<long>(i));
            break;
        }
    }
    if (!path) {
        return args;
    }
    CLI::App *leaf = &app;
    std::size_t pos = 0;
    while (pos < args.size()) {
        auto *sub = leaf->get_subcommand_no_throw(args[pos]);
        if (!sub) {
            break;
        }
        leaf = sub;
        ++pos;
    }
    std::vector<std::string> injected;
    for (const auto &[key, value] : read_config(*path)) {
        auto *opt = leaf->get_option_no_throw("--" + key);
        if (!opt) {
            continue;
        }
        if (opt->get_items_expected_max() == 0) {
            if (value == "true" || value == "1" || value == "yes" || value == "on") {
                injected.push_back("--" + key);
            }
            continue;
        }
        injected.push_back("--" + key);
        injected.push_back(value);
    }
    args.insert(args.begin() + static_cast<long>(pos), injected.begin(), injected.end());
    return args;
}

// ----- entry point --------------------------------------------------------

inline int run(const std::vector<std::string> &argv_tail, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Knopp-class singular functions: evaluation, certificates and PDE checks", "knopp"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.add_option("--config", "file of key = value lines; explicit flags override it");

    EvalCommand eval_cmd;
    auto *eval = app.add_subcommand("eval", "enclosure of K(x) at a dyadic point");
    add_series_options(eval, eval_cmd.series);
    eval->add_option("--x", eval_cmd.x, "dyadic point n/2^e or exact decimal")->required();
    eval->add_option("--eps", eval_cmd.eps, "target width")->capture_default_str();
    eval->add_option("--term-cap", eval_cmd.term_cap, "maximum number of series terms")->capture_default_str();
    eval->add_flag("--json", eval_cmd.json, "print one JSON object");

    SampleCommand sample_cmd;
    auto *sample = app.add_subcommand("sample", "fixed-term partial sums on a dyadic grid");
    add_series_options(sample, sample_cmd.series);
    sample->add_option("--interval", sample_cmd.interval, "a:b")->capture_default_str();
    sample->add_option("--points", sample_cmd.points)->capture_default_str()->check(CLI::Range(2, 1 << 24));
    sample->add_option("--terms", sample_cmd.terms)->capture_default_str()->check(CLI::Range(1, 100000));
    sample->add_option("--format", sample_cmd.format)->capture_default_str()->check(CLI::IsMember({"csv", "svg"}));

    auto *certify = app.add_subcommand("certify", "certified checks of the estimates");
    certify->require_subcommand(1);

    HolderCommand holder_cmd;
    auto *holder = certify->add_subcommand("holder", "|K(x) - K(y)| <= C |x - y|^alpha on random pairs");
    add_certify_options(holder, holder_cmd.common);
    holder->add_option("--pairs", holder_cmd.pairs)->capture_default_str();
    holder->add_option("--max-scale", holder_cmd.max_scale, "distances 2^-j, j <= max-scale")
        ->capture_default_str()
        ->check(CLI::Range(0, 60));
    holder->add_option("--offset-bits", holder_cmd.offset_bits)->capture_default_str()->check(CLI::Range(1, 62));

    WitnessCommand witness_cmd;
    auto *witness = certify->add_subcommand("witness", "difference quotients at the witness shifts t_m(x)");
    add_certify_options(witness, witness_cmd.common);
    witness->add_option("--beta", witness_cmd.beta)->capture_default_str();
    witness->add_option("--m-max", witness_cmd.m_max)->capture_default_str();
    witness->add_option("--points", witness_cmd.points)->capture_default_str();
    witness->add_option("--bits", witness_cmd.bits, "fractional bits of the random points")
        ->capture_default_str()
        ->check(CLI::Range(1, 62));

    L1Command l1_cmd;
    auto *l1 = certify->add_subcommand("l1", "averaged L1 norm of forward difference quotients");
    add_certify_options(l1, l1_cmd.common);
    l1->add_option("--m", l1_cmd.m)->capture_default_str();
    l1->add_option("--M", l1_cmd.M, "half-width of the window, dyadic >= 1")->capture_default_str();
    l1->add_option("--depth", l1_cmd.depth, "bisection cap for cells of undecided sign")->capture_default_str();

    TrendCommand trend_cmd;
    auto *trend = certify->add_subcommand("trend", "geometric growth of the lower bounds in m");
    add_certify_options(trend, trend_cmd.common);
    trend->add_option("--beta", trend_cmd.beta)->capture_default_str();
    trend->add_option("--x", trend_cmd.x)->capture_default_str();
    trend->add_option("--m-max", trend_cmd.m_max)->capture_default_str();

    auto *pde_app = app.add_subcommand("pde", "explicit PDE solutions and their checks");
    pde_app->require_subcommand(1);

    ResidualCommand residual_cmd;
    auto *residual = pde_app->add_subcommand("residual", "finite-difference residual table");
    residual->set_help_flag("--help", "print this help message and exit");
    add_pde_options(residual, residual_cmd.common);
    residual->add_option("--h", residual_cmd.h, "comma-separated steps")->capture_default_str();
    residual->add_option("--points", residual_cmd.points)->capture_default_str();

    StructureCommand structure_cmd;
    structure_cmd.common.builder = "planar-b8";
    auto *structure = pde_app->add_subcommand("structure", "first-order facts behind the contracted systems");
    add_pde_options(structure, structure_cmd.common);
    structure->add_option("--samples", structure_cmd.samples)->capture_default_str();
    structure->add_option("--box", structure_cmd.box, "samples in [-box, box]^2")->capture_default_str();

    PhaseCommand phase_cmd;
    auto *phase = pde_app->add_subcommand("phase", "raster of the numerical rank of Du");
    phase->set_help_flag("--help", "print this help message and exit");
    add_pde_options(phase, phase_cmd.common);
    phase->add_option("--grid", phase_cmd.grid)->capture_default_str()->check(CLI::Range(2, 4001));
    phase->add_option("--margin", phase_cmd.margin)->capture_default_str();
    phase->add_option("--h", phase_cmd.h, "difference step when Du has no closed form")->capture_default_str();
    phase->add_option("--format", phase_cmd.format)->capture_default_str()->check(CLI::IsMember({"pgm", "csv"}));

    try {
        auto args = apply_config(app, argv_tail);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kPass : kUsage;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*eval) {
            return run_eval(eval_cmd, out);
        }
        if (*sample) {
            return run_sample(sample_cmd, out);
        }
        if (*holder) {
            return run_holder(holder_cmd, out);
        }
        if (*witness) {
            return run_witness(witness_cmd, out);
        }
        if (*l1) {
            return run_l1(l1_cmd, out);
        }
        if (*trend) {
            return run_trend(trend_cmd, out);
        }
        if (*residual) {
            return run_residual(residual_cmd, out);
        }
        if (*structure) {
            return run_structure(structure_cmd, out);
        }
        if (*phase) {
            return run_phase(phase_cmd, out);
        }
    } catch (const RegimeError &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const PrecisionUnattainable &e) {
        err << "error: " << e.what() << " (achievable width " << e.achievable_width().to_string() << ")\n";
        return kUsage;
    } catch (const pde::RegularityError &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const pde::DomainError &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kFail;
    }
    return kUsage;
}

inline int run(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args, out, err);
}

} // namespace knopp::cli

#endif
