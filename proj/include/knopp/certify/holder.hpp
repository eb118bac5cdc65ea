#ifndef KNOPP_CERTIFY_HOLDER_HPP
#define KNOPP_CERTIFY_HOLDER_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "../knopp_series.hpp"
#include "bounds.hpp"
#include "verdict.hpp"

namespace knopp
{

struct HolderPairResult {
    DyadicRational x;
    DyadicRational y;
    Enclosure delta; // |K(x) - K(y)|
    Enclosure bound; // C |x - y|^alpha
    Enclosure ratio; // |K(x) - K(y)| / |x - y|^alpha
    Verdict verdict = Verdict::Inconclusive;
};

// Certified check of |K(x) - K(y)| <= C |x - y|^alpha for 0 < |x - y| <= 2.
// Both values are exact lambda-polynomials at dyadic points, so the only
// rounding is in lambda, the power and the constant.
inline HolderPairResult check_holder_pair(const SeriesParams &params, const DyadicRational &x, const DyadicRational &y,
                                          const Enclosure &constant)
{
    const auto dist = (x - y).abs();
    if (dist.is_zero()) {
        throw std::invalid_argument("check_holder_pair: x == y");
    }
    if (dist > DyadicRational(2)) {
        throw std::invalid_argument("check_holder_pair: |x - y| must not exceed 2");
    }
    const auto prec = params.precision();
    HolderPairResult r{x, y, {}, {}, {}, Verdict::Inconclusive};
    r.delta = lambdapoly_eval(knopp_poly(params, x) - knopp_poly(params, y), params.lambda()).abs();
    const Enclosure dist_pow = Enclosure(dist, prec).pow(params.alpha());
    r.bound = constant * dist_pow;
    r.ratio = r.delta / dist_pow;
    r.verdict = certify_le(r.delta, r.bound);
    return r;
}

inline HolderPairResult check_holder_pair(const SeriesParams &params, const DyadicRational &x, const DyadicRational &y)
{
    return check_holder_pair(params, x, y, holder_constant(params));
}

struct HolderCertificate {
    SeriesParams params;
    Enclosure constant_C;
    std::size_t pairs_checked = 0;
    std::size_t failures = 0;
    std::size_t inconclusive = 0;
    Enclosure worst_ratio;
    bool pass = false;
    Verdict verdict = Verdict::Pass;
    std::vector<HolderPairResult> items; // kept only on request
};

struct HolderSweepOptions {
    std::size_t pairs = 10'000;
    // distances 2^-j for j = 0 .. max_scale
    int max_scale = 20;
    // resolution of the random base point in [-1, 1]
    int offset_bits = 32;
    std::uint64_t seed = 0x5eedULL;
    bool keep_items = false;
};

// Random pairs (x, x +/- d) with x in [-1, 1] and d = 2^-j at every scale
// j = 0 .. max_scale; every second pair gets a dyadic jitter d = 2^-j (1 + u)
// with u in [0, 1) so that non-power distances are covered as well.
inline std::vector<std::pair<DyadicRational, DyadicRational>> holder_sample_pairs(const HolderSweepOptions &opts)
{
    std::mt19937_64 rng(opts.seed);
    const std::int64_t span = std::int64_t{1} << opts.offset_bits;
    std::uniform_int_distribution<std::int64_t> pick_x(-span, span);
    std::uniform_int_distribution<int> pick_scale(0, opts.max_scale);
    std::uniform_int_distribution<std::int64_t> pick_jitter(0, (std::int64_t{1} << 16) - 1);
    std::bernoulli_distribution pick_sign(0.5);

    std::vector<std::pair<DyadicRational, DyadicRational>> out;
    out.reserve(opts.pairs);
    for (std::size_t i = 0; i < opts.pairs; ++i) {
        DyadicRational x(BigInt(static_cast<long>(pick_x(rng))), static_cast<std::uint64_t>(opts.offset_bits));
        // scales cycle so that every j is hit evenly
        const int j = opts.max_scale > 0 ? static_cast<int>(i % static_cast<std::size_t>(opts.max_scale + 1))
                                         : pick_scale(rng);
        DyadicRational d = DyadicRational::pow2(-j);
        if (i % 2 == 1) {
            const DyadicRational u(BigInt(static_cast<long>(pick_jitter(rng))), 16);
            d = d + d * u;
        }
        const auto y = pick_sign(rng) ? x + d : x - d;
        out.emplace_back(std::move(x), y);
    }
    return out;
}

inline HolderCertificate holder_certificate(const SeriesParams &params,
                                            const std::vector<std::pair<DyadicRational, DyadicRational>> &pairs,
                                            bool keep_items = false)
{
    HolderCertificate cert{params, holder_constant(params), 0, 0, 0, Enclosure(0L, params.precision()),
                           false,  Verdict::Pass,           {}};
    for (const auto &[x, y] : pairs) {
        auto r = check_holder_pair(params, x, y, cert.constant_C);
        ++cert.pairs_checked;
        if (r.verdict == Verdict::Fail) {
            ++cert.failures;
        } else if (r.verdict == Verdict::Inconclusive) {
            ++cert.inconclusive;
        }
        cert.verdict = combine(cert.verdict, r.verdict);
        if (mpfr_greater_p(r.ratio.hi(), cert.worst_ratio.hi())) {
            cert.worst_ratio = r.ratio;
        }
        if (keep_items) {
            cert.items.push_back(std::move(r));
        }
    }
    cert.pass = cert.verdict == Verdict::Pass;
    return cert;
}

inline HolderCertificate holder_sweep(const SeriesParams &params, const HolderSweepOptions &opts = {})
{
    return holder_certificate(params, holder_sample_pairs(opts), opts.keep_items);
}

} // namespace knopp

#endif
