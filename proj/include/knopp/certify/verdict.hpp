#ifndef KNOPP_CERTIFY_VERDICT_HPP
#define KNOPP_CERTIFY_VERDICT_HPP

#include <stdexcept>
#include <string>

#include "../series_params.hpp"

namespace knopp
{

// Outcome of a certified comparison. An interval comparison that straddles
// the threshold is Inconclusive, never Fail.
enum class Verdict { Pass, Fail, Inconclusive };

inline const char *to_string(Verdict v)
{
    switch (v) {
    case Verdict::Pass:
        return "pass";
    case Verdict::Fail:
        return "fail";
    case Verdict::Inconclusive:
        return "inconclusive";
    }
    return "unknown";
}

// Conjunction: any Fail dominates, then any Inconclusive.
inline Verdict combine(Verdict a, Verdict b)
{
    if (a == Verdict::Fail || b == Verdict::Fail) {
        return Verdict::Fail;
    }
    if (a == Verdict::Inconclusive || b == Verdict::Inconclusive) {
        return Verdict::Inconclusive;
    }
    return Verdict::Pass;
}

// value <= bound
inline Verdict certify_le(const Enclosure &value, const Enclosure &bound)
{
    if (certainly_le(value, bound)) {
        return Verdict::Pass;
    }
    if (certainly_gt(value, bound)) {
        return Verdict::Fail;
    }
    return Verdict::Inconclusive;
}

// value >= bound
inline Verdict certify_ge(const Enclosure &value, const Enclosure &bound)
{
    return certify_le(bound, value);
}

// Precondition violation of a certificate (for instance 2 nu (1 - alpha) <= 1):
// a usage problem, not a counterexample.
class RegimeError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

inline constexpr mpfr_prec_t kMaxRetryPrecision = 1024;

// Re-runs `run(params)` at doubled precision while its verdict is
// Inconclusive. `run` returns a report type with a `verdict` member.
template <class Run>
auto with_precision_retry(const SeriesParams &params, Run &&run, mpfr_prec_t max_precision = kMaxRetryPrecision)
{
    auto report = run(params);
    mpfr_prec_t p = params.precision();
    while (report.verdict == Verdict::Inconclusive && p * 2 <= max_precision) {
        p *= 2;
        report = run(params.with_precision(p));
    }
    return report;
}

} // namespace knopp

#endif
