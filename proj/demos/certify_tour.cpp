// Prints the constants and lower bounds for alpha = 1/2, nu = 2 next to the
// certified quantities they control.

#include <iostream>

#include <knopp/certify/holder.hpp>
#include <knopp/certify/l1.hpp>
#include <knopp/certify/witness.hpp>

int main()
{
    using namespace knopp;
    const SeriesParams p(make_rational(1, 2), 2);
    std::cout << p.to_string() << ", lambda = " << p.lambda().to_string() << '\n';
    std::cout << "Hoelder constant C = " << to_string(*holder_constant_exact(p)) << '\n';

    HolderSweepOptions opts;
    opts.pairs = 2000;
    const auto cert = holder_sweep(p, opts);
    std::cout << "largest |K(x)-K(y)| / |x-y|^alpha over " << cert.pairs_checked
              << " pairs: " << cert.worst_ratio.to_string() << "\n\n";

    const auto xs = random_dyadic_points(64, 40, 1);
    const auto sweep = witness_sweep(p, make_rational(1), xs, 6);
    std::cout << "m  bound      smallest witness quotient\n";
    for (std::size_t m = 0; m <= 6; ++m) {
        double least = 1e300;
        for (const auto &w : sweep.items) {
            if (w.m == m) {
                least = std::min(least, w.quotient.lo_double());
            }
        }
        std::cout << m << "  " << to_string(*sweep.bounds[m].exact()) << "\t   " << least << '\n';
    }

    std::cout << "\nm  mean of |K(x+h)-K(x)|/h over [-1,1]   target\n";
    for (std::size_t m = 0; m <= 3; ++m) {
        const auto r = l1_lower_bound_check(p, m, DyadicRational(1));
        std::cout << m << "  " << r.integral.mid_double() << "\t\t\t\t  " << r.target.mid_double() << '\n';
    }
    return 0;
}
