// Rank portrait of e^{ix} - e^{iy} on the rhombus as a PGM image, plus the
// first-order summary of the planar map built from a Knopp profile.

#include <fstream>
#include <iostream>

#include <knopp/pde/builders.hpp>
#include <knopp/pde/structure.hpp>

int main(int argc, char **argv)
{
    using namespace knopp;
    using namespace knopp::pde;
    const std::string out = argc > 1 ? argv[1] : "rhombus_rank.pgm";
    const auto map = phase_map(rhombus_map(), rhombus_grid(201), 1e-5, 1e-8);
    std::ofstream f(out);
    write_pgm(f, map, {"rank of Du for e^{ix} - e^{iy}; 255 = outside"});
    std::cout << "wrote " << out << '\n';

    const auto K = knopp_profile(SeriesParams(make_rational(1, 2), 2), 0.25);
    const auto u = build_planar_infinity_harmonic(K);
    const auto xs = random_samples(Vec::Constant(2, -3), Vec::Constant(2, 3), 4000, 5);
    const auto rep = verify_first_order_structure(u, xs);
    std::cout << "planar map, K = 1/4 K_{1/2,2}: |Du|^2 in [" << rep.frob2_min << ", " << rep.frob2_max
              << "], det Du >= " << *rep.det_min << " (floor " << std::cos(2 * K.value_bound) << ")\n";
    return rep.positive() ? 0 : 1;
}
