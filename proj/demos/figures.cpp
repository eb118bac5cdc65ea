// Writes 50-term partial sums for the three figure parameter sets as CSV and
// SVG into the directory given on the command line (default: current one).

#include <filesystem>
#include <iostream>

#include <knopp/cli.hpp>

int main(int argc, char **argv)
{
    const std::filesystem::path dir = argc > 1 ? argv[1] : ".";
    std::filesystem::create_directories(dir);
    const struct {
        const char *name, *alpha, *nu;
    } figs[] = {{"fig1", "1/2", "2"}, {"fig2", "1/8", "4"}, {"fig3", "5/8", "4"}};
    for (const auto &f : figs) {
        for (const char *format : {"csv", "svg"}) {
            const auto path = dir / (std::string(f.name) + "." + format);
            const int code = knopp::cli::run({"sample", "--alpha", f.alpha, "--nu", f.nu, "--interval", "0:2",
                                              "--points", "4096", "--terms", "50", "--format", format, "-o",
                                              path.string()},
                                             std::cout, std::cerr);
            if (code != 0) {
                return code;
            }
            std::cout << path.string() << '\n';
        }
    }
    return 0;
}
