#include <knopp/cli.hpp>

int main(int argc, char **argv)
{
    return knopp::cli::run(argc, argv);
}
