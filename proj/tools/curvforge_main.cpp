#include "curvforge/cli.hpp"

int main(int argc, char** argv)
{
    return curvforge::run_cli(argc, argv);
}
