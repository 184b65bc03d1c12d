#include <iostream>

#include "penreg/cli.hpp"

int main(int argc, char** argv)
{
    return penreg::run_cli(argc, argv, std::cout, std::cerr);
}
