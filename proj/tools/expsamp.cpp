#include "expsamp/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return expsamp::cli::run(argc, argv, std::cout, std::cerr);
}
