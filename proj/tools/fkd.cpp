#include "fkd/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return fkd::cli::run(argc, argv, std::cout, std::cerr);
}
