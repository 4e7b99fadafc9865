#include <feedrag/cli.hpp>

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return feedrag::cli::run_cli(std::move(args), std::cout, std::cerr);
}
