#include "ammfg/cli_runner.hpp"

int main(int argc, char** argv)
{
    return ammfg::run(argc, argv);
}
