#include "catune/cli.hpp"

int main(int argc, char** argv) { return catune::dispatch(argc, argv); }
