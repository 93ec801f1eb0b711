#include "achronal/experiments.hpp"

int main(int argc, char** argv) { return achronal::cli_main(argc, argv); }
