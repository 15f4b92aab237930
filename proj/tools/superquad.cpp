#include "cli.hpp"

int main(int argc, char** argv) { return superquad::cli::run(argc, argv); }
