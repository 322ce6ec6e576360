#include "cli.hpp"

int main(int argc, char** argv) { return mixnorm::cli::dispatch(argc, argv); }
