#include "emms/cli/run.hpp"

int main(int argc, char** argv) { return emms::cli::run(argc, argv); }
