#include "consctl/report.hpp"

int main(int argc, char** argv) { return consctl::cli::run(argc, argv); }
