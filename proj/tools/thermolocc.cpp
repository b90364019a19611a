#include "cli_app.hpp"

int main(int argc, char** argv) { return thermolocc::cli::run(argc, argv); }
