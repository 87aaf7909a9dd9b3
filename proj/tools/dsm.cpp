#include "dsm/app/commands.hpp"

int main(int argc, char** argv) { return dsm::app::cli_main(argc, argv); }
