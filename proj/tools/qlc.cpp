#include "commands.hpp"

int main(int argc, char** argv) { return qlc::cli::dispatch(argc, argv); }
