#include "communitylens/cli.hpp"

int main(int argc, char** argv) { return communitylens::cli::run(argc, argv); }
