#include "zsk/cli.hpp"

int main(int argc, char** argv) { return zsk::run(argc, argv); }
