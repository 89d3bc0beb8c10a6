#include "crackle/cli.hpp"

int main(int argc, char** argv) { return crackle::dispatch(argc, argv); }
