// Single compilation of the bundled test framework; test binaries link this.
#include <catch2/catch_amalgamated.cpp>
