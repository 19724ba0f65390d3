#include <iostream>

#include "feedenrich/pipeline.hpp"

int main(int argc, char** argv) { return feedenrich::run_cli(argc, argv, std::cout, std::cerr); }
