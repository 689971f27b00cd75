#include <iostream>

#include "logstamp/cli.hpp"

int main(int argc, char** argv) { return logstamp::cli::run(argc, argv, std::cout, std::cerr); }
