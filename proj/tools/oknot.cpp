#include "oharaknot/app.hpp"

#include <iostream>

int main(int argc, char** argv) { return oknot::app::run(argc, argv, std::cout, std::cerr); }
