#include "qmm/execute.hpp"

int main(int argc, char** argv) { return qmm::run_cli(argc, argv); }
