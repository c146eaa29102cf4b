#include "graph_deconv/cli.hpp"

int main(int argc, char** argv) { return graph_deconv::cli::dispatch(argc, argv); }
