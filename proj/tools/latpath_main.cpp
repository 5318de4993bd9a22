#include "latpath/cli.hpp"

int main(int argc, char** argv) {
    return latpath::cli::run(argc, argv);
}
