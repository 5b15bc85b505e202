#include "sphfrieze/cli.hpp"

#include <cstdio>

namespace sphf {

int cli_main(int, char**) {
    std::fputs("not implemented\n", stderr);
    return 2;
}

}  // namespace sphf
