#pragma once

namespace sphf {

// Entry point shared by the installed binary and the CLI tests.
int cli_main(int argc, char** argv);

}  // namespace sphf
