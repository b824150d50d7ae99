#include "rismux/cli_app.hpp"

int main(int argc, char** argv) {
  return rismux::run_cli(argc, argv);
}
