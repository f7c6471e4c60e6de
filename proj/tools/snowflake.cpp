#include <iostream>

#include "snowflake/cli/commands.hpp"
#include "snowflake/parallel.hpp"

int main(int argc, char** argv) {
  snowflake::configure_threads_from_env();
  return snowflake::cli::run(argc, argv, std::cout, std::cerr);
}
