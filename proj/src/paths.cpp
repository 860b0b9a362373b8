#include "ethoscan/paths.hpp"

#include <cstdlib>

namespace ethoscan {

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("ETHOSCAN_DATA_DIR"); env && *env) return env;
  return ETHOSCAN_DEFAULT_DATA_DIR;
}

}  // namespace ethoscan
