#pragma once

#include <filesystem>

namespace ethoscan {

/// Root holding `rules/` and `data/`: $ETHOSCAN_DATA_DIR when set, else the
/// source tree the library was built from.
std::filesystem::path data_dir();

}  // namespace ethoscan
