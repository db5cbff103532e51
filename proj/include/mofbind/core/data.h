#pragma once
#include <string>
#include <string_view>

namespace mofbind {

/// Shipped data directory: $MOFBIND_DATA_DIR if set, else the build-time
/// location.
std::string data_directory();
/// data_directory() / relative
std::string data_path(std::string_view relative);

} // namespace mofbind
