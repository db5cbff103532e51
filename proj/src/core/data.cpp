#include <cstdlib>
#include <filesystem>
#include <mofbind/core/data.h>

namespace mofbind {

std::string data_directory() {
  if (const char *env = std::getenv("MOFBIND_DATA_DIR"); env && *env)
    return env;
  return MOFBIND_DATA_DIR;
}

std::string data_path(std::string_view relative) {
  return (std::filesystem::path(data_directory()) / relative).string();
}

} // namespace mofbind
