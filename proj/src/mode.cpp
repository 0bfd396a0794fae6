#include "mmdd/mode.hpp"

namespace mmdd {

std::optional<Mode> mode_from_string(std::string_view name) {
  for (int i = 0; i < kNumModes; ++i) {
    if (kModeNames[i] == name) return static_cast<Mode>(i);
  }
  return std::nullopt;
}

}  // namespace mmdd
