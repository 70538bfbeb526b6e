#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace selfsim {

// Machine files compiled into the library: adding.gt, grigorchuk.gt,
// lamplighter.gt.
std::optional<std::string> bundled_machine(std::string_view name);
std::vector<std::string> bundled_machine_names();

}  // namespace selfsim
