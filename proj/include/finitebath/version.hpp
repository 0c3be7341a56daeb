// version.hpp: Library version, echoed into every report

#pragma once

namespace finitebath {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace finitebath
