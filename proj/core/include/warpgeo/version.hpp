#pragma once

namespace warpgeo {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace warpgeo
