#pragma once

namespace dbsim {

inline constexpr const char* kVersion = "0.1.0";

} // namespace dbsim
