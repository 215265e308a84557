#pragma once

namespace blockrip {

inline constexpr const char* kVersion = "blockrip 0.1.0";

}  // namespace blockrip
