#pragma once

namespace nfcorr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nfcorr
