#ifndef QUANTBAND_VERSION_HPP
#define QUANTBAND_VERSION_HPP

namespace quantband {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace quantband

#endif  // QUANTBAND_VERSION_HPP
