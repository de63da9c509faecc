#pragma once

namespace toppleone {

inline constexpr const char* kArtifactName = "toppleone";
inline constexpr const char* kArtifactVersion = "1.0.0";

}  // namespace toppleone
