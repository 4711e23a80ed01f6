#pragma once

namespace lpt {

// Set by the build (git describe when available).
const char* version();

}  // namespace lpt
