#include "lpt/version.hpp"

#ifndef LPT_VERSION_STRING
#define LPT_VERSION_STRING "v0.1.0"
#endif

namespace lpt {

const char* version() { return LPT_VERSION_STRING; }

}  // namespace lpt
