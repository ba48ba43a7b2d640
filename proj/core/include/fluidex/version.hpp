#pragma once

#include <map>
#include <string>

namespace fluidex {

// fluidex, eigen, fftw and lapack version strings.
std::map<std::string, std::string> library_versions();

}  // namespace fluidex
