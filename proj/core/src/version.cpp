#include "fluidex/version.hpp"

#include <fftw3.h>

#include <Eigen/Core>
#include <complex>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#ifndef FLUIDEX_VERSION_STRING
#define FLUIDEX_VERSION_STRING "0.0.0"
#endif

namespace fluidex {

std::map<std::string, std::string> library_versions() {
  lapack_int maj = 0, min = 0, pat = 0;
  LAPACKE_ilaver(&maj, &min, &pat);
  return {
      {"fluidex", FLUIDEX_VERSION_STRING},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"fftw", fftw_version},
      {"lapack", std::to_string(maj) + "." + std::to_string(min) + "." + std::to_string(pat)},
  };
}

}  // namespace fluidex
