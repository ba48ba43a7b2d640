#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fluidex/types.hpp"

namespace fluidex {

using Wavevector = std::array<int, 3>;

// Truncated Fourier representation on the 2pi-periodic torus.
// Component arrays are stored in FFT order (axis 0 slowest), with
// f(x) = sum_k c_k exp(i k.x). Grid points are x_j = 2pi j / N.
struct FourierField {
  int dim = 2;
  int N = 0;
  std::vector<std::vector<cplx>> comp;

  FourierField() = default;
  FourierField(int dim, int N, int ncomp);

  int ncomp() const { return static_cast<int>(comp.size()); }
  std::size_t points() const;

  Wavevector wavevector(std::size_t idx) const;
  std::optional<std::size_t> index_of(const Wavevector& k) const;

  double l2_norm() const;
  cplx inner(const FourierField& other) const;  // <this, other>, conj on this

  FourierField& operator+=(const FourierField& o);
  FourierField& operator-=(const FourierField& o);
  FourierField& operator*=(cplx s);

  // Grid samples per component, same ordering as the coefficients.
  std::vector<std::vector<cplx>> to_grid() const;
  static FourierField from_grid(int dim, int N, const std::vector<std::vector<cplx>>& grid);

  // Little-endian: int32 dim, int32 N, int32 ncomp, then per component
  // N^dim interleaved (re, im) float64 pairs in FFT order.
  void write_binary(std::ostream& os) const;
  static FourierField read_binary(std::istream& is);
  // 2D only: rows "x1,x2,re_0,im_0,..." of the grid samples.
  void write_csv_grid(std::ostream& os) const;
};

FourierField operator+(FourierField a, const FourierField& b);
FourierField operator-(FourierField a, const FourierField& b);
FourierField operator*(cplx s, FourierField a);

// Unnormalized complex FFTs through FFTW. forward divides by N^dim so that
// the result holds the coefficients c_k.
std::vector<cplx> fft_forward(const std::vector<cplx>& grid, int dim, int N);
std::vector<cplx> fft_backward(const std::vector<cplx>& coeffs, int dim, int N);

// Grid coordinate of a linear index.
Vec grid_point(std::size_t idx, int dim, int N);

// Samples fn at every grid point; fn returns one value per component.
std::vector<std::vector<cplx>> sample_grid(int dim, int N, int ncomp,
                                           const std::function<void(const Vec&, cplx*)>& fn);

// Zero all modes with some |k_i| > N/3.
void dealias_two_thirds(FourierField& f);
bool is_power_of_two(int n);

}  // namespace fluidex
