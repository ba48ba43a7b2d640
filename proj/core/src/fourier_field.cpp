#include "fluidex/fourier_field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <tuple>

#include "fluidex/errors.hpp"

namespace fluidex {

namespace {

std::size_t ipow(int n, int d) {
  std::size_t r = 1;
  for (int i = 0; i < d; ++i) r *= static_cast<std::size_t>(n);
  return r;
}

// FFTW planning is not thread safe; execution with new-array execute is.
fftw_plan get_plan(int dim, int N, int sign) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(dim, N, sign);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second;
  std::size_t n = ipow(N, dim);
  fftw_complex* a = fftw_alloc_complex(n);
  fftw_complex* b = fftw_alloc_complex(n);
  int dims[3] = {N, N, N};
  fftw_plan p = fftw_plan_dft(dim, dims, a, b, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(a);
  fftw_free(b);
  plans.emplace(key, p);
  return p;
}

void check_layout(const std::vector<cplx>& v, int dim, int N) {
  if (dim < 1 || dim > 3 || N < 2 || v.size() != ipow(N, dim))
    throw ContractViolation("fft: array size does not match N^dim");
}

}  // namespace

bool is_power_of_two(int n) { return n > 0 && std::has_single_bit(static_cast<unsigned>(n)); }

std::vector<cplx> fft_forward(const std::vector<cplx>& grid, int dim, int N) {
  check_layout(grid, dim, N);
  std::vector<cplx> out(grid.size());
  fftw_execute_dft(get_plan(dim, N, FFTW_FORWARD),
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(grid.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double s = 1.0 / static_cast<double>(grid.size());
  for (auto& c : out) c *= s;
  return out;
}

std::vector<cplx> fft_backward(const std::vector<cplx>& coeffs, int dim, int N) {
  check_layout(coeffs, dim, N);
  std::vector<cplx> out(coeffs.size());
  fftw_execute_dft(get_plan(dim, N, FFTW_BACKWARD),
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(coeffs.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

FourierField::FourierField(int d, int n, int ncomp) : dim(d), N(n) {
  if (d < 1 || d > 3) throw ContractViolation("FourierField: dim must be 1..3");
  if (n < 2) throw ContractViolation("FourierField: N must be >= 2");
  comp.assign(ncomp, std::vector<cplx>(ipow(n, d), cplx(0.0, 0.0)));
}

std::size_t FourierField::points() const { return ipow(N, dim); }

Wavevector FourierField::wavevector(std::size_t idx) const {
  Wavevector k{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    int i = static_cast<int>(idx % N);
    idx /= N;
    k[a] = i < N / 2 ? i : i - N;
  }
  return k;
}

std::optional<std::size_t> FourierField::index_of(const Wavevector& k) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim; ++a) {
    if (k[a] >= N / 2 || k[a] < -N / 2) return std::nullopt;
    int i = k[a] >= 0 ? k[a] : k[a] + N;
    idx = idx * N + static_cast<std::size_t>(i);
  }
  return idx;
}

double FourierField::l2_norm() const {
  double s = 0.0;
  for (const auto& c : comp)
    for (const auto& v : c) s += std::norm(v);
  return std::sqrt(std::pow(kTwoPi, dim) * s);
}

cplx FourierField::inner(const FourierField& o) const {
  if (o.dim != dim || o.N != N || o.ncomp() != ncomp())
    throw ContractViolation("FourierField::inner: shape mismatch");
  cplx s = 0.0;
  for (int c = 0; c < ncomp(); ++c)
    for (std::size_t i = 0; i < comp[c].size(); ++i) s += std::conj(comp[c][i]) * o.comp[c][i];
  return std::pow(kTwoPi, dim) * s;
}

FourierField& FourierField::operator+=(const FourierField& o) {
  if (o.dim != dim || o.N != N || o.ncomp() != ncomp())
    throw ContractViolation("FourierField: shape mismatch");
  for (int c = 0; c < ncomp(); ++c)
    for (std::size_t i = 0; i < comp[c].size(); ++i) comp[c][i] += o.comp[c][i];
  return *this;
}

FourierField& FourierField::operator-=(const FourierField& o) {
  if (o.dim != dim || o.N != N || o.ncomp() != ncomp())
    throw ContractViolation("FourierField: shape mismatch");
  for (int c = 0; c < ncomp(); ++c)
    for (std::size_t i = 0; i < comp[c].size(); ++i) comp[c][i] -= o.comp[c][i];
  return *this;
}

FourierField& FourierField::operator*=(cplx s) {
  for (auto& c : comp)
    for (auto& v : c) v *= s;
  return *this;
}

FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
FourierField operator*(cplx s, FourierField a) { return a *= s; }

std::vector<std::vector<cplx>> FourierField::to_grid() const {
  std::vector<std::vector<cplx>> g;
  g.reserve(comp.size());
  for (const auto& c : comp) g.push_back(fft_backward(c, dim, N));
  return g;
}

FourierField FourierField::from_grid(int dim, int N, const std::vector<std::vector<cplx>>& grid) {
  FourierField f(dim, N, static_cast<int>(grid.size()));
  for (std::size_t c = 0; c < grid.size(); ++c) f.comp[c] = fft_forward(grid[c], dim, N);
  return f;
}

namespace {

template <typename T>
void put_le(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char b[sizeof(T)];
  is.read(reinterpret_cast<char*>(b), sizeof(T));
  if (!is) throw ContractViolation("FourierField::read_binary: truncated input");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

void FourierField::write_binary(std::ostream& os) const {
  put_le<std::int32_t>(os, dim);
  put_le<std::int32_t>(os, N);
  put_le<std::int32_t>(os, ncomp());
  for (const auto& c : comp)
    for (const auto& v : c) {
      put_le<double>(os, v.real());
      put_le<double>(os, v.imag());
    }
}

FourierField FourierField::read_binary(std::istream& is) {
  int d = get_le<std::int32_t>(is);
  int n = get_le<std::int32_t>(is);
  int nc = get_le<std::int32_t>(is);
  if (d < 1 || d > 3 || n < 2 || n > (1 << 14) || nc < 1 || nc > 3)
    throw ContractViolation("FourierField::read_binary: bad header");
  FourierField f(d, n, nc);
  for (auto& c : f.comp)
    for (auto& v : c) {
      double re = get_le<double>(is);
      double im = get_le<double>(is);
      v = cplx(re, im);
    }
  return f;
}

void FourierField::write_csv_grid(std::ostream& os) const {
  if (dim != 2) throw UnsupportedOperation("write_csv_grid: 2D fields only");
  auto g = to_grid();
  os << "x1,x2";
  for (int c = 0; c < ncomp(); ++c) os << ",re_" << c << ",im_" << c;
  os << '\n';
  for (std::size_t i = 0; i < points(); ++i) {
    Vec x = grid_point(i, dim, N);
    os << x[0] << ',' << x[1];
    for (int c = 0; c < ncomp(); ++c) os << ',' << g[c][i].real() << ',' << g[c][i].imag();
    os << '\n';
  }
}

Vec grid_point(std::size_t idx, int dim, int N) {
  Vec x(dim);
  const double h = kTwoPi / N;
  for (int a = dim - 1; a >= 0; --a) {
    x[a] = h * static_cast<double>(idx % N);
    idx /= N;
  }
  return x;
}

std::vector<std::vector<cplx>> sample_grid(int dim, int N, int ncomp,
                                           const std::function<void(const Vec&, cplx*)>& fn) {
  std::size_t n = ipow(N, dim);
  std::vector<std::vector<cplx>> g(ncomp, std::vector<cplx>(n));
  std::vector<cplx> buf(ncomp);
  for (std::size_t i = 0; i < n; ++i) {
    fn(grid_point(i, dim, N), buf.data());
    for (int c = 0; c < ncomp; ++c) g[c][i] = buf[c];
  }
  return g;
}

void dealias_two_thirds(FourierField& f) {
  const int kmax = f.N / 3;
  for (std::size_t i = 0; i < f.points(); ++i) {
    Wavevector k = f.wavevector(i);
    bool keep = true;
    for (int a = 0; a < f.dim; ++a)
      if (std::abs(k[a]) > kmax) keep = false;
    if (!keep)
      for (auto& c : f.comp) c[i] = 0.0;
  }
}

}  // namespace fluidex
