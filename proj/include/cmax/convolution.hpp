#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include "cmax/errors.hpp"

namespace cmax {

using Cplx = std::complex<double>;

// Dense multidimensional array, row-major with the last axis fastest.
struct MultiArray {
  std::vector<int> dims;
  std::vector<Cplx> data;

  static MultiArray zeros(std::vector<int> d) {
    MultiArray a;
    std::size_t total = 1;
    for (int n : d) {
      if (n < 1) throw ContractViolation("MultiArray dims must be positive");
      total *= static_cast<std::size_t>(n);
    }
    a.dims = std::move(d);
    a.data.assign(total, Cplx(0.0, 0.0));
    return a;
  }

  std::size_t size() const { return data.size(); }

  std::size_t offset(const std::vector<int>& idx) const {
    std::size_t off = 0;
    for (std::size_t a = 0; a < dims.size(); ++a) off = off * dims[a] + idx[a];
    return off;
  }

  Cplx& at(const std::vector<int>& idx) { return data[offset(idx)]; }
  const Cplx& at(const std::vector<int>& idx) const { return data[offset(idx)]; }
};

namespace detail {

// Iterative radix-2 Cooley-Tukey, in place, no normalization. `sign` is the
// exponent sign: -1 forward, +1 inverse.
inline void fft_pow2(std::vector<Cplx>& a, int sign) {
  const std::size_t n = a.size();
  if (n < 2) return;
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    Cplx wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      Cplx w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        Cplx u = a[i + k], v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

inline std::size_t next_pow2(std::size_t v) {
  std::size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

// One-dimensional transform of arbitrary length. Powers of two go straight
// to radix-2; everything else uses Bluestein's chirp, which re-expresses the
// length-n transform as a power-of-two convolution.
struct Dft1d {
  std::size_t n = 0;
  int sign = -1;
  bool pow2 = false;
  // Bluestein state
  std::size_t m = 0;
  std::vector<Cplx> chirp;     // e^{sign*i*pi*k^2/n}
  std::vector<Cplx> kernel_f;  // FFT of the wrapped conjugate chirp

  Dft1d(std::size_t n_, int sign_) : n(n_), sign(sign_) {
    pow2 = (n & (n - 1)) == 0;
    if (pow2 || n < 2) return;
    m = next_pow2(2 * n - 1);
    chirp.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      // reduce k^2 mod 2n first so the phase argument stays small and exact
      std::size_t q = (k * k) % (2 * n);
      double ang = sign * std::numbers::pi * static_cast<double>(q) / static_cast<double>(n);
      chirp[k] = Cplx(std::cos(ang), std::sin(ang));
    }
    std::vector<Cplx> b(m, Cplx(0.0, 0.0));
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);
    fft_pow2(b, -1);
    kernel_f = std::move(b);
  }

  void run(Cplx* x) const {
    if (n < 2) return;
    if (pow2) {
      std::vector<Cplx> buf(x, x + n);
      fft_pow2(buf, sign);
      std::copy(buf.begin(), buf.end(), x);
      return;
    }
    std::vector<Cplx> a(m, Cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    fft_pow2(a, -1);
    for (std::size_t k = 0; k < m; ++k) a[k] *= kernel_f[k];
    fft_pow2(a, +1);
    double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * inv_m * chirp[k];
  }
};

// Applies a 1-D transform along every axis in turn; that factorization is
// exactly the multidimensional transform. `normalize` divides by n_axis after
// each pass, so the full inverse picks up the 1/N overall.
inline void transform_axes(MultiArray& a, int sign, bool normalize) {
  const std::size_t rank = a.dims.size();
  std::size_t inner = 1;
  for (std::size_t axis = rank; axis-- > 0;) {
    const std::size_t n = static_cast<std::size_t>(a.dims[axis]);
    Dft1d plan(n, sign);
    const std::size_t outer = a.size() / (n * inner);
    std::vector<Cplx> line(n);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t i = 0; i < inner; ++i) {
        Cplx* base = a.data.data() + o * n * inner + i;
        if (inner == 1) {
          plan.run(base);
        } else {
          for (std::size_t t = 0; t < n; ++t) line[t] = base[t * inner];
          plan.run(line.data());
          for (std::size_t t = 0; t < n; ++t) base[t * inner] = line[t];
        }
      }
    }
    if (normalize) {
      double inv = 1.0 / static_cast<double>(n);
      for (Cplx& v : a.data) v *= inv;
    }
    inner *= n;
  }
}

}  // namespace detail

// Forward transform: X_k = sum_l f_l * exp(-2*pi*i * sum_j k_j*l_j/n_j).
inline MultiArray dft(MultiArray f) {
  detail::transform_axes(f, -1, false);
  return f;
}

// Inverse transform, including the 1/N factor, so idft(dft(f)) == f.
inline MultiArray idft(MultiArray f) {
  detail::transform_axes(f, +1, true);
  return f;
}

// Full linear convolution by direct summation. Quadratic and only fit for
// small arrays; it exists as the independent reference the fast path is
// checked against.
inline MultiArray naive_convolve(const MultiArray& f, const MultiArray& g) {
  if (f.dims.size() != g.dims.size())
    throw ContractViolation("convolve: rank mismatch");
  const std::size_t rank = f.dims.size();
  std::vector<int> rdims(rank);
  for (std::size_t a = 0; a < rank; ++a) rdims[a] = f.dims[a] + g.dims[a] - 1;
  MultiArray out = MultiArray::zeros(rdims);

  std::vector<int> fi(rank, 0), gi(rank, 0), oi(rank, 0);
  for (std::size_t fo = 0; fo < f.size(); ++fo) {
    for (std::size_t go = 0; go < g.size(); ++go) {
      for (std::size_t a = 0; a < rank; ++a) oi[a] = fi[a] + gi[a];
      out.at(oi) += f.data[fo] * g.data[go];
      for (std::size_t a = rank; a-- > 0;) {
        if (++gi[a] < g.dims[a]) break;
        gi[a] = 0;
      }
    }
    for (std::size_t a = rank; a-- > 0;) {
      if (++fi[a] < f.dims[a]) break;
      fi[a] = 0;
    }
  }
  return out;
}

// Full linear convolution via the transform: zero-pad each axis to
// n_f + n_g - 1 (so the cyclic wrap never reaches occupied entries),
// multiply pointwise in frequency space, transform back.
inline MultiArray fft_convolve(const MultiArray& f, const MultiArray& g) {
  if (f.dims.size() != g.dims.size())
    throw ContractViolation("convolve: rank mismatch");
  const std::size_t rank = f.dims.size();
  std::vector<int> rdims(rank);
  for (std::size_t a = 0; a < rank; ++a) rdims[a] = f.dims[a] + g.dims[a] - 1;

  MultiArray fp = MultiArray::zeros(rdims), gp = MultiArray::zeros(rdims);
  std::vector<int> idx(rank, 0);
  for (std::size_t o = 0; o < f.size(); ++o) {
    fp.at(idx) = f.data[o];
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < f.dims[a]) break;
      idx[a] = 0;
    }
  }
  idx.assign(rank, 0);
  for (std::size_t o = 0; o < g.size(); ++o) {
    gp.at(idx) = g.data[o];
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < g.dims[a]) break;
      idx[a] = 0;
    }
  }
  fp = dft(std::move(fp));
  gp = dft(std::move(gp));
  for (std::size_t o = 0; o < fp.size(); ++o) fp.data[o] *= gp.data[o];
  return idft(std::move(fp));
}

// Convolution of an array with itself; saves one forward transform, which
// matters when the doubling solver squares big indicator arrays level after
// level.
inline MultiArray fft_autoconvolve(const MultiArray& f) {
  const std::size_t rank = f.dims.size();
  std::vector<int> rdims(rank);
  for (std::size_t a = 0; a < rank; ++a) rdims[a] = 2 * f.dims[a] - 1;
  MultiArray fp = MultiArray::zeros(rdims);
  std::vector<int> idx(rank, 0);
  for (std::size_t o = 0; o < f.size(); ++o) {
    fp.at(idx) = f.data[o];
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < f.dims[a]) break;
      idx[a] = 0;
    }
  }
  fp = dft(std::move(fp));
  for (Cplx& v : fp.data) v *= v;
  return idft(std::move(fp));
}

}  // namespace cmax
