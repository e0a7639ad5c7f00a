// Copyright 2026 The grpanon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GRPANON_WAVELET_HPP
#define GRPANON_WAVELET_HPP

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grpanon/error.hpp"
#include "grpanon/matrix.hpp"

namespace grpanon {

// Orthogonal two-channel filter bank, stored in decomposition form.
struct FilterPair {
  std::string name;
  std::vector<double> lowpass;
  std::vector<double> highpass;

  std::size_t length() const { return lowpass.size(); }
};

// Builds the bank from its low-pass decomposition filter. The high-pass filter
// is the quadrature mirror h[k] = (-1)^(k+1) * l[L-1-k]; this sign convention
// reproduces the published Daubechies-2 detail coefficients.
inline FilterPair make_filter_pair(std::string name, std::vector<double> lowpass) {
  const std::size_t n = lowpass.size();
  std::vector<double> highpass(n);
  for (std::size_t k = 0; k < n; ++k) highpass[k] = (k % 2 == 0 ? -1.0 : 1.0) * lowpass[n - 1 - k];
  return FilterPair{std::move(name), std::move(lowpass), std::move(highpass)};
}

inline FilterPair haar() {
  const double s = 1.0 / std::sqrt(2.0);
  return make_filter_pair("haar", {s, s});
}

// Daubechies wavelet with two vanishing moments (4 taps).
inline FilterPair daubechies2() {
  const double r3 = std::sqrt(3.0);
  const double d = 4.0 * std::sqrt(2.0);
  return make_filter_pair("db2", {(1.0 - r3) / d, (3.0 - r3) / d, (3.0 + r3) / d, (1.0 + r3) / d});
}

// Daubechies wavelet with four vanishing moments (8 taps).
inline FilterPair daubechies4() {
  return make_filter_pair("db4", {-0.010597401784997278, 0.032883011666982945, 0.030841381835986965,
                                  -0.18703481171888114, -0.027983769416983849, 0.63088076792959036,
                                  0.71484657055254153, 0.23037781330885523});
}

inline FilterPair filter_by_name(std::string_view name) {
  if (name == "haar" || name == "db1") return haar();
  if (name == "db2") return daubechies2();
  if (name == "db4") return daubechies4();
  throw DomainError("unknown wavelet family '" + std::string(name) + "' (expected haar, db2 or db4)");
}

// Throws unless the bank is a valid orthonormal pair.
inline void validate_filter(const FilterPair& f, double tol = 1e-12) {
  if (f.lowpass.empty() || f.lowpass.size() != f.highpass.size() || f.lowpass.size() % 2 != 0)
    throw DomainError("filter '" + f.name + "': filters must be non-empty, even and of equal length");
  const double sl = std::accumulate(f.lowpass.begin(), f.lowpass.end(), 0.0);
  const double sh = std::accumulate(f.highpass.begin(), f.highpass.end(), 0.0);
  const double el = std::inner_product(f.lowpass.begin(), f.lowpass.end(), f.lowpass.begin(), 0.0);
  if (std::abs(sl - std::sqrt(2.0)) > tol) throw DomainError("filter '" + f.name + "': low-pass taps must sum to sqrt(2)");
  if (std::abs(sh) > tol) throw DomainError("filter '" + f.name + "': high-pass taps must sum to 0");
  if (std::abs(el - 1.0) > tol) throw DomainError("filter '" + f.name + "': low-pass filter must have unit energy");
}

// Output sample j of the periodic analysis step reads x[(2j + shift - k) mod n]
// for tap k, with shift = L/2. Fixed so that Daubechies-2 matches the reference
// coefficients; the synthesis step is its exact adjoint.
inline std::size_t alignment_shift(std::size_t filter_length) { return filter_length / 2; }

// Periodic convolution of x with f followed by dyadic downsampling.
inline std::vector<double> conv_down(std::span<const double> x, std::span<const double> f) {
  const std::size_t n = x.size();
  if (n == 0 || n % 2 != 0) throw DomainError("conv_down needs a non-empty even-length input, got " + std::to_string(n));
  if (f.empty()) throw DomainError("conv_down needs a non-empty filter");
  const std::size_t shift = alignment_shift(f.size());
  std::vector<double> y(n / 2, 0.0);
  for (std::size_t j = 0; j < y.size(); ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      // (2j + shift - k) mod n, kept non-negative.
      const std::size_t idx = (2 * j + shift + n * (k / n + 1) - k) % n;
      s += f[k] * x[idx];
    }
    y[j] = s;
  }
  return y;
}

// Dyadic upsampling followed by periodic convolution with the synthesis form of
// f; the transpose of conv_down for the same filter.
inline std::vector<double> up_conv(std::span<const double> x, std::span<const double> f) {
  if (x.empty()) throw DomainError("up_conv needs a non-empty input");
  if (f.empty()) throw DomainError("up_conv needs a non-empty filter");
  const std::size_t n = 2 * x.size();
  const std::size_t shift = alignment_shift(f.size());
  std::vector<double> y(n, 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    for (std::size_t k = 0; k < f.size(); ++k) {
      const std::size_t idx = (2 * j + shift + n * (k / n + 1) - k) % n;
      y[idx] += f[k] * x[j];
    }
  }
  return y;
}

// Multilevel periodic decomposition: approximation a_k and details d_1..d_k.
struct WaveletDecomposition {
  int level = 0;
  std::vector<double> approx;
  // details[j - 1] holds d_j; d_1 is the finest level.
  std::vector<std::vector<double>> details;
  std::size_t signal_length = 0;
  FilterPair filter;

  const std::vector<double>& detail(int j) const { return details.at(static_cast<std::size_t>(j - 1)); }
};

inline int max_level(std::size_t m) {
  int k = 0;
  while (m > 0 && m % 2 == 0) {
    m /= 2;
    ++k;
  }
  return k;
}

inline void check_level(std::size_t m, int level) {
  if (level < 1) throw DomainError("decomposition level must be at least 1");
  if (m == 0 || max_level(m) < level)
    throw DomainError("signal length " + std::to_string(m) + " is not divisible by 2^" + std::to_string(level) +
                      "; the deepest feasible level is " + std::to_string(max_level(m)));
}

inline WaveletDecomposition decompose(std::span<const double> signal, const FilterPair& filter, int level) {
  check_level(signal.size(), level);
  WaveletDecomposition dec;
  dec.level = level;
  dec.signal_length = signal.size();
  dec.filter = filter;
  std::vector<double> current(signal.begin(), signal.end());
  for (int j = 1; j <= level; ++j) {
    dec.details.push_back(conv_down(current, filter.highpass));
    current = conv_down(current, filter.lowpass);
  }
  dec.approx = std::move(current);
  return dec;
}

// Pushes level-`from` coefficients up to full length through the low-pass
// synthesis cascade.
inline std::vector<double> lowpass_cascade(std::vector<double> x, const FilterPair& f, int from) {
  for (int j = from; j >= 1; --j) x = up_conv(x, f.lowpass);
  return x;
}

// A_k: the signal rebuilt from approximation coefficients alone.
inline std::vector<double> approximation_component(const WaveletDecomposition& dec) {
  return lowpass_cascade(dec.approx, dec.filter, dec.level);
}

// D_j: the signal rebuilt from the level-j details alone.
inline std::vector<double> detail_component(const WaveletDecomposition& dec, int j) {
  std::vector<double> x = up_conv(dec.detail(j), dec.filter.highpass);
  return lowpass_cascade(std::move(x), dec.filter, j - 1);
}

// D_1 + ... + D_k.
inline std::vector<double> detail_component(const WaveletDecomposition& dec) {
  std::vector<double> sum(dec.signal_length, 0.0);
  for (int j = 1; j <= dec.level; ++j) {
    auto dj = detail_component(dec, j);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += dj[i];
  }
  return sum;
}

inline std::vector<double> reconstruct(const WaveletDecomposition& dec) {
  auto out = approximation_component(dec);
  auto det = detail_component(dec);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += det[i];
  return out;
}

// R (m x m/2^k) with R * a_k == A_k: column j is the cascade image of e_j.
inline Matrix reconstruction_matrix(const FilterPair& filter, int level, std::size_t m) {
  check_level(m, level);
  const std::size_t n = m >> level;
  Matrix r(m, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    auto col = lowpass_cascade(std::move(e), filter, level);
    for (std::size_t i = 0; i < m; ++i) r(i, j) = col[i];
  }
  return r;
}

}  // namespace grpanon

#endif  // GRPANON_WAVELET_HPP
