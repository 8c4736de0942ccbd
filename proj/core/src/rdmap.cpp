// Copyright 2026 The adlradar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "adlradar/rdmap.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>

#include <fftw3.h>

#include "binio.hpp"

namespace adlradar {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

class ForwardDft {
 public:
  explicit ForwardDft(std::size_t n) : n_(n) {
    in_ = fftw_alloc_complex(n);
    out_ = fftw_alloc_complex(n);
    if (in_ == nullptr || out_ == nullptr) throw ProcessingError("FFT buffer allocation failed");
    std::lock_guard lock(plan_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
    if (plan_ == nullptr) throw ProcessingError("FFT planning failed");
  }
  ~ForwardDft() {
    {
      std::lock_guard lock(plan_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  ForwardDft(const ForwardDft&) = delete;
  ForwardDft& operator=(const ForwardDft&) = delete;

  cplx* in() { return reinterpret_cast<cplx*>(in_); }
  const cplx* out() const { return reinterpret_cast<const cplx*>(out_); }
  void run() { fftw_execute(plan_); }
  [[nodiscard]] std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  fftw_complex* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

}  // namespace

void StftParams::validate() const {
  if (L < 2) throw InvalidArgument("STFT window length must be >= 2");
  if (hop < 1 || hop > L) throw InvalidArgument("STFT hop must satisfy 1 <= hop <= L");
}

std::vector<double> make_window(WindowKind kind, std::size_t L) {
  std::vector<double> w(L, 1.0);
  if (kind == WindowKind::Hanning) {
    for (std::size_t k = 0; k < L; ++k)
      w[k] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(k + 1) / static_cast<double>(L + 1)));
  }
  return w;
}

ComplexRangeMap range_map(const BasebandMatrix& bb) {
  const std::size_t n = bb.fast_samples();
  const std::size_t m_count = bb.num_pri();
  if (n == 0 || m_count == 0 || bb.data().size() != n * m_count) throw InvalidArgument("range_map: empty baseband");
  ComplexRangeMap rm(n, m_count, bb.params().range_resolution(), bb.params().pri);
  ForwardDft dft(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t m = 0; m < m_count; ++m) {
    auto src = bb.column(m);
    cplx* in = dft.in();
    for (std::size_t i = 0; i < n; ++i) in[i] = cplx(src[i].real(), src[i].imag());
    dft.run();
    auto dst = rm.column(m);
    const cplx* out = dft.out();
    for (std::size_t i = 0; i < n; ++i)
      dst[i] = cplxf(static_cast<float>(out[i].real() * scale), static_cast<float>(out[i].imag() * scale));
  }
  return rm;
}

std::vector<cplx> range_bin_sum(const ComplexRangeMap& rm, std::size_t r1, std::size_t r2) {
  if (r1 > r2 || r2 >= rm.bins())
    throw InvalidArgument("range_bin_sum: need 0 <= r1 <= r2 < " + std::to_string(rm.bins()));
  std::vector<cplx> v(rm.pris());
  for (std::size_t m = 0; m < rm.pris(); ++m) {
    auto col = rm.column(m);
    cplx s{};
    for (std::size_t r = r1; r <= r2; ++r) s += cplx(col[r].real(), col[r].imag());
    v[m] = s;
  }
  return v;
}

RadarImage spectrogram(std::span<const cplx> v, const StftParams& p, double pri) {
  p.validate();
  if (!(pri > 0.0)) throw InvalidArgument("spectrogram: pri must be positive");
  if (v.size() < p.L) throw InvalidArgument("spectrogram: sequence shorter than the window");
  const std::size_t L = p.L;
  const std::size_t frames = (v.size() + p.hop - 1) / p.hop;
  const auto w = make_window(p.window, L);
  const double prf = 1.0 / pri;

  RadarImage img;
  img.kind = ImageKind::Spectrogram;
  img.pixels = RealMatrix(L, frames);
  img.row_axis = {-static_cast<double>(L / 2) * prf / static_cast<double>(L), prf / static_cast<double>(L)};
  img.col_axis = {0.0, static_cast<double>(p.hop) * pri};

  ForwardDft dft(L);
  const auto half = static_cast<std::ptrdiff_t>(L / 2);
  const auto len = static_cast<std::ptrdiff_t>(v.size());
  for (std::size_t j = 0; j < frames; ++j) {
    const auto first = static_cast<std::ptrdiff_t>(j * p.hop) - half;
    cplx* in = dft.in();
    for (std::size_t k = 0; k < L; ++k) {
      const std::ptrdiff_t idx = first + static_cast<std::ptrdiff_t>(k);
      in[k] = (idx >= 0 && idx < len) ? v[static_cast<std::size_t>(idx)] * w[k] : cplx{};
    }
    dft.run();
    const cplx* out = dft.out();
    for (std::size_t r = 0; r < L; ++r) {
      const std::size_t q = (r + L - L / 2) % L;
      img.pixels(r, j) = std::norm(out[q]);
    }
  }
  return img;
}

double log_magnitude(double mag, double floor_db) {
  const double a = std::abs(mag);
  if (a == 0.0) return floor_db;
  return std::max(floor_db, 10.0 * std::log10(a));
}

RealMatrix log_magnitude(const RealMatrix& x, double floor_db) {
  RealMatrix out(x.rows(), x.cols());
  std::transform(x.data().begin(), x.data().end(), out.data().begin(),
                 [floor_db](double v) { return log_magnitude(v, floor_db); });
  return out;
}

RadarImage rangemap_db(const ComplexRangeMap& rm, std::size_t max_bins, double floor_db) {
  const std::size_t rows = std::min(max_bins, rm.bins());
  RadarImage img;
  img.kind = ImageKind::RangeMap;
  img.pixels = RealMatrix(rows, rm.pris());
  img.row_axis = {0.0, rm.bin_size()};
  img.col_axis = {0.0, rm.pri()};
  for (std::size_t m = 0; m < rm.pris(); ++m) {
    auto col = rm.column(m);
    for (std::size_t r = 0; r < rows; ++r) img.pixels(r, m) = log_magnitude(std::abs(cplx(col[r])), floor_db);
  }
  return img;
}

RealMatrix resize(const RealMatrix& img, std::size_t rows, std::size_t cols, ResizeMethod method) {
  if (rows < 1 || cols < 1) throw InvalidArgument("resize: target shape must be at least 1x1");
  if (img.empty()) throw InvalidArgument("resize: empty image");
  const std::size_t sr = img.rows();
  const std::size_t sc = img.cols();
  if (sr == rows && sc == cols) return img;
  RealMatrix out(rows, cols);
  if (method == ResizeMethod::Subsample) {
    auto pick = [](std::size_t i, std::size_t src, std::size_t dst) {
      const auto k = static_cast<std::size_t>(
          std::llround(static_cast<double>(i) * static_cast<double>(src) / static_cast<double>(dst)));
      return std::min(k, src - 1);
    };
    std::vector<std::size_t> cmap(cols);
    for (std::size_t c = 0; c < cols; ++c) cmap[c] = pick(c, sc, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      auto src = img.row(pick(r, sr, rows));
      auto dst = out.row(r);
      for (std::size_t c = 0; c < cols; ++c) dst[c] = src[cmap[c]];
    }
    return out;
  }
  struct Tap {
    std::size_t i0, i1;
    double w1;
  };
  auto taps = [](std::size_t src, std::size_t dst) {
    std::vector<Tap> t(dst);
    for (std::size_t i = 0; i < dst; ++i) {
      const double x =
          dst == 1 ? 0.0 : static_cast<double>(i) * static_cast<double>(src - 1) / static_cast<double>(dst - 1);
      auto i0 = std::min(static_cast<std::size_t>(std::floor(x)), src - 1);
      const std::size_t i1 = std::min(i0 + 1, src - 1);
      t[i] = {i0, i1, x - static_cast<double>(i0)};
    }
    return t;
  };
  const auto rt = taps(sr, rows);
  const auto ct = taps(sc, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    auto a = img.row(rt[r].i0);
    auto b = img.row(rt[r].i1);
    const double wr = rt[r].w1;
    auto dst = out.row(r);
    for (std::size_t c = 0; c < cols; ++c) {
      const Tap& t = ct[c];
      const double top = a[t.i0] + t.w1 * (a[t.i1] - a[t.i0]);
      const double bot = b[t.i0] + t.w1 * (b[t.i1] - b[t.i0]);
      dst[c] = top + wr * (bot - top);
    }
  }
  return out;
}

RadarImage resize(const RadarImage& img, std::size_t rows, std::size_t cols, ResizeMethod method) {
  RadarImage out;
  out.kind = img.kind;
  out.pixels = resize(img.pixels, rows, cols, method);
  out.row_axis = {img.row_axis.origin,
                  img.row_axis.step * static_cast<double>(img.rows()) / static_cast<double>(rows)};
  out.col_axis = {img.col_axis.origin,
                  img.col_axis.step * static_cast<double>(img.cols()) / static_cast<double>(cols)};
  return out;
}

RealMatrix smooth3x3(const RealMatrix& img) {
  const std::size_t rows = img.rows();
  const std::size_t cols = img.cols();
  RealMatrix out(rows, cols);
  if (img.empty()) return out;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t r0 = r == 0 ? 0 : r - 1;
    const std::size_t r2 = std::min(r + 1, rows - 1);
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t c0 = c == 0 ? 0 : c - 1;
      const std::size_t c2 = std::min(c + 1, cols - 1);
      double s = 0.0;
      for (std::size_t rr : {r0, r, r2})
        for (std::size_t cc : {c0, c, c2}) s += img(rr, cc);
      out(r, c) = s;
    }
  }
  return out;
}

RadarImage crop_columns(const RadarImage& img, std::size_t c0, std::size_t c1) {
  if (c0 >= c1 || c1 > img.cols()) throw InvalidArgument("crop_columns: bad column range");
  RadarImage out;
  out.kind = img.kind;
  out.row_axis = img.row_axis;
  out.col_axis = {img.col_axis.at(static_cast<double>(c0)), img.col_axis.step};
  out.pixels = RealMatrix(img.rows(), c1 - c0);
  for (std::size_t r = 0; r < img.rows(); ++r) {
    auto src = img.pixels.row(r);
    std::copy(src.begin() + static_cast<std::ptrdiff_t>(c0), src.begin() + static_cast<std::ptrdiff_t>(c1),
              out.pixels.row(r).begin());
  }
  return out;
}

// ---------------------------------------------------------------------------

void write_rdm(const std::filesystem::path& path, const RadarImage& img) {
  detail::BinWriter w(path);
  w.magic("RDM1");
  w.put(static_cast<std::uint32_t>(img.rows()));
  w.put(static_cast<std::uint32_t>(img.cols()));
  w.put(static_cast<std::uint8_t>(img.kind));
  w.put(img.row_axis.step);
  w.put(img.col_axis.step);
  std::vector<float> buf(img.pixels.size());
  std::transform(img.pixels.data().begin(), img.pixels.data().end(), buf.begin(),
                 [](double v) { return static_cast<float>(v); });
  w.put_array(buf.data(), buf.size());
  w.close();
}

RadarImage read_rdm(const std::filesystem::path& path) {
  detail::BinReader r(path);
  r.expect_magic("RDM1");
  const auto rows = r.get<std::uint32_t>();
  const auto cols = r.get<std::uint32_t>();
  const auto kind = r.get<std::uint8_t>();
  if (kind > 2) throw IoError("RDM1: unknown image kind in " + path.string());
  RadarImage img;
  img.kind = static_cast<ImageKind>(kind);
  img.row_axis.step = r.get<double>();
  img.col_axis.step = r.get<double>();
  if (!(img.row_axis.step > 0.0) || !(img.col_axis.step > 0.0)) throw IoError("RDM1: non-positive axis step");
  if (img.kind == ImageKind::Spectrogram) img.row_axis.origin = -static_cast<double>(rows / 2) * img.row_axis.step;
  std::vector<float> buf(static_cast<std::size_t>(rows) * cols);
  r.get_array(buf.data(), buf.size());
  r.expect_eof();
  img.pixels = RealMatrix(rows, cols);
  std::copy(buf.begin(), buf.end(), img.pixels.data().begin());
  return img;
}

std::vector<std::uint8_t> to_gray8(const RealMatrix& img) {
  std::vector<std::uint8_t> out(img.size(), 0);
  if (img.empty()) return out;
  const auto [lo, hi] = std::minmax_element(img.data().begin(), img.data().end());
  const double mn = *lo;
  const double span = *hi - mn;
  if (!(span > 0.0)) return out;
  for (std::size_t i = 0; i < img.size(); ++i)
    out[i] = static_cast<std::uint8_t>(std::lround(255.0 * (img.data()[i] - mn) / span));
  return out;
}

void write_pgm(const std::filesystem::path& path, const RealMatrix& img) {
  const auto gray = to_gray8(img);
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "P5\n" << img.cols() << ' ' << img.rows() << "\n255\n";
    out.write(reinterpret_cast<const char*>(gray.data()), static_cast<std::streamsize>(gray.size()));
    if (!out) throw IoError("write failed: " + path.string());
  }
  double mn = 0.0;
  double mx = 0.0;
  if (!img.empty()) {
    const auto [lo, hi] = std::minmax_element(img.data().begin(), img.data().end());
    mn = *lo;
    mx = *hi;
  }
  char line[96];
  std::snprintf(line, sizeof line, "%.17g %.17g\n", mn, mx);
  auto sidecar = path;
  sidecar += ".scale";
  detail::write_text(sidecar, line);
}

PgmImage read_pgm(const std::filesystem::path& path) {
  const std::string text = detail::read_text(path);
  std::size_t pos = 0;
  auto next_token = [&]() {
    for (;;) {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos < text.size() && text[pos] == '#') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    const std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) throw IoError("PGM: truncated header in " + path.string());
    return text.substr(start, pos - start);
  };
  if (next_token() != "P5") throw IoError("PGM: expected P5 in " + path.string());
  PgmImage img;
  try {
    img.cols = std::stoul(next_token());
    img.rows = std::stoul(next_token());
    if (std::stoul(next_token()) != 255) throw IoError("PGM: only maxval 255 is supported");
  } catch (const std::logic_error&) {
    throw IoError("PGM: malformed header in " + path.string());
  }
  ++pos;  // single whitespace after maxval
  if (text.size() - pos != img.rows * img.cols) throw IoError("PGM: pixel count mismatch in " + path.string());
  img.pixels.assign(text.begin() + static_cast<std::ptrdiff_t>(pos), text.end());
  return img;
}

}  // namespace adlradar
