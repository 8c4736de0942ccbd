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

#include "adlradar/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace adlradar {

void CleanParams::validate() const {
  if (histogram_bins < 1) throw InvalidArgument("clean params: histogram_bins must be >= 1");
  if (keep_bins < 1 || keep_bins > histogram_bins)
    throw InvalidArgument("clean params: keep_bins must be in [1, histogram_bins]");
  if (!(keep_fraction > 0.0) || keep_fraction > 1.0) throw InvalidArgument("clean params: keep_fraction must be in (0, 1]");
  if (outlier_min_pixels_rm < 1 || outlier_min_pixels_md < 1)
    throw InvalidArgument("clean params: outlier sizes must be >= 1");
  if (kernel_win < 1) throw InvalidArgument("clean params: kernel_win must be >= 1");
}

RealMatrix floor_reference(const RealMatrix& img) {
  RealMatrix out = img;
  if (img.empty()) return out;
  std::vector<double> tmp(img.data().begin(), img.data().end());
  const auto mid = tmp.begin() + static_cast<std::ptrdiff_t>(tmp.size() / 2);
  std::nth_element(tmp.begin(), mid, tmp.end());
  const double floor = *mid;
  for (double& v : out.data()) v = std::max(0.0, v - floor);
  return out;
}

RealMatrix column_normalize(const RealMatrix& img) {
  RealMatrix out(img.rows(), img.cols());
  for (std::size_t c = 0; c < img.cols(); ++c) {
    double mx = 0.0;
    for (std::size_t r = 0; r < img.rows(); ++r) mx = std::max(mx, img(r, c));
    if (!(mx > 0.0)) continue;
    for (std::size_t r = 0; r < img.rows(); ++r) out(r, c) = img(r, c) / mx;
  }
  return out;
}

std::size_t eclean_kept_bins(const CleanParams& p, CleanMode mode) {
  if (mode == CleanMode::RangeMap) return p.keep_bins;
  const auto k = static_cast<std::size_t>(std::llround(p.keep_fraction * static_cast<double>(p.histogram_bins)));
  return std::clamp<std::size_t>(k, 1, p.histogram_bins);
}

RealMatrix eclean_bins(const RealMatrix& img, std::size_t histogram_bins, std::size_t keep) {
  if (histogram_bins < 1 || keep < 1 || keep > histogram_bins)
    throw InvalidArgument("eclean: need 1 <= keep <= histogram_bins");
  double mn = std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : img.data()) {
    if (v == 0.0) continue;
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  RealMatrix out = img;
  if (mn > mx) return out;  // no nonzero pixels
  const double width = (mx - mn) / static_cast<double>(histogram_bins);
  const double edge = mn + static_cast<double>(histogram_bins - keep) * width;
  for (double& v : out.data())
    if (v != 0.0 && v < edge) v = 0.0;
  return out;
}

RealMatrix eclean(const RealMatrix& img, const CleanParams& p, CleanMode mode) {
  p.validate();
  return eclean_bins(img, p.histogram_bins, eclean_kept_bins(p, mode));
}

RealMatrix remove_outliers(const RealMatrix& img, std::size_t min_pixels) {
  if (min_pixels < 1) throw InvalidArgument("remove_outliers: min_pixels must be >= 1");
  const std::size_t rows = img.rows();
  const std::size_t cols = img.cols();
  RealMatrix out = img;
  std::vector<std::uint8_t> seen(img.size(), 0);
  std::vector<std::size_t> component;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < img.size(); ++start) {
    if (seen[start] || img.data()[start] == 0.0) continue;
    component.clear();
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t idx = stack.back();
      stack.pop_back();
      component.push_back(idx);
      const std::size_t r = idx / cols;
      const std::size_t c = idx % cols;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const auto rr = static_cast<std::ptrdiff_t>(r) + dr;
          const auto cc = static_cast<std::ptrdiff_t>(c) + dc;
          if (rr < 0 || cc < 0 || rr >= static_cast<std::ptrdiff_t>(rows) || cc >= static_cast<std::ptrdiff_t>(cols))
            continue;
          const std::size_t n = static_cast<std::size_t>(rr) * cols + static_cast<std::size_t>(cc);
          if (seen[n] || img.data()[n] == 0.0) continue;
          seen[n] = 1;
          stack.push_back(n);
        }
      }
    }
    if (component.size() < min_pixels)
      for (std::size_t idx : component) out.data()[idx] = 0.0;
  }
  return out;
}

namespace {

// Sum of the win x win block whose farthest row is `far` and first column `c0`.
double block_sum(const RealMatrix& rm, std::size_t far, std::size_t c0, std::size_t win) {
  double s = 0.0;
  for (std::size_t r = far + 1 - win; r <= far; ++r)
    for (std::size_t c = c0; c < c0 + win; ++c) s += rm(r, c);
  return s;
}

void copy_block(const RealMatrix& rm, RealMatrix& out, std::size_t far, std::size_t c0, std::size_t win) {
  for (std::size_t r = far + 1 - win; r <= far; ++r)
    for (std::size_t c = c0; c < c0 + win; ++c) out(r, c) = rm(r, c);
}

}  // namespace

RealMatrix kernel_clean(const RealMatrix& rm, std::size_t win) {
  if (win < 1) throw InvalidArgument("kernel_clean: win must be >= 1");
  const std::size_t rows = rm.rows();
  const std::size_t cols = rm.cols();
  RealMatrix out(rows, cols);
  if (rows < win + 2 || cols < win) throw InvalidArgument("kernel_clean: image smaller than the kernel");

  // Farthest row carrying power within the first block of columns.
  std::size_t r0 = rows;
  for (std::size_t r = rows; r-- > 0;) {
    double pwr = 0.0;
    for (std::size_t c = 0; c < win; ++c) pwr += rm(r, c);
    if (pwr != 0.0) {
      r0 = r;
      break;
    }
  }
  if (r0 == rows) return out;

  // m is the far edge of the centre kernel; the others sit one bin away/toward.
  const std::size_t m_lo = win;
  const std::size_t m_hi = rows - 2;
  std::size_t m = std::clamp(r0 == 0 ? std::size_t{0} : r0 - 1, m_lo, m_hi);
  for (std::size_t n = 0; n + win <= cols; ++n) {
    const double pwr1 = block_sum(rm, m + 1, n, win);
    const double pwr2 = block_sum(rm, m, n, win);
    const double pwr3 = block_sum(rm, m - 1, n, win);
    if (pwr1 >= pwr2 && pwr1 >= pwr3) {
      copy_block(rm, out, m + 1, n, win);
      m = std::min(m + 1, m_hi);
    } else if (pwr2 >= pwr1 && pwr2 >= pwr3) {
      copy_block(rm, out, m, n, win);
    } else {
      copy_block(rm, out, m - 1, n, win);
      m = std::max(m - 1, m_lo);
    }
  }
  return out;
}

RealMatrix clean_rangemap(const RealMatrix& rm_db, const CleanParams& p) {
  p.validate();
  RealMatrix x = column_normalize(floor_reference(rm_db));
  x = eclean(x, p, CleanMode::RangeMap);
  x = remove_outliers(x, p.outlier_min_pixels_rm);
  return kernel_clean(x, p.kernel_win);
}

RealMatrix clean_spectrogram(const RealMatrix& md_db, const CleanParams& p) {
  p.validate();
  RealMatrix x = eclean(floor_reference(md_db), p, CleanMode::Spectrogram);
  return remove_outliers(x, p.outlier_min_pixels_md);
}

}  // namespace adlradar
