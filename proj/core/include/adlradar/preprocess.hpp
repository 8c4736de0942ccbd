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

#pragma once

#include <cstddef>

#include "adlradar/common.hpp"

namespace adlradar {

struct CleanParams {
  std::size_t keep_bins = 20;         // eCLEAN range-map mode
  double keep_fraction = 0.6;         // eCLEAN spectrogram mode
  std::size_t histogram_bins = 100;
  std::size_t outlier_min_pixels_rm = 50;
  std::size_t outlier_min_pixels_md = 150;
  std::size_t kernel_win = 6;

  void validate() const;
};

enum class CleanMode { RangeMap, Spectrogram };

/// Subtracts the median (the noise floor of a sparse radar image) and clips
/// at zero, so the cleaning stages see nonnegative excess-over-noise values.
[[nodiscard]] RealMatrix floor_reference(const RealMatrix& img);

/// Divides each column by its maximum. Columns whose maximum is not
/// positive are set to zero.
[[nodiscard]] RealMatrix column_normalize(const RealMatrix& img);

/// Number of upper histogram bins kept for `mode`.
[[nodiscard]] std::size_t eclean_kept_bins(const CleanParams& p, CleanMode mode);

/// Histogram threshold over the nonzero pixels: `histogram_bins` equal-width
/// bins span [min, max]; pixels below the lower edge of the kept upper bins
/// are zeroed.
[[nodiscard]] RealMatrix eclean(const RealMatrix& img, const CleanParams& p, CleanMode mode);
[[nodiscard]] RealMatrix eclean_bins(const RealMatrix& img, std::size_t histogram_bins, std::size_t keep);

/// Zeroes every 8-connected component of nonzero pixels with fewer than
/// `min_pixels` members.
[[nodiscard]] RealMatrix remove_outliers(const RealMatrix& img, std::size_t min_pixels);

/// Follows the farthest target line through slow time with a win x win
/// kernel and keeps only the pixels under it.
[[nodiscard]] RealMatrix kernel_clean(const RealMatrix& rm, std::size_t win = 6);

/// floor_reference, column_normalize, eclean, remove_outliers, kernel_clean.
[[nodiscard]] RealMatrix clean_rangemap(const RealMatrix& rm_db, const CleanParams& p);
/// floor_reference, eclean (spectrogram mode), remove_outliers.
[[nodiscard]] RealMatrix clean_spectrogram(const RealMatrix& md_db, const CleanParams& p);

}  // namespace adlradar
