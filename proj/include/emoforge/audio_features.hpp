/* Copyright 2026 The emoforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

// Time-domain descriptors of a clip: center-clipped autocorrelation pitch
// strength, harmonic energy from a time-median-filtered spectrogram, frame
// RMS energy, pause ratio and amplitude moments.

#include <array>

#include "emoforge/fft.hpp"
#include "emoforge/wav.hpp"

namespace emoforge {

struct FrameConfig {
  std::size_t frame_length = 2048;
  std::size_t hop_length = 512;
};

inline void validate(const FrameConfig& config) {
  require(config.frame_length > 0, ErrorKind::kParameter, "frame length must be positive");
  require(config.hop_length > 0 && config.hop_length <= config.frame_length, ErrorKind::kParameter,
          "hop length must lie in [1, frame_length]");
}

/// Frequency band searched for the pitch peak.
struct PitchRange {
  double min_hz = 50.0;
  double max_hz = 500.0;
};

struct AudioFeatureOptions {
  FrameConfig frame;
  PitchRange pitch;
  std::size_t harmonic_window = 31;  // frames
  double pause_threshold = 0.4;      // fraction of clip RMS
};

/// Frame count after the padding rule: clips shorter than one frame count as
/// one zero-padded frame; a trailing partial frame is dropped.
inline std::size_t frame_count(std::size_t num_samples, const FrameConfig& config) {
  if (num_samples <= config.frame_length) return 1;
  return (num_samples - config.frame_length) / config.hop_length + 1;
}

/// View of the samples with frames addressed by index; owns a padded copy
/// only when the clip is shorter than one frame.
class Framer {
 public:
  Framer(std::span<const double> samples, const FrameConfig& config) : config_(config) {
    validate(config);
    if (samples.size() < config.frame_length) {
      padded_.assign(samples.begin(), samples.end());
      padded_.resize(config.frame_length, 0.0);
      samples_ = padded_;
    } else {
      samples_ = samples;
    }
    count_ = frame_count(samples_.size(), config);
  }

  std::size_t size() const { return count_; }
  std::span<const double> operator[](std::size_t i) const {
    return samples_.subspan(i * config_.hop_length, config_.frame_length);
  }

 private:
  FrameConfig config_;
  std::vector<double> padded_;
  std::span<const double> samples_;
  std::size_t count_ = 0;
};

inline double center_clip(double y, double clip_level) {
  if (y >= clip_level) return y - clip_level;
  if (y <= -clip_level) return y + clip_level;
  return 0.0;
}

/// Center clipping with threshold C: shifts samples beyond +/-C toward zero by
/// C and zeroes everything inside (-C, C).
inline std::vector<double> center_clip(std::span<const double> frame, double clip_level) {
  require(clip_level >= 0.0, ErrorKind::kParameter, "clip level must be non-negative");
  std::vector<double> out(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) out[i] = center_clip(frame[i], clip_level);
  return out;
}

struct PitchPeak {
  double value = 0.0;  // normalized autocorrelation in [-1, 1]
  std::size_t lag = 0;
  bool silent = false;
};

/// Lag bounds (inclusive) covering the pitch range at a sample rate, clamped
/// to what a frame of the given length can express.
inline std::pair<std::size_t, std::size_t> pitch_lag_bounds(std::size_t frame_length, std::uint32_t sample_rate,
                                                            const PitchRange& range = {}) {
  require(range.min_hz > 0.0 && range.max_hz > range.min_hz, ErrorKind::kParameter, "invalid pitch range");
  const double sr = static_cast<double>(sample_rate);
  std::size_t lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(sr / range.max_hz)));
  std::size_t hi = static_cast<std::size_t>(std::ceil(sr / range.min_hz));
  hi = std::min(hi, frame_length - 1);
  if (lo > hi) lo = 1;
  return {lo, hi};
}

/// Pitch strength of one frame: clip at half the mean absolute amplitude,
/// autocorrelate, normalize by the zero-lag energy and take the maximum over
/// the pitch lag band.
class PitchAnalyzer {
 public:
  PitchAnalyzer(std::size_t frame_length, std::uint32_t sample_rate, const PitchRange& range = {})
      : frame_length_(frame_length), fft_(2 * frame_length), acf_(frame_length) {
    require(sample_rate > 0, ErrorKind::kParameter, "sample rate must be positive");
    std::tie(lag_min_, lag_max_) = pitch_lag_bounds(frame_length, sample_rate, range);
  }

  PitchPeak operator()(std::span<const double> frame) {
    require(frame.size() == frame_length_, ErrorKind::kShape, "frame length mismatch");
    if (frame_length_ < 2) return {0.0, 0, true};
    double abs_sum = 0.0;
    for (double v : frame) abs_sum += std::abs(v);
    const double clip_level = 0.5 * abs_sum / static_cast<double>(frame.size());
    clipped_.resize(frame.size());
    double energy = 0.0;
    for (std::size_t i = 0; i < frame.size(); ++i) {
      clipped_[i] = center_clip(frame[i], clip_level);
      energy += clipped_[i] * clipped_[i];
    }
    if (energy <= 0.0) return {0.0, 0, true};

    fft_.autocorrelation(clipped_, acf_);
    PitchPeak best{-2.0, lag_min_, false};
    for (std::size_t tau = lag_min_; tau <= lag_max_; ++tau) {
      const double r = std::clamp(acf_[tau] / energy, -1.0, 1.0);
      if (r > best.value) best = {r, tau, false};
    }
    return best;
  }

  std::size_t lag_min() const { return lag_min_; }
  std::size_t lag_max() const { return lag_max_; }

 private:
  std::size_t frame_length_;
  std::size_t lag_min_ = 1;
  std::size_t lag_max_ = 1;
  RealFft fft_;
  std::vector<double> acf_;
  std::vector<double> clipped_;
};

inline PitchPeak autocorr_pitch(std::span<const double> frame, std::uint32_t sample_rate,
                                const PitchRange& range = {}) {
  require(!frame.empty(), ErrorKind::kShape, "empty frame");
  PitchAnalyzer analyzer(frame.size(), sample_rate, range);
  return analyzer(frame);
}

inline constexpr std::size_t kMaxMedianWindow = std::size_t{1} << 16;

/// median_filter_1d writing into `y` (same length as x); `window` is scratch
/// storage reused across calls.
inline void median_filter_into(std::span<const double> x, std::size_t l, std::span<double> y,
                               std::vector<double>& window) {
  require(l >= 1 && l <= kMaxMedianWindow, ErrorKind::kParameter,
          "median window must lie in [1, " + std::to_string(kMaxMedianWindow) + "]");
  require(y.size() == x.size(), ErrorKind::kShape, "median output length mismatch");
  const std::size_t n = x.size();
  if (l == 1) {
    std::copy(x.begin(), x.end(), y.begin());
    return;
  }
  const std::size_t before = l / 2;
  const std::size_t after = (l - 1) / 2;
  // Sorted copy of the current window, updated incrementally as it slides.
  window.clear();
  std::size_t lo = 0, hi = 0;  // window covers [lo, hi)
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t new_lo = i >= before ? i - before : 0;
    const std::size_t new_hi = std::min(n, i + after + 1);
    for (; hi < new_hi; ++hi) window.insert(std::upper_bound(window.begin(), window.end(), x[hi]), x[hi]);
    for (; lo < new_lo; ++lo) window.erase(std::lower_bound(window.begin(), window.end(), x[lo]));
    const std::size_t m = window.size();
    y[i] = m % 2 == 1 ? window[m / 2] : 0.5 * (window[m / 2 - 1] + window[m / 2]);
  }
}

/// Sliding median of window length l. For odd l the window is centered; for
/// even l it spans [n - l/2, n + l/2 - 1] and the median is the mean of the
/// two middle values. Windows are truncated at the sequence ends.
inline std::vector<double> median_filter_1d(std::span<const double> x, std::size_t l) {
  std::vector<double> y(x.size());
  std::vector<double> window;
  median_filter_into(x, l, y, window);
  return y;
}

/// Magnitude spectrogram: rows are frequency bins, columns are frames.
struct Spectrogram {
  Matrix magnitudes;
  std::size_t fft_size = 0;
  std::size_t hop_length = 0;

  std::size_t bins() const { return static_cast<std::size_t>(magnitudes.rows()); }
  std::size_t frames() const { return static_cast<std::size_t>(magnitudes.cols()); }
};

inline Spectrogram spectrogram(std::span<const double> samples, const FrameConfig& config) {
  Framer framer(samples, config);
  RealFft fft(config.frame_length);
  Spectrogram s;
  s.fft_size = config.frame_length;
  s.hop_length = config.hop_length;
  s.magnitudes.resize(static_cast<Eigen::Index>(fft.bins()), static_cast<Eigen::Index>(framer.size()));
  std::vector<double> column(fft.bins());
  for (std::size_t t = 0; t < framer.size(); ++t) {
    fft.magnitude(framer[t], column);
    for (std::size_t k = 0; k < column.size(); ++k) s.magnitudes(Eigen::Index(k), Eigen::Index(t)) = column[k];
  }
  return s;
}

/// Harmonic-enhanced spectrogram: each frequency slice median-filtered along
/// time with the given window.
inline Matrix harmonic_enhance(const Spectrogram& spec, std::size_t window) {
  Matrix h(spec.magnitudes.rows(), spec.magnitudes.cols());
  const auto frames = spec.frames();
  std::vector<double> scratch;
  scratch.reserve(std::min(window, frames));
  // Row-major storage keeps each frequency slice contiguous.
  for (Eigen::Index k = 0; k < spec.magnitudes.rows(); ++k) {
    median_filter_into({spec.magnitudes.row(k).data(), frames}, window, {h.row(k).data(), frames}, scratch);
  }
  return h;
}

struct HarmonicFeature {
  double harmonic_mean = 0.0;
  std::vector<double> per_frame;  // mean over frequency of each time column
};

inline HarmonicFeature harmonic_feature(const AudioClip& clip, const FrameConfig& config,
                                        std::size_t harmonic_window = 31) {
  validate(clip);
  const Matrix h = harmonic_enhance(spectrogram(clip.samples, config), harmonic_window);
  HarmonicFeature out;
  out.harmonic_mean = h.mean();
  out.per_frame.resize(static_cast<std::size_t>(h.cols()));
  for (Eigen::Index t = 0; t < h.cols(); ++t) out.per_frame[t] = h.col(t).mean();
  return out;
}

inline double root_mean_square(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

struct RmseFeature {
  double mean = 0.0;
  double std = 0.0;
  std::vector<double> per_frame;
};

inline RmseFeature rmse(const AudioClip& clip, const FrameConfig& config) {
  validate(clip);
  Framer framer(clip.samples, config);
  RmseFeature out;
  out.per_frame.resize(framer.size());
  for (std::size_t t = 0; t < framer.size(); ++t) out.per_frame[t] = root_mean_square(framer[t]);
  out.mean = mean(out.per_frame);
  out.std = stddev(out.per_frame);
  return out;
}

/// Fraction of samples whose magnitude falls below threshold * (clip RMS).
/// A silent clip has a zero threshold and therefore ratio 0.
inline double pause_ratio(const AudioClip& clip, double threshold = 0.4) {
  validate(clip);
  const double t = threshold * root_mean_square(clip.samples);
  std::size_t below = 0;
  for (double v : clip.samples) below += std::abs(v) < t ? 1 : 0;
  return static_cast<double>(below) / static_cast<double>(clip.samples.size());
}

struct CentralMoments {
  double mean = 0.0;
  double std = 0.0;
};

inline CentralMoments central_moments(const AudioClip& clip) {
  validate(clip);
  return {mean(clip.samples), stddev(clip.samples)};
}

/// The eight clip-level descriptors in canonical serialization order.
struct AudioFeatureVector {
  static constexpr std::size_t kSize = 8;
  static constexpr std::array<const char*, kSize> kNames = {
      "autocorr_peak_mean", "autocorr_peak_std", "harmonic_mean", "rmse_mean",
      "rmse_std",           "pause_ratio",       "amp_mean",      "amp_std"};

  double autocorr_peak_mean = 0.0;
  double autocorr_peak_std = 0.0;
  double harmonic_mean = 0.0;
  double rmse_mean = 0.0;
  double rmse_std = 0.0;
  double pause_ratio = 0.0;
  double amp_mean = 0.0;
  double amp_std = 0.0;

  std::array<double, kSize> values() const {
    return {autocorr_peak_mean, autocorr_peak_std, harmonic_mean, rmse_mean,
            rmse_std,           pause_ratio,       amp_mean,      amp_std};
  }
};

inline std::vector<double> autocorr_peaks(const AudioClip& clip, const Framer& framer,
                                          const AudioFeatureOptions& options) {
  PitchAnalyzer analyzer(options.frame.frame_length, clip.sample_rate, options.pitch);
  std::vector<double> peaks(framer.size());
  for (std::size_t t = 0; t < framer.size(); ++t) peaks[t] = analyzer(framer[t]).value;
  return peaks;
}

inline AudioFeatureVector extract_audio_features(const AudioClip& clip, const AudioFeatureOptions& options = {}) {
  validate(clip);
  Framer framer(clip.samples, options.frame);
  const auto peaks = autocorr_peaks(clip, framer, options);
  const auto energy = rmse(clip, options.frame);
  const auto moments = central_moments(clip);

  AudioFeatureVector v;
  v.autocorr_peak_mean = mean(peaks);
  v.autocorr_peak_std = stddev(peaks);
  v.harmonic_mean = harmonic_feature(clip, options.frame, options.harmonic_window).harmonic_mean;
  v.rmse_mean = energy.mean;
  v.rmse_std = energy.std;
  v.pause_ratio = pause_ratio(clip, options.pause_threshold);
  v.amp_mean = moments.mean;
  v.amp_std = moments.std;
  return v;
}

/// Per-frame descriptors for sequence models, one row per frame:
/// autocorr peak, rms, harmonic level, pause indicator, amplitude mean, amplitude std.
struct FrameFeatureSequence {
  static constexpr std::size_t kWidth = 6;
  static constexpr std::array<const char*, kWidth> kNames = {"autocorr_peak", "rmse",     "harmonic",
                                                             "pause",         "amp_mean", "amp_std"};
  Matrix frames;

  std::size_t frame_count() const { return static_cast<std::size_t>(frames.rows()); }
};

inline FrameFeatureSequence extract_frame_sequence(const AudioClip& clip, const AudioFeatureOptions& options = {}) {
  validate(clip);
  Framer framer(clip.samples, options.frame);
  const auto peaks = autocorr_peaks(clip, framer, options);
  const auto harmonic = harmonic_feature(clip, options.frame, options.harmonic_window);
  const double pause_level = options.pause_threshold * root_mean_square(clip.samples);

  FrameFeatureSequence seq;
  seq.frames.resize(static_cast<Eigen::Index>(framer.size()), FrameFeatureSequence::kWidth);
  for (std::size_t t = 0; t < framer.size(); ++t) {
    const auto frame = framer[t];
    const double e = root_mean_square(frame);
    const auto r = static_cast<Eigen::Index>(t);
    seq.frames(r, 0) = peaks[t];
    seq.frames(r, 1) = e;
    seq.frames(r, 2) = harmonic.per_frame[t];
    seq.frames(r, 3) = e < pause_level ? 1.0 : 0.0;
    seq.frames(r, 4) = mean(frame);
    seq.frames(r, 5) = stddev(frame);
  }
  return seq;
}

}  // namespace emoforge
