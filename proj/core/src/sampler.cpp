// SPDX-License-Identifier: Apache-2.0
#include "lidarsim/sampler.hpp"

#include "lidarsim/error.hpp"

#include <fmt/format.h>
#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <cmath>

namespace lidarsim {

namespace {

constexpr double kTwoPi = 2.0 * kPi;
// Absorbs rounding when a column angle sits exactly on a sweep boundary.
constexpr double kIndexSlack = 1e-9;

}  // namespace

SensorProfile SensorProfile::os0_128() {
  SensorProfile p;
  p.channels = 128;
  p.samples_per_rev = 1024;
  p.fov_h = kTwoPi;
  p.fov_v = deg2rad(90.0);
  p.spin_rate = 10.0;
  p.wavelength_nm = 850.0;
  p.width = 1024;
  p.max_capture_fov = deg2rad(115.0);
  p.capture_margin = deg2rad(2.0);
  p.d_max = 50.0;
  p.r_l_max = 0.8;
  p.noise_sigma = 0.03;
  p.noise_range_coeff = 0.0;
  return p;
}

void SensorProfile::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError("sensor profile: " + msg); };
  if (channels < 1) fail(fmt::format("channels {} must be >= 1", channels));
  if (samples_per_rev < 1) fail(fmt::format("samples_per_rev {} must be >= 1", samples_per_rev));
  if (!(fov_h > 0.0 && fov_h <= kTwoPi + 1e-12)) fail(fmt::format("fov_h {} rad outside (0, 2 pi]", fov_h));
  if (!(fov_v > 0.0 && fov_v < kPi)) fail(fmt::format("fov_v {} rad outside (0, pi)", fov_v));
  if (elevation_table) {
    if (static_cast<int>(elevation_table->size()) != channels) {
      fail(fmt::format("elevation_table has {} entries for {} channels", elevation_table->size(), channels));
    }
    for (double phi : *elevation_table) {
      if (std::abs(phi) > fov_v / 2.0 + 1e-12) {
        fail(fmt::format("elevation {} rad outside +/- fov_v/2", phi));
      }
    }
  }
  if (!(spin_rate > 0.0)) fail(fmt::format("spin_rate {} Hz must be positive", spin_rate));
  if (!(wavelength_nm > 0.0)) fail(fmt::format("wavelength {} nm must be positive", wavelength_nm));
  if (width < 64 || width % 2 != 0) fail(fmt::format("width {} must be even and >= 64", width));
  if (!(d_max > 0.0)) fail(fmt::format("d_max {} m must be positive", d_max));
  if (!(r_l_max >= 0.0 && r_l_max <= 1.0)) fail(fmt::format("r_l_max {} outside [0, 1]", r_l_max));
  if (!(noise_sigma >= 0.0) || !(noise_range_coeff >= 0.0)) fail("noise parameters must be non-negative");
}

double SensorProfile::elevation(int channel) const {
  if (elevation_table) {
    return (*elevation_table)[static_cast<std::size_t>(channel)];
  }
  if (channels == 1) {
    return 0.0;
  }
  return fov_v / 2.0 - channel * fov_v / (channels - 1);
}

std::vector<BeamSample> beam_table(const SensorProfile& profile, double sweep_start, double sweep_end, double t0,
                                   double dt) {
  if (!(sweep_end > sweep_start)) {
    throw RangeError(fmt::format("empty sweep [{}, {})", sweep_start, sweep_end));
  }
  const double spacing = profile.column_spacing();
  const double sweep = sweep_end - sweep_start;

  std::vector<double> elevations(static_cast<std::size_t>(profile.channels));
  for (int j = 0; j < profile.channels; ++j) {
    elevations[static_cast<std::size_t>(j)] = profile.elevation(j);
  }

  std::vector<BeamSample> beams;
  const auto first_rev = static_cast<std::int64_t>(std::floor(sweep_start / kTwoPi));
  const auto last_rev = static_cast<std::int64_t>(std::floor(sweep_end / kTwoPi));
  for (std::int64_t rev = first_rev; rev <= last_rev; ++rev) {
    const double base = kTwoPi * static_cast<double>(rev);
    const long lo = std::max(0L, static_cast<long>(std::ceil((sweep_start - base) / spacing - kIndexSlack)));
    const long hi = std::min<long>(profile.samples_per_rev,
                                   static_cast<long>(std::ceil((sweep_end - base) / spacing - kIndexSlack)));
    for (long i = lo; i < hi; ++i) {
      const double azimuth = static_cast<double>(i) * spacing;
      const double offset = std::max(0.0, base + azimuth - sweep_start);
      for (int j = 0; j < profile.channels; ++j) {
        BeamSample b;
        b.column = static_cast<int>(i);
        b.channel = j;
        b.revolution = rev;
        b.azimuth = azimuth;
        b.elevation = elevations[static_cast<std::size_t>(j)];
        b.sweep_offset = offset;
        b.timestamp = t0 + offset / sweep * dt;
        beams.push_back(b);
      }
    }
  }
  return beams;
}

PixelCoord beam_to_pixel(double theta, double phi, const CameraIntrinsics& intr) {
  if (!(std::abs(theta) <= intr.fov / 2.0 + 1e-12)) {
    throw OutOfFrustumError(fmt::format("beam azimuth {} rad outside capture FOV {} rad", theta, intr.fov));
  }
  const double c = std::cos(theta);
  const PixelCoord px{intr.fx * std::sin(theta) / c + intr.cu, -intr.fy * std::tan(phi) / c + intr.cv};
  const double rx = std::round(px.x);
  const double ry = std::round(px.y);
  if (!(rx >= 0.0 && rx < intr.width && ry >= 0.0 && ry < intr.width)) {
    throw OutOfFrustumError(fmt::format("beam (theta {} rad, phi {} rad) maps to pixel ({}, {}) outside {}x{}",
                                        theta, phi, px.x, px.y, intr.width, intr.width));
  }
  return px;
}

std::vector<RawReturn> sample_buffers(const std::vector<BeamSample>& beams, const CapturePlan& plan,
                                      const std::vector<FrameBuffers>& frames, bool use_24bit) {
  if (frames.size() != plan.captures.size()) {
    throw ValidationError(fmt::format("{} frame buffers for {} captures", frames.size(), plan.captures.size()));
  }
  std::vector<RawReturn> out(beams.size());
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, beams.size(), 4096),
                    [&](const tbb::blocked_range<std::size_t>& range) {
                      for (std::size_t k = range.begin(); k != range.end(); ++k) {
                        const BeamSample& beam = beams[k];
                        const std::size_t c = plan.capture_for_offset(beam.sweep_offset);
                        const Capture& capture = plan.captures[c];
                        const FrameBuffers& fb = frames[c];
                        const double theta = plan.sweep_start + beam.sweep_offset - capture.yaw;
                        const PixelCoord px = beam_to_pixel(theta, beam.elevation, capture.intrinsics);

                        RawReturn& r = out[k];
                        r.beam = beam;
                        r.capture = static_cast<std::uint32_t>(c);
                        r.pixel_x = static_cast<int>(std::lround(px.x));
                        r.pixel_y = static_cast<int>(std::lround(px.y));
                        const std::size_t idx = fb.index(r.pixel_x, r.pixel_y);
                        if (!fb.is_hit(idx)) {
                          continue;
                        }
                        r.hit = true;
                        r.depth = fb.read_depth(idx, use_24bit);
                        r.incidence = fb.read_incidence(idx, use_24bit);
                        r.material_index = fb.read_material(idx, use_24bit);
                        r.instance_id = fb.instance[idx];
                      }
                    });
  return out;
}

}  // namespace lidarsim
