// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace lidarsim {

struct SpectralSample {
  double wavelength_nm;
  double reflectance;  // fraction in [0, 1]
};

/// Normal-incidence reflectance spectrum: wavelengths strictly increasing,
/// at least two samples, reflectance in [0, 1].
class Spectrum {
 public:
  Spectrum() = default;
  /// Sorts, removes exact duplicates and validates. Throws ValidationError.
  Spectrum(std::string material_name, std::vector<SpectralSample> samples);

  const std::string& material_name() const { return name_; }
  const std::vector<SpectralSample>& samples() const { return samples_; }
  double first_wavelength() const { return samples_.front().wavelength_nm; }
  double last_wavelength() const { return samples_.back().wavelength_nm; }

  /// Linear interpolation between bracketing samples. Queries up to
  /// `margin_nm` outside the sampled range return the edge value; anything
  /// further throws RangeError.
  double reflectance_at(double wavelength_nm, double margin_nm) const;

 private:
  std::string name_;
  std::vector<SpectralSample> samples_;
};

/// Parses an ECOSTRESS-style ASCII spectrum: `Key: value` header lines
/// followed by two-column rows of wavelength and reflectance percent.
/// Wavelength units come from the `X Units` header (micrometers when absent).
Spectrum read_spectrum_file(const std::filesystem::path& path);
/// Writes the same layout with wavelengths in nanometers.
void write_spectrum_file(const Spectrum& spectrum, const std::filesystem::path& path);

struct MaterialEntry {
  std::string display_name;
  std::filesystem::path source;
  Spectrum spectrum;
};

class SpectralLibrary {
 public:
  static constexpr double kDefaultMarginNm = 25.0;
  static constexpr double kDefaultFlatReflectance = 0.5;

  SpectralLibrary() = default;

  void add(int material_index, MaterialEntry entry);
  void set_default_reflectance(double reflectance);
  void set_margin_nm(double margin_nm) { margin_nm_ = margin_nm; }

  double margin_nm() const { return margin_nm_; }
  double default_reflectance() const { return default_reflectance_; }
  const std::map<int, MaterialEntry>& entries() const { return entries_; }
  bool contains(int material_index) const;

  /// R(theta = 0) of `material_index` at `wavelength_nm`. Index 0 is the flat
  /// default material; unknown indices throw RangeError.
  double reflectance_at(int material_index, double wavelength_nm) const;

 private:
  std::map<int, MaterialEntry> entries_;
  double default_reflectance_ = kDefaultFlatReflectance;
  double margin_nm_ = kDefaultMarginNm;
};

/// Loads a mapping table. Each non-comment line is
/// `material_index, spectrum_file, display name`; relative paths resolve
/// against the mapping file's directory.
SpectralLibrary load_library(const std::filesystem::path& mapping_path);

/// Writes every entry's spectrum next to `mapping_path` plus the mapping table.
void write_library(const SpectralLibrary& library, const std::filesystem::path& mapping_path);

}  // namespace lidarsim
