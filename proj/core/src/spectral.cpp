// SPDX-License-Identifier: Apache-2.0
#include "lidarsim/spectral.hpp"

#include "lidarsim/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace lidarsim {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double unit_scale_to_nm(const std::string& units, const std::filesystem::path& path) {
  const std::string u = lower(units);
  if (u.find("nanometer") != std::string::npos || u.find("(nm)") != std::string::npos) {
    return 1.0;
  }
  if (u.find("micrometer") != std::string::npos || u.find("micron") != std::string::npos ||
      u.find("(um)") != std::string::npos) {
    return 1000.0;
  }
  throw ParseError(fmt::format("{}: unsupported wavelength units '{}'", path.string(), units));
}

// Parses a decimal token scaled by 10^shift without an intermediate rounding
// step, so "12.5" with shift -2 yields exactly the double nearest 0.125.
std::optional<double> parse_scaled(std::string_view token, int shift) {
  std::string_view mantissa = token;
  int exponent = 0;
  if (const auto e = token.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = token.substr(0, e);
    auto exp_text = token.substr(e + 1);
    if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    if (ec != std::errc{} || ptr != exp_text.data() + exp_text.size()) return std::nullopt;
  }
  const std::string text = fmt::format("{}e{}", mantissa, exponent + shift);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

// Shortest decimal of `fraction`, with the decimal point moved two places right.
std::string percent_text(double fraction) {
  const std::string s = fmt::format("{}", fraction);
  if (s.find_first_of("eE") != std::string::npos) {
    const auto e = s.find_first_of("eE");
    return fmt::format("{}e{}", s.substr(0, e), std::stoi(s.substr(e + 1)) + 2);
  }
  const auto dot = s.find('.');
  std::string digits = dot == std::string::npos ? s : s.substr(0, dot) + s.substr(dot + 1);
  std::size_t point = (dot == std::string::npos ? s.size() : dot) + 2;
  while (digits.size() < point) digits += '0';
  std::string out = digits.substr(0, point) + (point < digits.size() ? "." + digits.substr(point) : "");
  const auto nz = out.find_first_not_of('0');
  if (nz == std::string::npos || out[nz] == '.') return nz == std::string::npos ? "0" : "0" + out.substr(nz);
  return out.substr(nz);
}

// Two numbers separated by whitespace and/or a comma, nothing else.
// `y` keeps the reflectance token so it can be rescaled exactly.
bool parse_row(const std::string& line, double& x, std::string& y) {
  std::string normalized = line;
  std::replace(normalized.begin(), normalized.end(), ',', ' ');
  std::istringstream in(normalized);
  std::string rest;
  if (!(in >> x >> y) || (in >> rest)) return false;
  return parse_scaled(y, 0).has_value();
}

}  // namespace

Spectrum::Spectrum(std::string material_name, std::vector<SpectralSample> samples)
    : name_(std::move(material_name)), samples_(std::move(samples)) {
  std::sort(samples_.begin(), samples_.end(), [](const SpectralSample& a, const SpectralSample& b) {
    return a.wavelength_nm < b.wavelength_nm;
  });
  samples_.erase(std::unique(samples_.begin(), samples_.end(),
                             [](const SpectralSample& a, const SpectralSample& b) {
                               return a.wavelength_nm == b.wavelength_nm && a.reflectance == b.reflectance;
                             }),
                 samples_.end());
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    const auto& s = samples_[k];
    if (!std::isfinite(s.wavelength_nm) || !std::isfinite(s.reflectance)) {
      throw ValidationError(fmt::format("spectrum '{}': non-finite sample", name_));
    }
    if (s.reflectance < 0.0 || s.reflectance > 1.0) {
      throw ValidationError(fmt::format("spectrum '{}': reflectance {} at {} nm outside [0, 1]", name_,
                                        s.reflectance, s.wavelength_nm));
    }
    if (k > 0 && !(s.wavelength_nm > samples_[k - 1].wavelength_nm)) {
      throw ValidationError(fmt::format("spectrum '{}': conflicting samples at {} nm", name_, s.wavelength_nm));
    }
  }
  if (samples_.size() < 2) {
    throw ValidationError(fmt::format("spectrum '{}': needs at least two samples", name_));
  }
}

double Spectrum::reflectance_at(double wavelength_nm, double margin_nm) const {
  if (wavelength_nm < first_wavelength() - margin_nm || wavelength_nm > last_wavelength() + margin_nm ||
      std::isnan(wavelength_nm)) {
    throw RangeError(fmt::format("spectrum '{}': {} nm outside [{}, {}] nm (margin {} nm)", name_, wavelength_nm,
                                 first_wavelength(), last_wavelength(), margin_nm));
  }
  if (wavelength_nm <= first_wavelength()) {
    return samples_.front().reflectance;
  }
  if (wavelength_nm >= last_wavelength()) {
    return samples_.back().reflectance;
  }
  const auto upper = std::upper_bound(samples_.begin(), samples_.end(), wavelength_nm,
                                      [](double w, const SpectralSample& s) { return w < s.wavelength_nm; });
  const auto lower_it = upper - 1;
  if (lower_it->wavelength_nm == wavelength_nm) {
    return lower_it->reflectance;
  }
  const double f = (wavelength_nm - lower_it->wavelength_nm) / (upper->wavelength_nm - lower_it->wavelength_nm);
  const double r = lower_it->reflectance + f * (upper->reflectance - lower_it->reflectance);
  return std::clamp(r, 0.0, 1.0);
}

Spectrum read_spectrum_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError(fmt::format("cannot open spectrum file '{}'", path.string()));
  }
  std::string name = path.stem().string();
  std::string x_units = "Wavelength (micrometers)";
  std::vector<std::pair<double, std::string>> rows;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty()) {
      continue;
    }
    double x = 0.0;
    std::string y;
    if (parse_row(text, x, y)) {
      rows.emplace_back(x, y);
      continue;
    }
    if (!rows.empty()) {
      throw ParseError(fmt::format("{}:{}: expected 'wavelength reflectance' row", path.string(), line_no));
    }
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
      throw ParseError(fmt::format("{}:{}: expected 'Key: value' header line", path.string(), line_no));
    }
    const std::string key = lower(trim(std::string_view(text).substr(0, colon)));
    const std::string value = trim(std::string_view(text).substr(colon + 1));
    if (key == "name") {
      name = value;
    } else if (key == "x units") {
      x_units = value;
    }
  }
  if (rows.empty()) {
    throw ParseError(fmt::format("{}: no spectral data rows", path.string()));
  }

  const double scale = unit_scale_to_nm(x_units, path);
  std::vector<SpectralSample> samples;
  samples.reserve(rows.size());
  for (const auto& [x, percent] : rows) {
    const double fraction = *parse_scaled(percent, -2);
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
      throw ValidationError(fmt::format("{}: reflectance {}% outside [0, 100]%", path.string(), percent));
    }
    samples.push_back({x * scale, fraction});
  }
  try {
    return Spectrum(std::move(name), std::move(samples));
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_spectrum_file(const Spectrum& spectrum, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError(fmt::format("cannot write spectrum file '{}'", path.string()));
  }
  const auto& s = spectrum.samples();
  out << "Name: " << spectrum.material_name() << '\n'
      << "Measurement: Directional Hemispherical Reflectance\n"
      << "First Column: X\n"
      << "Second Column: Y\n"
      << "X Units: Wavelength (nanometers)\n"
      << "Y Units: Reflectance (percent)\n"
      << fmt::format("First X Value: {}\n", s.front().wavelength_nm)
      << fmt::format("Last X Value: {}\n", s.back().wavelength_nm)
      << "Number of X Values: " << s.size() << '\n'
      << "Additional Information: none\n\n";
  for (const auto& sample : s) {
    // Shortest round-trip representation so reloading reproduces identical values.
    out << fmt::format("{}\t{}\n", sample.wavelength_nm, percent_text(sample.reflectance));
  }
}

void SpectralLibrary::add(int material_index, MaterialEntry entry) {
  if (material_index < 1 || material_index > 255) {
    throw ValidationError(fmt::format("material index {} outside [1, 255]", material_index));
  }
  if (!entries_.emplace(material_index, std::move(entry)).second) {
    throw ValidationError(fmt::format("material index {} mapped twice", material_index));
  }
}

void SpectralLibrary::set_default_reflectance(double reflectance) {
  if (!(reflectance >= 0.0 && reflectance <= 1.0)) {
    throw ValidationError(fmt::format("default reflectance {} outside [0, 1]", reflectance));
  }
  default_reflectance_ = reflectance;
}

bool SpectralLibrary::contains(int material_index) const {
  return material_index == 0 || entries_.count(material_index) != 0;
}

double SpectralLibrary::reflectance_at(int material_index, double wavelength_nm) const {
  if (material_index == 0) {
    return default_reflectance_;
  }
  const auto it = entries_.find(material_index);
  if (it == entries_.end()) {
    throw RangeError(fmt::format("material index {} not in spectral library", material_index));
  }
  return it->second.spectrum.reflectance_at(wavelength_nm, margin_nm_);
}

SpectralLibrary load_library(const std::filesystem::path& mapping_path) {
  std::ifstream in(mapping_path);
  if (!in) {
    throw IoError(fmt::format("cannot open material mapping '{}'", mapping_path.string()));
  }
  SpectralLibrary lib;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') {
      continue;
    }
    std::vector<std::string> fields;
    std::istringstream row(text);
    std::string field;
    while (std::getline(row, field, ',')) {
      fields.push_back(trim(field));
    }
    if (fields.size() < 2) {
      throw ParseError(fmt::format("{}:{}: expected 'index, file[, name]'", mapping_path.string(), line_no));
    }
    int index = 0;
    try {
      std::size_t used = 0;
      index = std::stoi(fields[0], &used);
      if (used != fields[0].size()) {
        throw std::invalid_argument(fields[0]);
      }
    } catch (const std::exception&) {
      throw ParseError(fmt::format("{}:{}: bad material index '{}'", mapping_path.string(), line_no, fields[0]));
    }
    std::filesystem::path file = fields[1];
    if (file.is_relative()) {
      file = mapping_path.parent_path() / file;
    }
    if (!std::filesystem::exists(file)) {
      throw IoError(fmt::format("{}:{}: material {} spectrum file '{}' not found", mapping_path.string(), line_no,
                                index, file.string()));
    }
    Spectrum spectrum = read_spectrum_file(file);
    std::string display = fields.size() > 2 ? fields[2] : spectrum.material_name();
    lib.add(index, MaterialEntry{std::move(display), file, std::move(spectrum)});
  }
  return lib;
}

void write_library(const SpectralLibrary& library, const std::filesystem::path& mapping_path) {
  const auto dir = mapping_path.parent_path();
  std::ofstream out(mapping_path);
  if (!out) {
    throw IoError(fmt::format("cannot write material mapping '{}'", mapping_path.string()));
  }
  out << "# material_index, spectrum_file, display_name\n";
  for (const auto& [index, entry] : library.entries()) {
    const std::string file = fmt::format("material_{:03d}.txt", index);
    write_spectrum_file(entry.spectrum, dir / file);
    out << index << ", " << file << ", " << entry.display_name << '\n';
  }
}

}  // namespace lidarsim
