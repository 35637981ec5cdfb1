#pragma once

#include <bestest/error.hpp>
#include <bestest/site.hpp>
#include <bestest/solar.hpp>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace bestest {

class WeatherError : public Error {
 public:
  enum class Kind {
    MalformedHeader,
    BadColumnCount,
    NonNumeric,
    NegativeIrradiance,
    NonMonotonicHour,
    BadRecordCount,
  };

  // row is the 1-based line number in the document (0 when not tied to a line),
  // column is 1-based (0 when not applicable).
  WeatherError(Kind kind, std::size_t row, std::size_t column, const std::string& what)
      : Error(what), kind_(kind), row_(row), column_(column) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  Kind kind_;
  std::size_t row_;
  std::size_t column_;
};

// Immutable hourly weather drive. Construction enforces the record invariants.
class WeatherSeries {
 public:
  static constexpr std::size_t kHoursPerYear = 8760;

  WeatherSeries(Site site, std::vector<WeatherRecord> records)
      : site_(site), records_(std::move(records)) {
    site_.validate();
    if (records_.empty() || records_.size() % 24 != 0)
      throw WeatherError(WeatherError::Kind::BadRecordCount, 0, 0,
                         "record count must be a positive multiple of 24, got " +
                             std::to_string(records_.size()));
    for (std::size_t i = 0; i < records_.size(); ++i) {
      const auto& r = records_[i];
      if (!(r.direct_normal >= 0.0) || !(r.diffuse_horizontal >= 0.0))
        throw WeatherError(WeatherError::Kind::NegativeIrradiance, 0, 0,
                           "negative irradiance at record " + std::to_string(i));
      if (!std::isfinite(r.dry_bulb) || !std::isfinite(r.direct_normal) ||
          !std::isfinite(r.diffuse_horizontal))
        throw WeatherError(WeatherError::Kind::NonNumeric, 0, 0,
                           "non-finite value at record " + std::to_string(i));
      if (r.hour_index < 0 || (i > 0 && r.hour_index <= records_[i - 1].hour_index))
        throw WeatherError(WeatherError::Kind::NonMonotonicHour, 0, 0,
                           "hour index not strictly increasing at record " + std::to_string(i));
    }
  }

  const Site& site() const noexcept { return site_; }
  const std::vector<WeatherRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  const WeatherRecord& operator[](std::size_t i) const { return records_[i]; }
  bool is_annual() const noexcept { return records_.size() == kHoursPerYear; }

  friend bool operator==(const WeatherSeries&, const WeatherSeries&) = default;

 private:
  Site site_;
  std::vector<WeatherRecord> records_;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  // from_chars rejects a leading '+', which we do as well.
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) return false;
  if constexpr (std::is_floating_point_v<T>) return std::isfinite(out);
  return true;
}

// Shortest decimal representation that round-trips exactly.
inline std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // fold -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::vector<std::string_view> lines_of(std::string_view text) {
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

}  // namespace detail

inline constexpr std::string_view kWeatherColumnHeader = "hour,dry_bulb_C,dni_Wm2,dhi_Wm2";

inline WeatherSeries parse_weather(std::string_view text) {
  using Kind = WeatherError::Kind;
  const auto lines = detail::lines_of(text);
  if (lines.size() < 2) throw WeatherError(Kind::MalformedHeader, 1, 0, "missing header lines");

  Site site;
  {
    auto f = detail::split(lines[0], ',');
    if (f.size() != 5 || f[0] != "#site")
      throw WeatherError(Kind::MalformedHeader, 1, 0, "expected '#site,<lat>,<lon>,<tz_meridian>,<ground_refl>'");
    double* dst[] = {&site.latitude, &site.longitude, &site.timezone_meridian, &site.ground_reflectance};
    for (std::size_t i = 0; i < 4; ++i)
      if (!detail::parse_number(f[i + 1], *dst[i]))
        throw WeatherError(Kind::MalformedHeader, 1, i + 2, "non-numeric site field");
    try {
      site.validate();
    } catch (const InvalidParameter& e) {
      throw WeatherError(Kind::MalformedHeader, 1, 0, e.what());
    }
  }
  if (lines[1] != kWeatherColumnHeader)
    throw WeatherError(Kind::MalformedHeader, 2, 0, "expected column header '" + std::string(kWeatherColumnHeader) + "'");

  std::vector<WeatherRecord> records;
  records.reserve(lines.size() - 2);
  for (std::size_t li = 2; li < lines.size(); ++li) {
    const std::size_t row = li + 1;
    auto f = detail::split(lines[li], ',');
    if (f.size() != 4)
      throw WeatherError(Kind::BadColumnCount, row, 0,
                         "line " + std::to_string(row) + ": expected 4 columns, got " + std::to_string(f.size()));
    WeatherRecord r;
    if (!detail::parse_number(f[0], r.hour_index))
      throw WeatherError(Kind::NonNumeric, row, 1, "line " + std::to_string(row) + ": non-numeric column 1");
    double* dst[] = {&r.dry_bulb, &r.direct_normal, &r.diffuse_horizontal};
    for (std::size_t c = 0; c < 3; ++c)
      if (!detail::parse_number(f[c + 1], *dst[c]))
        throw WeatherError(Kind::NonNumeric, row, c + 2,
                           "line " + std::to_string(row) + ": non-numeric column " + std::to_string(c + 2));
    if (r.direct_normal < 0.0 || r.diffuse_horizontal < 0.0)
      throw WeatherError(Kind::NegativeIrradiance, row, 0, "line " + std::to_string(row) + ": negative irradiance");
    if (r.hour_index < 0 || (!records.empty() && r.hour_index <= records.back().hour_index))
      throw WeatherError(Kind::NonMonotonicHour, row, 1,
                         "line " + std::to_string(row) + ": hour index not strictly increasing");
    records.push_back(r);
  }
  return WeatherSeries(site, std::move(records));
}

inline std::string serialize_weather(const WeatherSeries& series) {
  using detail::format_number;
  const auto& s = series.site();
  std::string out;
  out.reserve(series.size() * 32 + 64);
  out += "#site," + format_number(s.latitude) + ',' + format_number(s.longitude) + ',' +
         format_number(s.timezone_meridian) + ',' + format_number(s.ground_reflectance) + '\n';
  out += kWeatherColumnHeader;
  out += '\n';
  for (const auto& r : series.records()) {
    out += std::to_string(r.hour_index);
    out += ',' + format_number(r.dry_bulb) + ',' + format_number(r.direct_normal) + ',' +
           format_number(r.diffuse_horizontal) + '\n';
  }
  return out;
}

struct SynthWeatherParams {
  double mean_temp = 10.0;     // degC
  double daily_amp = 6.0;      // K, half peak-to-peak
  double seasonal_amp = 12.0;  // K, half peak-to-peak
  double clearness = 0.7;
  std::uint64_t seed = 1;
  double perturbation = 0.0;  // K, std-dev of seeded hourly noise; 0 = off
};

// Deterministic annual series: sinusoidal temperature (coldest mid-January and
// at 04:00 solar) and a Haurwitz clear-sky envelope split 80/20 into beam and
// diffuse, scaled by clearness.
inline WeatherSeries synth_weather(const Site& site, const SynthWeatherParams& p) {
  site.validate();
  if (!(p.daily_amp >= 0) || !(p.seasonal_amp >= 0) || !(p.clearness >= 0 && p.clearness <= 1) ||
      !std::isfinite(p.mean_temp) || !(p.perturbation >= 0) || !std::isfinite(p.daily_amp) ||
      !std::isfinite(p.seasonal_amp) || !std::isfinite(p.perturbation))
    throw InvalidParameter("synth_weather: amplitudes must be >= 0 and clearness in [0,1]");

  constexpr double two_pi = 2.0 * std::numbers::pi;
  constexpr double coldest_hour_of_year = 15.0 * 24.0;
  constexpr double coldest_hour_of_day = 4.0;

  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<WeatherRecord> records(WeatherSeries::kHoursPerYear);
  for (std::size_t h = 0; h < records.size(); ++h) {
    auto& r = records[h];
    r.hour_index = static_cast<std::int64_t>(h);
    const double hod = static_cast<double>(h % 24);
    const double seasonal = std::cos(two_pi * (static_cast<double>(h) - coldest_hour_of_year) / 8760.0);
    const double daily = std::cos(two_pi * (hod - coldest_hour_of_day) / 24.0);
    r.dry_bulb = p.mean_temp - p.seasonal_amp * seasonal - p.daily_amp * daily;
    if (p.perturbation > 0.0) r.dry_bulb += p.perturbation * noise(rng);

    const auto sun = sun_position(site, static_cast<std::int64_t>(h));
    if (sun.altitude > 0.0) {
      const double sin_alt = std::sin(sun.altitude * std::numbers::pi / 180.0);
      const double global = 1098.0 * sin_alt * std::exp(-0.057 / sin_alt);
      const double envelope = p.clearness * global;
      r.direct_normal = 0.8 * envelope / sin_alt;
      r.diffuse_horizontal = 0.2 * envelope;
    }
  }
  return WeatherSeries(site, std::move(records));
}

}  // namespace bestest
