#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ghisim {

struct Site {
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  std::string name;
};

// Hourly extraterrestrial horizontal irradiation in Wh/m^2 from the solar
// constant (1367 W/m^2), eccentricity correction, declination and
// hour-angle integration over the hour. Zero when the sun stays below the
// horizon for the whole hour. d is the day of a 365-day year, h the UTC
// hour label covering [h, h+1).
double compute_toa(const Site& site, int d, int h);

struct CsvSchema {
  std::string timestamp_col = "timestamp_utc";
  std::string ghi_col = "ghi_whm2";
  std::string toa_col = "toa_whm2";
  double measurement_slack = 0.0;  // allowed ghi - toa excess before flagging
  int max_gap_hours = 3;           // longest interpolatable run
};

struct CleaningReport {
  std::size_t clamped_negative = 0;
  std::size_t flagged_over_toa = 0;
  std::size_t interpolated = 0;
  std::size_t dropped_leap_hours = 0;

  bool empty() const {
    return clamped_negative == 0 && flagged_over_toa == 0 &&
           interpolated == 0 && dropped_leap_hours == 0;
  }
  std::string to_text() const;
};

// Gap-free grid of hourly observations over whole 365-day years.
// Immutable after ingestion; indexing is (year index i, day-of-year d in
// 1..365, hour h in 0..23).
class HourlyPanel {
 public:
  HourlyPanel(Site site, int first_year, int n_years);

  int first_year() const { return first_year_; }
  int n_years() const { return n_years_; }
  const Site& site() const { return site_; }

  static std::size_t index(int i, int d, int h) {
    return (static_cast<std::size_t>(i) * 365 + static_cast<std::size_t>(d - 1)) *
               24 +
           static_cast<std::size_t>(h);
  }
  double ghi(int i, int d, int h) const { return ghi_[index(i, d, h)]; }
  double toa(int i, int d, int h) const { return toa_[index(i, d, h)]; }
  bool over_toa(int i, int d, int h) const {
    return over_toa_[index(i, d, h)] != 0;
  }
  void set(int i, int d, int h, double ghi, double toa, bool flagged = false);

  std::size_t size() const { return ghi_.size(); }
  const std::vector<double>& ghi_values() const { return ghi_; }
  const std::vector<double>& toa_values() const { return toa_; }

  // Sub-panel with the given year indices (order preserved).
  HourlyPanel select_years(const std::vector<int>& year_indices) const;

 private:
  Site site_;
  int first_year_;
  int n_years_;
  std::vector<double> ghi_;
  std::vector<double> toa_;
  std::vector<std::uint8_t> over_toa_;
};

// Reads the CSV contract `timestamp_utc,ghi_whm2,toa_whm2` (RFC 3339
// timestamps at hour resolution), drops Feb 29, clamps negative GHI to
// zero, flags GHI > TOA + slack, and interpolates gaps up to
// max_gap_hours (nighttime gaps are filled with zero).
HourlyPanel ingest_csv(const std::string& path, const CsvSchema& schema,
                       CleaningReport* report = nullptr);

void export_csv(const HourlyPanel& panel, const std::string& path);

}  // namespace ghisim
