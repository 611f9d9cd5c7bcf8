#include "ghisim/calendar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ghisim/errors.hpp"

namespace ghisim {

namespace {

constexpr double kSolarConstant = 1367.0;  // W/m^2
constexpr double kDeg = std::numbers::pi / 180.0;

// Cumulative days before each month, non-leap year.
constexpr int kCumDays[12] = {0,   31,  59,  90,  120, 151,
                              181, 212, 243, 273, 304, 334};


struct ParsedStamp {
  int year;
  int month;
  int day;
  int hour;
  bool leap_day;
  int doy365;  // 1..365, undefined for leap days
};

ParsedStamp parse_rfc3339_hour(const std::string& s) {
  int y, mo, da, h, mi, se;
  if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%d", &y, &mo, &da, &h, &mi,
                  &se) != 6) {
    throw NonMonotoneTimestamps("unparsable timestamp '" + s + "'");
  }
  if (mi != 0 || se != 0) {
    throw NonMonotoneTimestamps("timestamp not at hour resolution: " + s);
  }
  ParsedStamp p{};
  p.year = y;
  p.month = mo;
  p.day = da;
  p.hour = h;
  p.leap_day = (mo == 2 && da == 29);
  if (!p.leap_day) p.doy365 = kCumDays[mo - 1] + da;
  return p;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

double compute_toa(const Site& site, int d, int h) {
  if (site.latitude_deg < -90.0 || site.latitude_deg > 90.0) {
    throw DomainError("latitude out of [-90, 90]");
  }
  const double phi = site.latitude_deg * kDeg;
  const double decl =
      23.45 * kDeg * std::sin(2.0 * std::numbers::pi * (284.0 + d) / 365.0);
  const double ecc =
      1.0 + 0.033 * std::cos(2.0 * std::numbers::pi * d / 365.0);

  // Hour angle limits of the UTC hour [h, h+1) shifted to solar time.
  const double t0 = static_cast<double>(h) + site.longitude_deg / 15.0;
  double w1 = (t0 - 12.0) * 15.0 * kDeg;
  double w2 = (t0 + 1.0 - 12.0) * 15.0 * kDeg;

  const double cosws = -std::tan(phi) * std::tan(decl);
  double ws;
  if (cosws >= 1.0) {
    return 0.0;  // polar night
  } else if (cosws <= -1.0) {
    ws = std::numbers::pi;  // midnight sun
  } else {
    ws = std::acos(cosws);
  }
  w1 = std::max(w1, -ws);
  w2 = std::min(w2, ws);
  if (w2 <= w1) return 0.0;

  const double energy =
      (12.0 / std::numbers::pi) * kSolarConstant * ecc *
      (std::cos(phi) * std::cos(decl) * (std::sin(w2) - std::sin(w1)) +
       (w2 - w1) * std::sin(phi) * std::sin(decl));
  return std::max(energy, 0.0);
}

std::string CleaningReport::to_text() const {
  std::ostringstream os;
  os << "cleaning_report_version = 1\n"
     << "clamped_negative = " << clamped_negative << "\n"
     << "flagged_over_toa = " << flagged_over_toa << "\n"
     << "interpolated = " << interpolated << "\n"
     << "dropped_leap_hours = " << dropped_leap_hours << "\n"
     << "gap_policy = linear interpolation up to configured run, zero fill at night\n";
  return os.str();
}

HourlyPanel::HourlyPanel(Site site, int first_year, int n_years)
    : site_(std::move(site)),
      first_year_(first_year),
      n_years_(n_years),
      ghi_(static_cast<std::size_t>(n_years) * 365 * 24, 0.0),
      toa_(static_cast<std::size_t>(n_years) * 365 * 24, 0.0),
      over_toa_(static_cast<std::size_t>(n_years) * 365 * 24, 0) {}

void HourlyPanel::set(int i, int d, int h, double ghi, double toa,
                      bool flagged) {
  const std::size_t k = index(i, d, h);
  ghi_[k] = ghi;
  toa_[k] = toa;
  over_toa_[k] = flagged ? 1 : 0;
}

HourlyPanel HourlyPanel::select_years(const std::vector<int>& year_indices) const {
  HourlyPanel out(site_, first_year_ + (year_indices.empty() ? 0 : year_indices.front()),
                  static_cast<int>(year_indices.size()));
  for (std::size_t k = 0; k < year_indices.size(); ++k) {
    const int i = year_indices[k];
    if (i < 0 || i >= n_years_) throw IncompleteYears("year index out of span");
    for (int d = 1; d <= 365; ++d) {
      for (int h = 0; h < 24; ++h) {
        out.set(static_cast<int>(k), d, h, ghi(i, d, h), toa(i, d, h),
                over_toa(i, d, h));
      }
    }
  }
  return out;
}

HourlyPanel ingest_csv(const std::string& path, const CsvSchema& schema,
                       CleaningReport* report) {
  std::ifstream in(path);
  if (!in) throw EmptyFile("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw EmptyFile(path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = split_csv_line(line);
  auto col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw MissingColumn(name + " in " + path);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_ts = col(schema.timestamp_col);
  const std::size_t c_ghi = col(schema.ghi_col);
  const std::size_t c_toa = col(schema.toa_col);

  CleaningReport rep;

  struct Row {
    long slot;  // panel-linear hour index relative to first record's year
    double ghi;
    double toa;
  };
  std::vector<Row> rows;
  int first_year = 0;
  long prev_slot = -1;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() <= std::max({c_ts, c_ghi, c_toa})) {
      throw MissingColumn("short row in " + path);
    }
    const ParsedStamp ts = parse_rfc3339_hour(cells[c_ts]);
    if (ts.leap_day) {
      ++rep.dropped_leap_hours;
      continue;
    }
    if (first) {
      first_year = ts.year;
      first = false;
    }
    const long slot = (static_cast<long>(ts.year - first_year) * 365 +
                       (ts.doy365 - 1)) *
                          24 +
                      ts.hour;
    if (slot <= prev_slot) {
      throw NonMonotoneTimestamps("at " + cells[c_ts]);
    }
    const long gap = slot - prev_slot - 1;
    if (prev_slot >= 0 && gap > schema.max_gap_hours) {
      throw GapTooLarge(std::to_string(gap) + " missing hours before " +
                        cells[c_ts]);
    }
    rows.push_back({slot, std::stod(cells[c_ghi]), std::stod(cells[c_toa])});
    prev_slot = slot;
  }
  if (rows.empty()) throw EmptyFile(path);
  if (rows.front().slot != 0 || (rows.back().slot + 1) % (365 * 24) != 0) {
    throw IncompleteYears("panel must cover whole years");
  }
  const int n_years = static_cast<int>((rows.back().slot + 1) / (365 * 24));

  HourlyPanel panel({0.0, 0.0, ""}, first_year, n_years);
  // Expand gaps by linear interpolation (zero fill at night), then clean.
  std::vector<double> ghi(static_cast<std::size_t>(n_years) * 365 * 24);
  std::vector<double> toa(ghi.size());
  std::size_t r = 0;
  for (long slot = 0; slot < static_cast<long>(ghi.size()); ++slot) {
    if (r < rows.size() && rows[r].slot == slot) {
      ghi[static_cast<std::size_t>(slot)] = rows[r].ghi;
      toa[static_cast<std::size_t>(slot)] = rows[r].toa;
      ++r;
    } else {
      const Row& a = rows[r - 1];
      const Row& b = rows[r];
      const double w = static_cast<double>(slot - a.slot) /
                       static_cast<double>(b.slot - a.slot);
      const double ti = a.toa + w * (b.toa - a.toa);
      double gi = a.ghi + w * (b.ghi - a.ghi);
      if (ti <= 0.0) gi = 0.0;
      ghi[static_cast<std::size_t>(slot)] = gi;
      toa[static_cast<std::size_t>(slot)] = ti;
      ++rep.interpolated;
    }
  }
  for (std::size_t k = 0; k < ghi.size(); ++k) {
    double g = ghi[k];
    const double t = toa[k];
    bool flagged = false;
    if (g < 0.0) {
      g = 0.0;
      ++rep.clamped_negative;
    }
    if (g > t + schema.measurement_slack) {
      flagged = true;
      ++rep.flagged_over_toa;
      if (t <= 0.0) g = 0.0;  // night hours carry no irradiation
    }
    const int i = static_cast<int>(k / (365 * 24));
    const int d = static_cast<int>((k / 24) % 365) + 1;
    const int h = static_cast<int>(k % 24);
    panel.set(i, d, h, g, t, flagged);
  }
  if (report) *report = rep;
  return panel;
}

void export_csv(const HourlyPanel& panel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw EmptyFile("cannot write " + path);
  out << "timestamp_utc,ghi_whm2,toa_whm2\n";
  char buf[64];
  for (int i = 0; i < panel.n_years(); ++i) {
    const int year = panel.first_year() + i;
    for (int d = 1; d <= 365; ++d) {
      int month = 11;
      while (kCumDays[month] >= d) --month;
      const int day = d - kCumDays[month];
      for (int h = 0; h < 24; ++h) {
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00:00Z", year,
                      month + 1, day, h);
        out << buf << ',' << panel.ghi(i, d, h) << ',' << panel.toa(i, d, h)
            << '\n';
      }
    }
  }
}

}  // namespace ghisim
