#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "ghisim/calendar.hpp"
#include "ghisim/errors.hpp"

using namespace ghisim;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("calendar");

namespace {

const Site kSiegen{50.9, 8.0, "siegen"};

std::string temp_path(const std::string& name) {
  return (fs::temp_directory_path() / name).string();
}

// Writes a clean 365-day-per-year panel CSV covering `years` non-leap-shaped
// years starting 2001; `mutate` may rewrite single cells.
void write_panel_csv(const std::string& path, int years,
                     double ghi_base = 100.0) {
  std::ofstream os(path);
  os << "timestamp_utc,ghi_whm2,toa_whm2\n";
  static const int cum[12] = {0,   31,  59,  90,  120, 151,
                              181, 212, 243, 273, 304, 334};
  for (int y = 0; y < years; ++y) {
    for (int d = 1; d <= 365; ++d) {
      int mo = 11;
      while (cum[mo] >= d) --mo;
      const int day = d - cum[mo];
      for (int h = 0; h < 24; ++h) {
        const double toa = compute_toa(kSiegen, d, h);
        const double ghi = toa > 0.0 ? std::min(ghi_base, 0.8 * toa) : 0.0;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00:00Z",
                      2001 + y, mo + 1, day, h);
        os << buf << ',' << ghi << ',' << toa << '\n';
      }
    }
  }
}

}  // namespace

TEST_CASE("toa is zero at night in siegen winter") {
  CHECK(compute_toa(kSiegen, 355, 0) == 0.0);
}

TEST_CASE("toa symmetric around solar noon at the equator on the equinox") {
  const Site equator{0.0, 0.0, "eq"};
  // d = 80 is near the March equinox. Hour h covers [h, h+1), so the hours
  // mirrored around solar noon (12:00) are 11-k and 12+k.
  for (int k = 0; k <= 4; ++k) {
    const double before = compute_toa(equator, 80, 11 - k);
    const double after = compute_toa(equator, 80, 12 + k);
    CHECK(std::abs(before - after) < 0.5);
  }
}

TEST_CASE("toa matches a fine numerical integration oracle") {
  // Straight-line integration of instantaneous extraterrestrial irradiance
  // over the hour, 10000 steps.
  const int d = 172, h = 12;
  const double phi = 50.9 * M_PI / 180.0;
  const double decl = 23.45 * M_PI / 180.0 *
                      std::sin(2.0 * M_PI * (284.0 + d) / 365.0);
  const double ecc = 1.0 + 0.033 * std::cos(2.0 * M_PI * d / 365.0);
  const std::size_t n = 10000;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(h) + 8.0 / 15.0 +
                     (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double w = (t - 12.0) * 15.0 * M_PI / 180.0;
    const double cosz = std::sin(phi) * std::sin(decl) +
                        std::cos(phi) * std::cos(decl) * std::cos(w);
    if (cosz > 0.0) sum += 1367.0 * ecc * cosz;
  }
  const double oracle = sum / static_cast<double>(n);
  const double got = compute_toa(kSiegen, d, h);
  CHECK(std::abs(got - oracle) / oracle < 0.01);
}

TEST_CASE("toa seasonality sign for a northern site") {
  CHECK(compute_toa(kSiegen, 172, 12) > compute_toa(kSiegen, 355, 12));
  for (int d = 1; d <= 365; d += 7) {
    for (int h = 0; h < 24; ++h) {
      CHECK(compute_toa(kSiegen, d, h) >= 0.0);
    }
  }
}

TEST_CASE("clean two-year ingest round trips") {
  const auto path = temp_path("ghisim_clean.csv");
  write_panel_csv(path, 2);
  CleaningReport rep;
  const HourlyPanel panel = ingest_csv(path, CsvSchema{}, &rep);
  CHECK(panel.n_years() == 2);
  CHECK(panel.size() == 2u * 365u * 24u);
  CHECK(rep.empty());

  const auto out = temp_path("ghisim_roundtrip.csv");
  export_csv(panel, out);
  CleaningReport rep2;
  const HourlyPanel again = ingest_csv(out, CsvSchema{}, &rep2);
  REQUIRE(again.size() == panel.size());
  for (int i = 0; i < 2; ++i) {
    for (int d = 1; d <= 365; ++d) {
      for (int h = 0; h < 24; ++h) {
        CHECK(again.ghi(i, d, h) == doctest::Approx(panel.ghi(i, d, h)));
        CHECK(again.toa(i, d, h) == doctest::Approx(panel.toa(i, d, h)));
      }
    }
  }
  fs::remove(path);
  fs::remove(out);
}

TEST_CASE("negative ghi is clamped and counted") {
  const auto path = temp_path("ghisim_neg.csv");
  write_panel_csv(path, 1);
  // Rewrite one midday cell to a negative reading.
  std::ifstream in(path);
  std::string all, line;
  while (std::getline(in, line)) {
    if (line.rfind("2001-06-21T12:00:00Z", 0) == 0) {
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      line = line.substr(0, c1) + ",-3" + line.substr(c2);
    }
    all += line + "\n";
  }
  in.close();
  std::ofstream(path) << all;

  CleaningReport rep;
  const HourlyPanel panel = ingest_csv(path, CsvSchema{}, &rep);
  CHECK(rep.clamped_negative == 1);
  CHECK(panel.ghi(0, 172, 12) == 0.0);
  fs::remove(path);
}

TEST_CASE("short night gap is zero filled") {
  const auto path = temp_path("ghisim_gap.csv");
  write_panel_csv(path, 1);
  std::ifstream in(path);
  std::string all, line;
  while (std::getline(in, line)) {
    if (line.rfind("2001-01-05T01:00:00Z", 0) == 0 ||
        line.rfind("2001-01-05T02:00:00Z", 0) == 0) {
      continue;  // drop two night hours
    }
    all += line + "\n";
  }
  in.close();
  std::ofstream(path) << all;

  CleaningReport rep;
  const HourlyPanel panel = ingest_csv(path, CsvSchema{}, &rep);
  CHECK(rep.interpolated == 2);
  CHECK(panel.ghi(0, 5, 1) == 0.0);
  CHECK(panel.ghi(0, 5, 2) == 0.0);
  fs::remove(path);
}

TEST_CASE("long gaps and shuffled stamps are rejected") {
  const auto path = temp_path("ghisim_bad.csv");
  write_panel_csv(path, 1);
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  in.close();

  SUBCASE("gap beyond the interpolation limit") {
    std::ofstream os(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (i >= 50 && i < 55) continue;  // 5-hour hole
      os << lines[i] << '\n';
    }
    os.close();
    CHECK_THROWS_AS(ingest_csv(path, CsvSchema{}), GapTooLarge);
  }
  SUBCASE("non monotone timestamps") {
    std::swap(lines[10], lines[11]);
    std::ofstream os(path);
    for (const auto& l : lines) os << l << '\n';
    os.close();
    CHECK_THROWS_AS(ingest_csv(path, CsvSchema{}), NonMonotoneTimestamps);
  }
  SUBCASE("missing column") {
    lines[0] = "timestamp_utc,ghi_whm2";
    std::ofstream os(path);
    for (const auto& l : lines) os << l << '\n';
    os.close();
    CHECK_THROWS_AS(ingest_csv(path, CsvSchema{}), MissingColumn);
  }
  fs::remove(path);
}

TEST_CASE("leap day rows are dropped") {
  const auto path = temp_path("ghisim_leap.csv");
  {
    std::ofstream os(path);
    os << "timestamp_utc,ghi_whm2,toa_whm2\n";
    // One synthetic "year" that includes Feb 29 rows (as in 2004).
    static const int cum[12] = {0,   31,  59,  90,  120, 151,
                                181, 212, 243, 273, 304, 334};
    for (int d = 1; d <= 365; ++d) {
      int mo = 11;
      while (cum[mo] >= d) --mo;
      const int day = d - cum[mo];
      for (int h = 0; h < 24; ++h) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00:00Z", 2004,
                      mo + 1, day, h);
        os << buf << ",0,0\n";
        if (mo == 1 && day == 28 && h == 23) {
          for (int lh = 0; lh < 24; ++lh) {
            std::snprintf(buf, sizeof(buf), "2004-02-29T%02d:00:00Z", lh);
            os << buf << ",0,0\n";
          }
        }
      }
    }
  }
  CleaningReport rep;
  const HourlyPanel panel = ingest_csv(path, CsvSchema{}, &rep);
  CHECK(panel.n_years() == 1);
  CHECK(rep.dropped_leap_hours == 24);
  fs::remove(path);
}

TEST_CASE("year selection preserves values") {
  const auto path = temp_path("ghisim_sel.csv");
  write_panel_csv(path, 3);
  const HourlyPanel panel = ingest_csv(path, CsvSchema{});
  const HourlyPanel sub = panel.select_years({1, 2});
  CHECK(sub.n_years() == 2);
  CHECK(sub.ghi(0, 100, 12) == panel.ghi(1, 100, 12));
  CHECK(sub.ghi(1, 100, 12) == panel.ghi(2, 100, 12));
  fs::remove(path);
}

TEST_SUITE_END();
