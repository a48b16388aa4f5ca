#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fedloc/dataset.hpp"
#include "fedloc/rng.hpp"

namespace fedloc {

// Synthetic RSS survey in the 520-WAP CSV layout. Beacons follow a
// log-distance path-loss model with per-floor penetration loss and two
// shadowing components: a static spatial field per AP (obstacles, learnable
// structure, realized as random Fourier features) and a small iid
// per-measurement term. Visibility behaves like a real multi-floor office
// survey: roughly 15-25 APs audible per sample, everything else at the
// +100 sentinel.
struct SynthConfig {
  std::size_t samples = 19937;
  double area_width_m = 390.0;
  double area_depth_m = 270.0;
  int floors = 4;
  double floor_height_m = 4.0;
  double tx_power_dbm = -36.0;       // received power at 1 m
  double path_loss_exponent = 3.3;
  double spatial_sigma_db = 5.0;     // static shadowing field
  double spatial_wavelength_min_m = 25.0;
  double spatial_wavelength_max_m = 100.0;
  double noise_sigma_db = 1.5;       // per-measurement noise
  double floor_penetration_db = 16.0;
  double miss_rate = 0.03;           // chance a detectable beacon is missed

  // Surveys revisit a fixed set of reference points rather than covering
  // the floor uniformly; samples scatter around their point by the jitter.
  int reference_points = 933;
  double reference_jitter_m = 0.8;
  std::uint64_t seed = 20140623;

  // Emitted coordinates mimic the magnitude of real survey frames so the
  // local-frame shift in preprocess() does real work.
  double longitude_base = -7691.338;
  double latitude_base = 4864745.75;
};

inline std::vector<RawRecord> generate_records(const SynthConfig& cfg = {}) {
  constexpr int kFieldWaves = 6;
  struct Ap {
    double x, y, z;
    int floor;
    // random Fourier shadowing field: sum of a*cos(kx*x + ky*y + phase)
    std::array<double, kFieldWaves> amp, kx, ky, phase;
  };
  Rng ap_rng(mix_seed(cfg.seed, 1));
  std::vector<Ap> aps(kNumWaps);
  const double two_pi = 2.0 * 3.14159265358979323846;
  for (Ap& ap : aps) {
    ap.x = ap_rng.uniform(0.0, cfg.area_width_m);
    ap.y = ap_rng.uniform(0.0, cfg.area_depth_m);
    ap.floor = static_cast<int>(ap_rng.below(cfg.floors));
    ap.z = ap.floor * cfg.floor_height_m + 2.7;
    for (int j = 0; j < kFieldWaves; ++j) {
      const double wavelength =
          cfg.spatial_wavelength_min_m *
          std::pow(cfg.spatial_wavelength_max_m / cfg.spatial_wavelength_min_m, ap_rng.uniform());
      const double dir = ap_rng.uniform(0.0, two_pi);
      ap.kx[j] = two_pi / wavelength * std::cos(dir);
      ap.ky[j] = two_pi / wavelength * std::sin(dir);
      ap.phase[j] = ap_rng.uniform(0.0, two_pi);
      ap.amp[j] = ap_rng.normal() * cfg.spatial_sigma_db * std::sqrt(2.0 / kFieldWaves);
    }
  }

  struct RefPoint {
    double x, y;
    int floor;
  };
  Rng rp_rng(mix_seed(cfg.seed, 3));
  std::vector<RefPoint> ref_points(cfg.reference_points);
  for (RefPoint& rp : ref_points) {
    rp.x = rp_rng.uniform(0.0, cfg.area_width_m);
    rp.y = rp_rng.uniform(0.0, cfg.area_depth_m);
    rp.floor = static_cast<int>(rp_rng.below(cfg.floors));
  }

  Rng rng(mix_seed(cfg.seed, 2));
  std::vector<RawRecord> records(cfg.samples);
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    RawRecord& rec = records[i];
    const RefPoint& rp = ref_points[rng.below(ref_points.size())];
    const double x =
        std::clamp(rp.x + rng.normal(0.0, cfg.reference_jitter_m), 0.0, cfg.area_width_m);
    const double y =
        std::clamp(rp.y + rng.normal(0.0, cfg.reference_jitter_m), 0.0, cfg.area_depth_m);
    const int floor = rp.floor;
    const double z = floor * cfg.floor_height_m + 1.2;

    for (int w = 0; w < kNumWaps; ++w) {
      const Ap& ap = aps[w];
      const double dx = x - ap.x;
      const double dy = y - ap.y;
      const double dz = z - ap.z;
      const double dist = std::max(1.0, std::sqrt(dx * dx + dy * dy + dz * dz));
      double shadow = 0.0;
      for (int j = 0; j < kFieldWaves; ++j) {
        shadow += ap.amp[j] * std::cos(ap.kx[j] * x + ap.ky[j] * y + ap.phase[j]);
      }
      double rss = cfg.tx_power_dbm - 10.0 * cfg.path_loss_exponent * std::log10(dist) -
                   std::abs(floor - ap.floor) * cfg.floor_penetration_db + shadow +
                   rng.normal(0.0, cfg.noise_sigma_db);
      if (rss < kMinDetectedRss || rng.uniform() < cfg.miss_rate) {
        rec.wap_rss[w] = kNotDetected;
      } else {
        rec.wap_rss[w] = static_cast<std::int16_t>(std::lround(std::min(rss, 0.0)));
      }
    }

    rec.longitude = cfg.longitude_base + x;
    rec.latitude = cfg.latitude_base + y;
    rec.floor = floor;
    rec.building_id = static_cast<int>(x / (cfg.area_width_m / 3.0 + 1e-9));

    const int space_id = 100 + static_cast<int>(rng.below(200));
    const int rel_pos = 1 + static_cast<int>(rng.below(2));
    const int user_id = 1 + static_cast<int>(rng.below(18));
    const int phone_id = 1 + static_cast<int>(rng.below(25));
    const long long ts = 1371713733LL + static_cast<long long>(i);
    char aux[96];
    std::snprintf(aux, sizeof(aux), "%d,%d,%d,%d,%lld", space_id, rel_pos, user_id, phone_id, ts);
    rec.aux = aux;
  }
  return records;
}

inline void write_csv(const std::filesystem::path& path, const std::vector<RawRecord>& records) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  for (int w = 0; w < kNumWaps; ++w) {
    char name[8];
    std::snprintf(name, sizeof(name), "WAP%03d", w + 1);
    out << name << ',';
  }
  out << "LONGITUDE,LATITUDE,FLOOR,BUILDINGID,SPACEID,RELATIVEPOSITION,USERID,PHONEID,TIMESTAMP\n";
  char buf[64];
  for (const RawRecord& rec : records) {
    for (int w = 0; w < kNumWaps; ++w) {
      out << rec.wap_rss[w] << ',';
    }
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,", rec.longitude, rec.latitude);
    out << buf << rec.floor << ',' << rec.building_id << ',' << rec.aux << '\n';
  }
  if (!out) throw ConfigError("short write to '" + path.string() + "'");
}

}  // namespace fedloc
