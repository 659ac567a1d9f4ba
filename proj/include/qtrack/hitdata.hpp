#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace qtrack {

// One position measurement on a barrel layer. particle_id 0 marks noise.
struct Hit {
  long long hit_id = 0;
  double x = 0, y = 0, z = 0;  // mm
  int layer = 0;               // 0..9
  long long particle_id = 0;

  double r() const;    // sqrt(x^2 + y^2), mm
  double phi() const;  // atan2(y, x), (-pi, pi]
};

struct ParticleTruth {
  long long particle_id = 0;  // nonzero
  double pt = 0;              // GeV
  double eta = 0;
  double vz = 0;  // mm
  int charge = 1; // +1 or -1
};

struct Event {
  long long event_id = 0;
  std::vector<Hit> hits;
  std::vector<ParticleTruth> particles;
};

// Representative radii of the 10 barrel layers, mm. Overridable via config.
inline const std::vector<double> kDefaultLayerRadii = {
    32, 72, 116, 172, 260, 360, 500, 660, 820, 1020};

struct GeneratorConfig {
  int n_tracks = 5;
  double pt_min = 1.0;  // GeV, must be >= 0.1
  double pt_max = 5.0;
  double noise_fraction = 0.0;  // in [0, 1)
  std::vector<double> layer_radii = kDefaultLayerRadii;
  double b_field_tesla = 2.0;
  double smear_mm = 0.1;
  double eta_max = 1.2;   // tracks drawn uniform in [-eta_max, eta_max]
  double vz_sigma_mm = 30.0;
};

// Synthetic event: circular-arc helices through the barrel layers with
// gaussian position smearing, plus optional uniform noise hits.
// Deterministic given (config, event_id, seed).
Event generate_event(const GeneratorConfig& config, long long event_id,
                     std::uint64_t seed);

// CSV I/O. Hits: hit_id,x,y,z,layer,particle_id.
// Particles: particle_id,pt,eta,vz,charge. Header row required.
Event load_event(const std::filesystem::path& hits_path,
                 const std::filesystem::path& particles_path);
void write_event(const Event& event, const std::filesystem::path& hits_path,
                 const std::filesystem::path& particles_path);

}  // namespace qtrack
