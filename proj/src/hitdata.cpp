#include "qtrack/hitdata.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>

#include "qtrack/errors.hpp"

namespace qtrack {

double Hit::r() const { return std::hypot(x, y); }

double Hit::phi() const { return std::atan2(y, x); }

namespace {

constexpr double kZEnvelopeMm = 1100.0;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& cell, const std::filesystem::path& path,
                    std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw ParseError(path.string() + ":" + std::to_string(line_no) +
                     ": non-numeric cell '" + cell + "'");
  }
}

long long parse_ll(const std::string& cell, const std::filesystem::path& path,
                   std::size_t line_no) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw ParseError(path.string() + ":" + std::to_string(line_no) +
                     ": non-integer cell '" + cell + "'");
  }
}

}  // namespace

Event generate_event(const GeneratorConfig& config, long long event_id,
                     std::uint64_t seed) {
  if (config.n_tracks < 1) throw ConfigError("n_tracks must be >= 1");
  if (config.pt_min < 0.1) throw ConfigError("pt_min must be >= 0.1 GeV");
  if (!(config.pt_max > config.pt_min))
    throw ConfigError("empty pt range");
  if (!(config.noise_fraction >= 0.0 && config.noise_fraction < 1.0))
    throw ConfigError("noise_fraction must be in [0, 1)");

  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (event_id + 1)));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Event event;
  event.event_id = event_id;
  long long next_hit_id = 1;

  for (int t = 0; t < config.n_tracks; ++t) {
    ParticleTruth p;
    p.particle_id = t + 1;
    p.pt = config.pt_min + (config.pt_max - config.pt_min) * u01(rng);
    p.eta = -config.eta_max + 2.0 * config.eta_max * u01(rng);
    p.vz = config.vz_sigma_mm * gauss(rng);
    p.charge = u01(rng) < 0.5 ? 1 : -1;
    const double phi0 = -std::numbers::pi + 2.0 * std::numbers::pi * u01(rng);
    event.particles.push_back(p);

    // xy circle of radius R through the origin, z linear in transverse
    // arc length with slope dz/ds = sinh(eta).
    const double radius = 1000.0 * p.pt / (0.3 * config.b_field_tesla);
    const double curvature = static_cast<double>(p.charge) / radius;
    const double dzds = std::sinh(p.eta);

    for (std::size_t l = 0; l < config.layer_radii.size(); ++l) {
      const double rl = config.layer_radii[l];
      if (rl >= 2.0 * radius) break;  // helix never reaches this layer
      const double s = 2.0 * radius * std::asin(rl / (2.0 * radius));
      const double turn = phi0 + curvature * s;
      const double x = (std::sin(turn) - std::sin(phi0)) / curvature;
      const double y = (std::cos(phi0) - std::cos(turn)) / curvature;
      const double z = p.vz + s * dzds;
      if (std::abs(z) > kZEnvelopeMm) break;  // left the barrel
      Hit h;
      h.hit_id = next_hit_id++;
      h.x = x + config.smear_mm * gauss(rng);
      h.y = y + config.smear_mm * gauss(rng);
      h.z = z + config.smear_mm * gauss(rng);
      h.layer = static_cast<int>(l);
      h.particle_id = p.particle_id;
      event.hits.push_back(h);
    }
  }

  const std::size_t n_noise = static_cast<std::size_t>(
      std::ceil(config.noise_fraction * static_cast<double>(event.hits.size())));
  std::uniform_int_distribution<std::size_t> layer_dist(
      0, config.layer_radii.size() - 1);
  for (std::size_t i = 0; i < n_noise; ++i) {
    const std::size_t l = layer_dist(rng);
    const double rl = config.layer_radii[l] + config.smear_mm * gauss(rng);
    const double phi = -std::numbers::pi + 2.0 * std::numbers::pi * u01(rng);
    Hit h;
    h.hit_id = next_hit_id++;
    h.x = rl * std::cos(phi);
    h.y = rl * std::sin(phi);
    h.z = -kZEnvelopeMm + 2.0 * kZEnvelopeMm * u01(rng);
    h.layer = static_cast<int>(l);
    h.particle_id = 0;
    event.hits.push_back(h);
  }
  return event;
}

Event load_event(const std::filesystem::path& hits_path,
                 const std::filesystem::path& particles_path) {
  Event event;

  std::ifstream hf(hits_path);
  if (!hf) throw ParseError("cannot open " + hits_path.string());
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(hf, line) || line != "hit_id,x,y,z,layer,particle_id")
    throw ParseError(hits_path.string() + ":1: bad or missing header");
  while (std::getline(hf, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != 6)
      throw ParseError(hits_path.string() + ":" + std::to_string(line_no) +
                       ": expected 6 columns, got " +
                       std::to_string(cells.size()));
    Hit h;
    h.hit_id = parse_ll(cells[0], hits_path, line_no);
    h.x = parse_double(cells[1], hits_path, line_no);
    h.y = parse_double(cells[2], hits_path, line_no);
    h.z = parse_double(cells[3], hits_path, line_no);
    h.layer = static_cast<int>(parse_ll(cells[4], hits_path, line_no));
    h.particle_id = parse_ll(cells[5], hits_path, line_no);
    event.hits.push_back(h);
  }

  std::ifstream pf(particles_path);
  if (!pf) throw ParseError("cannot open " + particles_path.string());
  line_no = 1;
  if (!std::getline(pf, line) || line != "particle_id,pt,eta,vz,charge")
    throw ParseError(particles_path.string() + ":1: bad or missing header");
  while (std::getline(pf, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != 5)
      throw ParseError(particles_path.string() + ":" + std::to_string(line_no) +
                       ": expected 5 columns, got " +
                       std::to_string(cells.size()));
    ParticleTruth p;
    p.particle_id = parse_ll(cells[0], particles_path, line_no);
    p.pt = parse_double(cells[1], particles_path, line_no);
    p.eta = parse_double(cells[2], particles_path, line_no);
    p.vz = parse_double(cells[3], particles_path, line_no);
    p.charge = static_cast<int>(parse_ll(cells[4], particles_path, line_no));
    event.particles.push_back(p);
  }

  std::unordered_set<long long> known;
  for (const auto& p : event.particles) known.insert(p.particle_id);
  for (std::size_t i = 0; i < event.hits.size(); ++i) {
    const long long pid = event.hits[i].particle_id;
    if (pid != 0 && !known.count(pid))
      throw ParseError(hits_path.string() + ": hit " +
                       std::to_string(event.hits[i].hit_id) +
                       " references unknown particle " + std::to_string(pid));
  }
  return event;
}

void write_event(const Event& event, const std::filesystem::path& hits_path,
                 const std::filesystem::path& particles_path) {
  std::ofstream hf(hits_path);
  if (!hf) throw std::runtime_error("cannot write " + hits_path.string());
  hf << "hit_id,x,y,z,layer,particle_id\n";
  for (const auto& h : event.hits)
    hf << h.hit_id << ',' << fmt(h.x) << ',' << fmt(h.y) << ',' << fmt(h.z)
       << ',' << h.layer << ',' << h.particle_id << '\n';
  if (!hf.good()) throw std::runtime_error("write failed: " + hits_path.string());

  std::ofstream pf(particles_path);
  if (!pf) throw std::runtime_error("cannot write " + particles_path.string());
  pf << "particle_id,pt,eta,vz,charge\n";
  for (const auto& p : event.particles)
    pf << p.particle_id << ',' << fmt(p.pt) << ',' << fmt(p.eta) << ','
       << fmt(p.vz) << ',' << p.charge << '\n';
  if (!pf.good())
    throw std::runtime_error("write failed: " + particles_path.string());
}

}  // namespace qtrack
