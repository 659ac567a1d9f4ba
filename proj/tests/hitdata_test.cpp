#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <unistd.h>

#include "qtrack/errors.hpp"
#include "qtrack/hitdata.hpp"

using namespace qtrack;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("qtrack_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static inline int counter = 0;
};

}  // namespace

TEST_CASE("high-pt central track crosses all ten layers") {
  GeneratorConfig cfg;
  cfg.n_tracks = 1;
  cfg.pt_min = 99.0;
  cfg.pt_max = 101.0;
  cfg.eta_max = 0.0;      // force eta = 0
  cfg.vz_sigma_mm = 0.0;  // force vz = 0
  cfg.noise_fraction = 0.0;
  const Event event = generate_event(cfg, 0, 321);
  REQUIRE(event.hits.size() == 10);
  std::set<int> layers;
  for (const auto& h : event.hits) {
    layers.insert(h.layer);
    CHECK(h.particle_id == 1);
    CHECK(std::abs(h.z) < 1.0);  // near-straight central track, smearing only
  }
  CHECK(layers.size() == 10);
}

TEST_CASE("generated hits sit on the layer radii") {
  GeneratorConfig cfg;
  cfg.n_tracks = 20;
  const Event event = generate_event(cfg, 3, 7);
  for (const auto& h : event.hits) {
    const double nominal = cfg.layer_radii[h.layer];
    CHECK(std::abs(h.r() - nominal) <= 3.0 * cfg.smear_mm + 1e-6);
  }
}

TEST_CASE("noise_fraction zero means no noise hits") {
  GeneratorConfig cfg;
  cfg.n_tracks = 10;
  cfg.noise_fraction = 0.0;
  const Event event = generate_event(cfg, 0, 5);
  for (const auto& h : event.hits) CHECK(h.particle_id != 0);
}

TEST_CASE("noise hits carry particle_id zero") {
  GeneratorConfig cfg;
  cfg.n_tracks = 10;
  cfg.noise_fraction = 0.2;
  const Event event = generate_event(cfg, 0, 5);
  std::size_t noise = 0;
  for (const auto& h : event.hits) noise += h.particle_id == 0;
  CHECK(noise > 0);
}

TEST_CASE("same seed gives bit-identical events") {
  GeneratorConfig cfg;
  cfg.n_tracks = 8;
  cfg.noise_fraction = 0.1;
  const Event a = generate_event(cfg, 2, 99);
  const Event b = generate_event(cfg, 2, 99);
  REQUIRE(a.hits.size() == b.hits.size());
  for (std::size_t i = 0; i < a.hits.size(); ++i) {
    CHECK(a.hits[i].x == b.hits[i].x);
    CHECK(a.hits[i].y == b.hits[i].y);
    CHECK(a.hits[i].z == b.hits[i].z);
  }
}

TEST_CASE("generator validates its configuration") {
  GeneratorConfig cfg;
  cfg.n_tracks = 0;
  CHECK_THROWS_AS(generate_event(cfg, 0, 1), ConfigError);
  cfg = {};
  cfg.pt_min = 0.05;
  CHECK_THROWS_AS(generate_event(cfg, 0, 1), ConfigError);
  cfg = {};
  cfg.pt_min = 2.0;
  cfg.pt_max = 1.0;
  CHECK_THROWS_AS(generate_event(cfg, 0, 1), ConfigError);
  cfg = {};
  cfg.noise_fraction = 1.0;
  CHECK_THROWS_AS(generate_event(cfg, 0, 1), ConfigError);
}

TEST_CASE("helix sanity: phi slope below the Table-style cut") {
  GeneratorConfig cfg;
  cfg.n_tracks = 50;
  cfg.pt_min = 1.0;
  cfg.pt_max = 5.0;
  const Event event = generate_event(cfg, 0, 1);
  std::size_t pass = 0, total = 0;
  std::map<long long, std::vector<const Hit*>> tracks;
  for (const auto& h : event.hits) tracks[h.particle_id].push_back(&h);
  for (auto& [pid, hits] : tracks) {
    std::sort(hits.begin(), hits.end(),
              [](const Hit* a, const Hit* b) { return a->r() < b->r(); });
    for (std::size_t i = 0; i + 1 < hits.size(); ++i) {
      if (hits[i + 1]->layer != hits[i]->layer + 1) continue;
      double dphi = hits[i + 1]->phi() - hits[i]->phi();
      while (dphi > M_PI) dphi -= 2 * M_PI;
      while (dphi <= -M_PI) dphi += 2 * M_PI;
      const double dr = hits[i + 1]->r() - hits[i]->r();
      ++total;
      if (std::abs(dphi / dr) <= 0.0006) ++pass;
    }
  }
  REQUIRE(total > 50);
  CHECK(static_cast<double>(pass) / total >= 0.95);
}

TEST_CASE("round trip through CSV preserves the event") {
  TempDir tmp;
  GeneratorConfig cfg;
  cfg.n_tracks = 6;
  cfg.noise_fraction = 0.15;
  const Event event = generate_event(cfg, 4, 11);
  const auto hits_path = tmp.path / "hits.csv";
  const auto parts_path = tmp.path / "particles.csv";
  write_event(event, hits_path, parts_path);
  Event loaded = load_event(hits_path, parts_path);
  loaded.event_id = event.event_id;  // not stored in the files

  REQUIRE(loaded.hits.size() == event.hits.size());
  REQUIRE(loaded.particles.size() == event.particles.size());
  for (std::size_t i = 0; i < event.hits.size(); ++i) {
    CHECK(loaded.hits[i].hit_id == event.hits[i].hit_id);
    CHECK(loaded.hits[i].x == event.hits[i].x);  // %.17g round-trips exactly
    CHECK(loaded.hits[i].particle_id == event.hits[i].particle_id);
  }
  for (std::size_t i = 0; i < event.particles.size(); ++i) {
    CHECK(loaded.particles[i].particle_id == event.particles[i].particle_id);
    CHECK(loaded.particles[i].pt == event.particles[i].pt);
  }
}

TEST_CASE("derived coordinates from a hand-written file") {
  TempDir tmp;
  const auto hits_path = tmp.path / "hits.csv";
  const auto parts_path = tmp.path / "particles.csv";
  {
    std::ofstream h(hits_path);
    h << "hit_id,x,y,z,layer,particle_id\n";
    h << "1,3,4,10,0,7\n";
    h << "2,0,32,20,0,7\n";
    h << "3,-72,0,-5,1,7\n";
    std::ofstream p(parts_path);
    p << "particle_id,pt,eta,vz,charge\n";
    p << "7,2.5,0.3,1.0,-1\n";
  }
  const Event event = load_event(hits_path, parts_path);
  REQUIRE(event.hits.size() == 3);
  REQUIRE(event.particles.size() == 1);
  CHECK(event.hits[0].r() == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(event.hits[0].phi() == doctest::Approx(std::atan2(4, 3)).epsilon(1e-12));
}

TEST_CASE("header-only hits file loads as an empty event") {
  TempDir tmp;
  const auto hits_path = tmp.path / "hits.csv";
  const auto parts_path = tmp.path / "particles.csv";
  {
    std::ofstream h(hits_path);
    h << "hit_id,x,y,z,layer,particle_id\n";
    std::ofstream p(parts_path);
    p << "particle_id,pt,eta,vz,charge\n";
  }
  const Event event = load_event(hits_path, parts_path);
  CHECK(event.hits.empty());
  CHECK(event.particles.empty());
}

TEST_CASE("parse errors name the file and line") {
  TempDir tmp;
  const auto hits_path = tmp.path / "hits.csv";
  const auto parts_path = tmp.path / "particles.csv";
  {
    std::ofstream h(hits_path);
    h << "hit_id,x,y,z,layer,particle_id\n";
    h << "1,3,banana,10,0,7\n";
    std::ofstream p(parts_path);
    p << "particle_id,pt,eta,vz,charge\n";
    p << "7,2.5,0.3,1.0,-1\n";
  }
  try {
    load_event(hits_path, parts_path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("hits.csv:2") != std::string::npos);
  }
}

TEST_CASE("unknown particle reference is rejected") {
  TempDir tmp;
  const auto hits_path = tmp.path / "hits.csv";
  const auto parts_path = tmp.path / "particles.csv";
  {
    std::ofstream h(hits_path);
    h << "hit_id,x,y,z,layer,particle_id\n";
    h << "1,3,4,10,0,99\n";
    std::ofstream p(parts_path);
    p << "particle_id,pt,eta,vz,charge\n";
    p << "7,2.5,0.3,1.0,-1\n";
  }
  CHECK_THROWS_AS(load_event(hits_path, parts_path), ParseError);
}

TEST_CASE("missing header is rejected") {
  TempDir tmp;
  const auto hits_path = tmp.path / "hits.csv";
  const auto parts_path = tmp.path / "particles.csv";
  {
    std::ofstream h(hits_path);
    h << "1,3,4,10,0,7\n";
    std::ofstream p(parts_path);
    p << "particle_id,pt,eta,vz,charge\n";
  }
  CHECK_THROWS_AS(load_event(hits_path, parts_path), ParseError);
}
